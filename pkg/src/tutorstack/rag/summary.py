"""Learner-state summaries: the personal context injected into every prompt."""

from __future__ import annotations

from dataclasses import dataclass, field

from tutorstack.features.store import FeatureStore
from tutorstack.model.predict import KnowledgeTracer

WEAK_SKILL_THRESHOLD = 0.6


@dataclass
class LearnerStateSummary:
    student_id: str
    new_student: bool
    total_interactions: int
    weak_skills: list[tuple[str, float]]  # (skill_id, mastery), mastery ascending
    strong_skills: int
    cluster_id: int
    p_correct: float | None = None
    candidate_question_id: str | None = None
    masteries: dict[str, float] = field(default_factory=dict)
    observations: dict[str, int] = field(default_factory=dict)

    def render(self) -> str:
        """Deterministic text block for prompting."""
        lines = [f"Student {self.student_id}"]
        if self.new_student:
            lines.append("New student: no interactions recorded yet.")
        else:
            lines.append(f"Interactions recorded: {self.total_interactions}")
            lines.append(f"Ability cluster: {self.cluster_id}")
            if self.weak_skills:
                weak = ", ".join(f"{sid} (mastery {m:.2f})" for sid, m in self.weak_skills)
                lines.append(f"Weak skills: {weak}")
            else:
                lines.append("Weak skills: none")
            lines.append(f"Strong skills: {self.strong_skills}")
        if self.p_correct is not None:
            lines.append(
                f"Predicted success on question {self.candidate_question_id}: "
                f"{self.p_correct:.3f}"
            )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "student_id": self.student_id,
            "new_student": self.new_student,
            "total_interactions": self.total_interactions,
            "weak_skills": [
                {"skill_id": sid, "mastery": m} for sid, m in self.weak_skills
            ],
            "strong_skills": self.strong_skills,
            "cluster_id": self.cluster_id,
            "p_correct": self.p_correct,
            "candidate_question_id": self.candidate_question_id,
            "masteries": self.masteries,
            "observations": self.observations,
        }


def summarize_state(
    store: FeatureStore,
    student_id: str,
    candidate_question: tuple[str, str] | None = None,
    tracer: KnowledgeTracer | None = None,
    threshold: float = WEAK_SKILL_THRESHOLD,
) -> LearnerStateSummary:
    """Weak skills below the threshold, ability cluster, optional next-step p.

    candidate_question is a (question_id, skill_id) pair; the prediction only
    appears when a trained model is available.
    """
    total = store.interaction_count(student_id) if store.knows(student_id) else 0
    if total == 0:
        # unknown students and registered-but-empty students look the same
        summary = LearnerStateSummary(
            student_id=student_id,
            new_student=True,
            total_interactions=0,
            weak_skills=[],
            strong_skills=0,
            cluster_id=0,
        )
    else:
        masteries = store.masteries(student_id)
        weak = sorted(
            ((sid, sm.mastery) for sid, sm in masteries.items() if sm.mastery < threshold),
            key=lambda pair: (pair[1], pair[0]),
        )
        summary = LearnerStateSummary(
            student_id=student_id,
            new_student=False,
            total_interactions=total,
            weak_skills=weak,
            strong_skills=sum(1 for sm in masteries.values() if sm.mastery >= threshold),
            cluster_id=store.cluster_id(student_id),
            masteries={sid: sm.mastery for sid, sm in sorted(masteries.items())},
            observations={sid: sm.observations for sid, sm in sorted(masteries.items())},
        )
    if candidate_question is not None and tracer is not None:
        question_id, skill_id = candidate_question
        history = store.history(student_id) if store.knows(student_id) else []
        summary.p_correct = tracer.predict_next(history, question_id, skill_id).p_correct
        summary.candidate_question_id = question_id
    return summary
