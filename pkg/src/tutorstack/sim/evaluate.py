"""Held-out evaluation of a trained knowledge tracer.

Every test interaction at position t is predicted from that student's
prefix, exactly as the service would at inference time. The report carries
the model AUC, a per-question-mean baseline (rates from the training split,
stored in the checkpoint), and, when ground truth is available, the AUC of
the true emission probabilities as a ceiling reference.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping, Sequence

from tutorstack.interactions import Interaction, group_by_student, load_interactions
from tutorstack.model.predict import KnowledgeTracer
from tutorstack.sim.metrics import accuracy, auc, log_loss


@dataclass
class EvalReport:
    model_auc: float
    baseline_auc: float
    ceiling_auc: float | None
    accuracy: float
    log_loss: float
    n_students: int
    n_predictions: int

    def to_dict(self) -> dict:
        return asdict(self)


def eval_kt(
    checkpoint: KnowledgeTracer | str | Path,
    test_interactions: Sequence[Interaction] | str | Path,
    ground_truth: Mapping[tuple[str, int], float] | None = None,
) -> EvalReport:
    """Prefix-by-prefix evaluation; test students must be unseen in training."""
    tracer = (
        checkpoint
        if isinstance(checkpoint, KnowledgeTracer)
        else KnowledgeTracer.from_dir(checkpoint)
    )
    if isinstance(test_interactions, (str, Path)):
        test_interactions = load_interactions(test_interactions)

    logs = group_by_student(test_interactions)
    overlap = set(logs) & set(tracer.train_students)
    if overlap:
        raise ValueError(
            f"test students overlap training students: {sorted(overlap)[:5]}"
        )

    scores: list[float] = []
    baseline: list[float] = []
    truth: list[float] = []
    labels: list[bool] = []
    for student in sorted(logs):
        log = logs[student]
        for t, interaction in enumerate(log):
            pred = tracer.predict_next(
                log[:t], interaction.question_id, interaction.skill_id
            )
            scores.append(pred.p_correct)
            baseline.append(tracer.baseline_score(interaction.question_id))
            labels.append(interaction.correct)
            if ground_truth is not None:
                truth.append(ground_truth[(student, t)])

    return EvalReport(
        model_auc=auc(scores, labels),
        baseline_auc=auc(baseline, labels),
        ceiling_auc=auc(truth, labels) if ground_truth is not None else None,
        accuracy=accuracy(scores, labels),
        log_loss=log_loss(scores, labels),
        n_students=len(logs),
        n_predictions=len(labels),
    )
