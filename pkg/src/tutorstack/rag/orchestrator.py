"""The question-answering and recommendation pipeline.

ask: summarize learner state -> retrieve -> assemble prompt -> complete.
Backend failures degrade to a retrieval-only answer when any chunk was
retrieved; ranking in recommend never depends on the backend.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from tutorstack.features.store import FeatureStore
from tutorstack.kb.bm25 import tokenize
from tutorstack.kb.store import KnowledgeBase
from tutorstack.model.predict import KnowledgeTracer
from tutorstack.rag.backends import BackendError, LlmBackend
from tutorstack.rag.prompt import DEFAULT_BUDGET_CHARS, PromptBundle, assemble_prompt
from tutorstack.rag.summary import (
    WEAK_SKILL_THRESHOLD,
    LearnerStateSummary,
    summarize_state,
)

logger = logging.getLogger(__name__)

RETRIEVAL_ONLY_NOTICE = "[retrieval-only answer: tutoring backend unavailable]"


class TutorUnavailableError(Exception):
    """Backend failed and there was nothing retrieved to fall back on."""


@dataclass(frozen=True)
class SkillInfo:
    skill_id: str
    name: str
    keywords: tuple[str, ...]

    @property
    def query(self) -> str:
        return " ".join((self.name, *self.keywords))


class SkillCatalog:
    """skill_id -> display name + retrieval keywords (CSV-backed)."""

    def __init__(self, skills: dict[str, SkillInfo] | None = None):
        self._skills = dict(skills or {})

    @classmethod
    def load(cls, path: str | Path) -> "SkillCatalog":
        skills: dict[str, SkillInfo] = {}
        with Path(path).open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = {"skill_id", "name", "keywords"} - set(reader.fieldnames or [])
            if missing:
                raise ValueError(f"{path}: missing skill catalog columns {sorted(missing)}")
            for row in reader:
                keywords = tuple(k.strip() for k in row["keywords"].split(";") if k.strip())
                skills[row["skill_id"]] = SkillInfo(
                    skill_id=row["skill_id"], name=row["name"], keywords=keywords
                )
        return cls(skills)

    def get(self, skill_id: str) -> SkillInfo:
        info = self._skills.get(skill_id)
        if info is None:
            # unknown skills fall back to their id as the only keyword
            return SkillInfo(skill_id=skill_id, name=skill_id, keywords=(skill_id,))
        return info

    def __len__(self) -> int:
        return len(self._skills)


@dataclass
class AskResult:
    answer: str
    citations: list[dict]
    summary: LearnerStateSummary
    degraded: bool = False


@dataclass
class Recommendation:
    rank: int
    skill_id: str
    skill_name: str
    mastery: float
    doc_id: str
    chunk_index: int
    title: str
    score: float
    rationale: str

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "skill_id": self.skill_id,
            "skill_name": self.skill_name,
            "mastery": self.mastery,
            "doc_id": self.doc_id,
            "chunk_index": self.chunk_index,
            "title": self.title,
            "score": self.score,
            "rationale": self.rationale,
        }


@dataclass
class RecommendResult:
    items: list[Recommendation]
    all_skills_strong: bool = False


class TutorOrchestrator:
    def __init__(
        self,
        store: FeatureStore,
        kb: KnowledgeBase,
        backend: LlmBackend,
        tracer: KnowledgeTracer | None = None,
        catalog: SkillCatalog | None = None,
        weak_threshold: float = WEAK_SKILL_THRESHOLD,
        budget: int = DEFAULT_BUDGET_CHARS,
    ):
        self.store = store
        self.kb = kb
        self.backend = backend
        self.tracer = tracer
        self.catalog = catalog or SkillCatalog()
        self.weak_threshold = weak_threshold
        self.budget = budget

    def set_tracer(self, tracer: KnowledgeTracer | None) -> None:
        self.tracer = tracer

    def summarize(
        self, student_id: str, candidate_question: tuple[str, str] | None = None
    ) -> LearnerStateSummary:
        return summarize_state(
            self.store,
            student_id,
            candidate_question=candidate_question,
            tracer=self.tracer,
            threshold=self.weak_threshold,
        )

    def assemble(
        self, summary: LearnerStateSummary, question: str, top_k: int = 5
    ) -> PromptBundle:
        hits = self.kb.search(question, top_k=top_k)
        return assemble_prompt(summary.render(), hits, question, budget=self.budget)

    def ask(
        self,
        student_id: str,
        question: str,
        top_k: int = 5,
        candidate_question: tuple[str, str] | None = None,
    ) -> AskResult:
        summary = self.summarize(student_id, candidate_question)
        bundle = self.assemble(summary, question, top_k=top_k)
        try:
            answer = self.backend.complete(bundle)
            return AskResult(
                answer=answer, citations=bundle.citations(), summary=summary
            )
        except BackendError as exc:
            logger.warning("backend failed (%s); falling back to retrieval", exc)
            if bundle.context_blocks:
                top = bundle.context_blocks[0]
                answer = f"{RETRIEVAL_ONLY_NOTICE}\n{top.tag}\n{top.text}"
                return AskResult(
                    answer=answer,
                    citations=bundle.citations(),
                    summary=summary,
                    degraded=True,
                )
            raise TutorUnavailableError(
                "tutoring backend unavailable and no relevant material retrieved"
            ) from exc

    def recommend(self, student_id: str, rec_k: int = 3) -> RecommendResult:
        """Weak-skill study material: score = (1 - mastery) * bm25, top rec_k.

        Ranking is fully deterministic and backend-independent.
        """
        summary = self.summarize(student_id)
        if not summary.weak_skills:
            return RecommendResult(items=[], all_skills_strong=not summary.new_student)
        scored: list[tuple[float, str, tuple[str, int], Recommendation]] = []
        for skill_id, mastery in summary.weak_skills:
            info = self.catalog.get(skill_id)
            for hit in self.kb.search(info.query, top_k=max(rec_k, 1)):
                doc = self.kb.document(hit.chunk.doc_id)
                title = doc.title if doc else hit.chunk.doc_id
                score = (1.0 - mastery) * hit.score
                rec = Recommendation(
                    rank=0,
                    skill_id=skill_id,
                    skill_name=info.name,
                    mastery=mastery,
                    doc_id=hit.chunk.doc_id,
                    chunk_index=hit.chunk.chunk_index,
                    title=title,
                    score=score,
                    rationale=(
                        f"mastery {mastery:.2f} on skill {info.name}; revisit: {title}"
                    ),
                )
                scored.append((-score, skill_id, hit.chunk.ref, rec))
        scored.sort(key=lambda item: (item[0], item[1], item[2]))
        items = []
        for rank, (_, _, _, rec) in enumerate(scored[:rec_k], start=1):
            rec.rank = rank
            items.append(rec)
        return RecommendResult(items=items, all_skills_strong=False)
