"""Application state: the durable event log plus the live components.

On startup the knowledge base reopens from its own files, the model
checkpoint is hot-loaded if present, and the event log replays to rebuild
every derived per-student state. Writes for one student are serialized;
the event log is the source of truth (validate, append, then apply).
"""

from __future__ import annotations

import logging
import os
import threading
from collections import defaultdict
from pathlib import Path

from tutorstack.features.store import FeatureStore, OutOfOrderError, SkillMastery
from tutorstack.interactions import Interaction
from tutorstack.kb.store import KnowledgeBase
from tutorstack.model.checkpoint import MANIFEST_NAME
from tutorstack.model.predict import KnowledgeTracer
from tutorstack.rag.backends import LlmBackend, make_backend
from tutorstack.rag.orchestrator import (
    AskResult,
    RecommendResult,
    SkillCatalog,
    TutorOrchestrator,
)
from tutorstack.rag.summary import LearnerStateSummary
from tutorstack.service.events import EventLog

logger = logging.getLogger(__name__)

SKILLS_CSV = "skills.csv"
UNKNOWN_SKILL = "unknown"


class UnknownStudentError(KeyError):
    pass


class AppState:
    def __init__(
        self,
        data_dir: str | Path,
        backend: str | LlmBackend = "mock",
        token: str | None = None,
        env=None,
    ):
        env = os.environ if env is None else env
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.token = token if token is not None else env.get("TUTORSTACK_TOKEN", "")

        self.events = EventLog(self.data_dir / "events.jsonl")
        self.kb = KnowledgeBase(self.data_dir / "kb")
        self.store = FeatureStore()
        self.question_skills: dict[str, str] = {}
        self._student_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

        catalog_path = self.data_dir / SKILLS_CSV
        self.catalog = SkillCatalog.load(catalog_path) if catalog_path.exists() else SkillCatalog()

        self.backend: LlmBackend = (
            make_backend(backend, env) if isinstance(backend, str) else backend
        )
        self.tracer: KnowledgeTracer | None = None
        self._load_model()

        self.orchestrator = TutorOrchestrator(
            self.store, self.kb, self.backend, tracer=self.tracer, catalog=self.catalog
        )
        self._replay()

    # -- startup -----------------------------------------------------------

    def _load_model(self) -> None:
        manifest = self.data_dir / MANIFEST_NAME
        if manifest.exists():
            self.tracer = KnowledgeTracer.from_dir(self.data_dir)
            self.store.set_centroids(self.tracer.latent.centroids)
            logger.info("loaded model checkpoint from %s", self.data_dir)
        else:
            self.tracer = None

    def _replay(self) -> None:
        for record in self.events.records():
            payload = record.payload
            if record.kind == "interaction":
                interaction = Interaction(
                    student_id=payload["student_id"],
                    question_id=payload["question_id"],
                    skill_id=payload["skill_id"],
                    correct=bool(payload["correct"]),
                    timestamp=payload["timestamp"],
                )
                self.store.record(interaction, strict_order=True)
                self.question_skills[interaction.question_id] = interaction.skill_id
            elif record.kind == "ask":
                self.store.ensure_student(payload["student_id"])
        logger.info("replayed %d events", len(self.events))

    def _student_lock(self, student_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._student_locks[student_id]

    # -- operations -----------------------------------------------------------

    def record_interaction(
        self, student_id: str, question_id: str, skill_id: str, correct: bool, timestamp: int
    ) -> SkillMastery:
        interaction = Interaction(
            student_id=student_id,
            question_id=question_id,
            skill_id=skill_id,
            correct=correct,
            timestamp=timestamp,
        )
        with self._student_lock(student_id):
            if timestamp <= self.store.last_timestamp(student_id):
                raise OutOfOrderError(
                    f"timestamp {timestamp} is not newer than the student's latest"
                )
            self.events.append(
                "interaction",
                {
                    "student_id": student_id,
                    "question_id": question_id,
                    "skill_id": skill_id,
                    "correct": correct,
                    "timestamp": timestamp,
                },
            )
            result = self.store.record(interaction, strict_order=True)
        self.question_skills[question_id] = skill_id
        return result

    def ask(
        self, student_id: str, question: str, candidate_question_id: str | None = None
    ) -> AskResult:
        candidate = None
        if candidate_question_id:
            skill = self.question_skills.get(candidate_question_id, UNKNOWN_SKILL)
            candidate = (candidate_question_id, skill)
        self.events.append("ask", {"student_id": student_id, "question": question})
        self.store.ensure_student(student_id)
        return self.orchestrator.ask(student_id, question, candidate_question=candidate)

    def ingest_url(self, url: str):
        result = self.kb.ingest_url(url)
        self.events.append(
            "ingest", {"source": url, "doc_id": result.doc_id, "chunks": result.n_chunks}
        )
        return result

    def ingest_text(self, title: str, text: str):
        result = self.kb.ingest_text(title, text)
        self.events.append(
            "ingest", {"source": "manual", "doc_id": result.doc_id, "chunks": result.n_chunks}
        )
        return result

    def student_state(self, student_id: str) -> LearnerStateSummary:
        if not self.store.knows(student_id):
            raise UnknownStudentError(student_id)
        return self.orchestrator.summarize(student_id)

    def recommendations(self, student_id: str, k: int = 3) -> RecommendResult:
        if not self.store.knows(student_id):
            raise UnknownStudentError(student_id)
        result = self.orchestrator.recommend(student_id, rec_k=k)
        self.events.append("recommend", {"student_id": student_id, "k": k})
        return result

    def health(self) -> dict:
        return {
            "status": "ok",
            "kb_docs": self.kb.doc_count,
            "model_loaded": self.tracer is not None,
        }

    def reload_model(self) -> dict:
        self._load_model()
        self.orchestrator.set_tracer(self.tracer)
        return {"model_loaded": self.tracer is not None}
