"""Live per-student feature state: BKT masteries, ability cluster, difficulty.

The store is the mutable heart of the tracing pipeline: interactions stream
in, masteries update incrementally, ability profiles refresh every
REFRESH_EVERY interactions, and difficulty counts accumulate globally.
Reads are concurrent; writes are serialized per student key.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from tutorstack.features.ability import ability_features, assign_cluster
from tutorstack.features.bkt import DEFAULT_BKT_PARAMS, BktParams, bkt_update
from tutorstack.features.difficulty import DifficultyTracker
from tutorstack.interactions import Interaction

REFRESH_EVERY = 20


@dataclass
class SkillMastery:
    student_id: str
    skill_id: str
    mastery: float
    observations: int


@dataclass
class _StudentState:
    mastery: dict[str, float] = field(default_factory=dict)
    observations: dict[str, int] = field(default_factory=dict)
    history: list[Interaction] = field(default_factory=list)
    cluster_id: int = 0
    last_timestamp: int = -1
    lock: threading.Lock = field(default_factory=threading.Lock)


class OutOfOrderError(ValueError):
    """Raised when an interaction's timestamp is not newer than the last one."""


class FeatureStore:
    def __init__(self, params: BktParams = DEFAULT_BKT_PARAMS):
        self.params = params
        self.difficulty = DifficultyTracker()
        self._students: dict[str, _StudentState] = {}
        self._centroids: np.ndarray | None = None
        self._lock = threading.Lock()

    # -- centroids ---------------------------------------------------------

    def set_centroids(self, centroids: np.ndarray | None) -> None:
        with self._lock:
            self._centroids = None if centroids is None else np.asarray(centroids)
            for state in self._students.values():
                with state.lock:
                    self._refresh_cluster(state)

    @property
    def centroids(self) -> np.ndarray | None:
        return self._centroids

    # -- writes ------------------------------------------------------------

    def _state(self, student_id: str) -> _StudentState:
        with self._lock:
            state = self._students.get(student_id)
            if state is None:
                state = self._students[student_id] = _StudentState()
            return state

    def _peek(self, student_id: str) -> _StudentState | None:
        with self._lock:
            return self._students.get(student_id)

    def ensure_student(self, student_id: str) -> None:
        """Create an empty record for the student (auto-registration)."""
        self._state(student_id)

    def _refresh_cluster(self, state: _StudentState) -> None:
        if self._centroids is not None:
            state.cluster_id = assign_cluster(ability_features(state.history), self._centroids)

    def record(self, interaction: Interaction, strict_order: bool = True) -> SkillMastery:
        """Apply one interaction; returns the updated mastery for its skill.

        With strict_order, a timestamp <= the student's latest is rejected.
        """
        state = self._state(interaction.student_id)
        with state.lock:
            if strict_order and interaction.timestamp <= state.last_timestamp:
                raise OutOfOrderError(
                    f"timestamp {interaction.timestamp} is not newer than "
                    f"{state.last_timestamp} for student {interaction.student_id}"
                )
            prior = state.mastery.get(interaction.skill_id, self.params.p_init)
            updated = bkt_update(prior, interaction.correct, self.params)
            state.mastery[interaction.skill_id] = updated
            state.observations[interaction.skill_id] = (
                state.observations.get(interaction.skill_id, 0) + 1
            )
            state.history.append(interaction)
            state.last_timestamp = max(state.last_timestamp, interaction.timestamp)
            if len(state.history) % REFRESH_EVERY == 0:
                self._refresh_cluster(state)
            self.difficulty.update(interaction.question_id, interaction.correct)
            return SkillMastery(
                student_id=interaction.student_id,
                skill_id=interaction.skill_id,
                mastery=updated,
                observations=state.observations[interaction.skill_id],
            )

    def record_all(self, interactions: Iterable[Interaction], strict_order: bool = False) -> None:
        for it in interactions:
            self.record(it, strict_order=strict_order)

    def end_session(self, student_id: str) -> None:
        """Force an ability-profile refresh (the session-end recompute)."""
        state = self._peek(student_id)
        if state is None:
            return
        with state.lock:
            self._refresh_cluster(state)

    # -- reads -------------------------------------------------------------

    def knows(self, student_id: str) -> bool:
        with self._lock:
            return student_id in self._students

    def student_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._students)

    def masteries(self, student_id: str) -> dict[str, SkillMastery]:
        state = self._peek(student_id)
        if state is None:
            return {}
        with state.lock:
            return {
                skill: SkillMastery(student_id, skill, m, state.observations[skill])
                for skill, m in state.mastery.items()
            }

    def history(self, student_id: str) -> list[Interaction]:
        state = self._peek(student_id)
        if state is None:
            return []
        with state.lock:
            return list(state.history)

    def cluster_id(self, student_id: str) -> int:
        state = self._peek(student_id)
        if state is None:
            return 0
        with state.lock:
            return state.cluster_id

    def interaction_count(self, student_id: str) -> int:
        state = self._peek(student_id)
        if state is None:
            return 0
        with state.lock:
            return len(state.history)

    def last_timestamp(self, student_id: str) -> int:
        state = self._peek(student_id)
        if state is None:
            return -1
        with state.lock:
            return state.last_timestamp
