"""From interaction histories to model-ready token sequences.

Each position of a student's history is annotated with the three latent
relations (BKT mastery before the step, ability cluster at the most recent
refresh, question difficulty level), then mapped to per-channel token ids.
Sequences longer than the model window keep the most recent positions;
shorter ones are left-padded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from tutorstack.features.ability import ability_features, assign_cluster
from tutorstack.features.bkt import BktParams, bkt_update
from tutorstack.features.store import REFRESH_EVERY
from tutorstack.interactions import Interaction
from tutorstack.model.config import ModelConfig

DEFAULT_DIFFICULTY = 5


@dataclass(frozen=True)
class Vocab:
    questions: tuple[str, ...]
    skills: tuple[str, ...]

    @classmethod
    def from_interactions(cls, interactions: Sequence[Interaction]) -> "Vocab":
        return cls(
            questions=tuple(sorted({it.question_id for it in interactions})),
            skills=tuple(sorted({it.skill_id for it in interactions})),
        )

    def __post_init__(self):
        object.__setattr__(self, "_q_index", {q: i for i, q in enumerate(self.questions)})
        object.__setattr__(self, "_s_index", {s: i for i, s in enumerate(self.skills)})

    def question_token(self, question_id: str, config: ModelConfig) -> int:
        return self._q_index.get(question_id, config.question_unk)

    def skill_token(self, skill_id: str, config: ModelConfig) -> int:
        return self._s_index.get(skill_id, config.skill_unk)


@dataclass(frozen=True)
class StepFeatures:
    question_id: str
    skill_id: str
    response: bool | None  # None marks a masked/query response
    mastery: float
    cluster_id: int
    difficulty: int


@dataclass
class EncodedSequence:
    question: np.ndarray
    skill: np.ndarray
    response: np.ndarray
    mastery: np.ndarray
    cluster: np.ndarray
    difficulty: np.ndarray
    real: np.ndarray  # bool; False marks PAD positions

    def __len__(self) -> int:
        return len(self.question)


def mastery_bucket(mastery: float, buckets: int = 10) -> int:
    """floor(buckets * mastery), clamped into [0, buckets)."""
    return min(buckets - 1, max(0, math.floor(buckets * mastery)))


class LatentAnnotator:
    """Rolls BKT mastery, ability cluster, and difficulty along one history.

    The cluster id follows the refresh cadence: assigned from the empty
    history up front, then recomputed after every REFRESH_EVERY-th
    interaction. Difficulty comes from a frozen per-question table.
    """

    def __init__(
        self,
        params: BktParams,
        centroids: np.ndarray | None,
        difficulty_levels: Mapping[str, int],
        refresh_every: int = REFRESH_EVERY,
    ):
        self.params = params
        self.centroids = centroids
        self.difficulty_levels = difficulty_levels
        self.refresh_every = refresh_every

    def _cluster(self, history: Sequence[Interaction]) -> int:
        if self.centroids is None:
            return 0
        return assign_cluster(ability_features(history), self.centroids)

    def difficulty_of(self, question_id: str) -> int:
        return self.difficulty_levels.get(question_id, DEFAULT_DIFFICULTY)

    def annotate(self, history: Sequence[Interaction]) -> list[StepFeatures]:
        steps: list[StepFeatures] = []
        mastery: dict[str, float] = {}
        cluster = self._cluster([])
        for t, it in enumerate(history):
            prior = mastery.get(it.skill_id, self.params.p_init)
            steps.append(
                StepFeatures(
                    question_id=it.question_id,
                    skill_id=it.skill_id,
                    response=it.correct,
                    mastery=prior,
                    cluster_id=cluster,
                    difficulty=self.difficulty_of(it.question_id),
                )
            )
            mastery[it.skill_id] = bkt_update(prior, it.correct, self.params)
            if (t + 1) % self.refresh_every == 0:
                cluster = self._cluster(history[: t + 1])
        return steps

    def query_step(
        self, history: Sequence[Interaction], question_id: str, skill_id: str
    ) -> StepFeatures:
        """The appended to-be-predicted step: response unknown (MASK)."""
        mastery = self.params.p_init
        for it in history:
            if it.skill_id == skill_id:
                mastery = bkt_update(mastery, it.correct, self.params)
        return StepFeatures(
            question_id=question_id,
            skill_id=skill_id,
            response=None,
            mastery=mastery,
            cluster_id=self._cluster(list(history)),
            difficulty=self.difficulty_of(question_id),
        )


def encode_steps(
    steps: Sequence[StepFeatures], config: ModelConfig, vocab: Vocab
) -> EncodedSequence:
    """Tokenize annotated steps: keep the most recent window, left-pad the rest."""
    steps = list(steps)[-config.max_seq_len :]
    n_pad = config.max_seq_len - len(steps) if len(steps) < config.max_seq_len else 0
    length = n_pad + len(steps)

    question = np.full(length, config.question_pad, dtype=np.int64)
    skill = np.full(length, config.skill_pad, dtype=np.int64)
    response = np.full(length, config.RESPONSE_PAD, dtype=np.int64)
    mastery = np.full(length, config.mastery_pad, dtype=np.int64)
    cluster = np.full(length, config.cluster_pad, dtype=np.int64)
    difficulty = np.full(length, config.difficulty_pad, dtype=np.int64)
    real = np.zeros(length, dtype=bool)

    for i, step in enumerate(steps):
        j = n_pad + i
        question[j] = vocab.question_token(step.question_id, config)
        skill[j] = vocab.skill_token(step.skill_id, config)
        if step.response is None:
            response[j] = config.RESPONSE_MASK
        else:
            response[j] = config.RESPONSE_CORRECT if step.response else config.RESPONSE_INCORRECT
        mastery[j] = mastery_bucket(step.mastery, config.mastery_buckets)
        cluster[j] = min(step.cluster_id, config.k_clusters - 1)
        difficulty[j] = min(config.difficulty_levels, max(1, step.difficulty)) - 1
        real[j] = True

    return EncodedSequence(question, skill, response, mastery, cluster, difficulty, real)


def encode_history(
    history: Sequence[Interaction],
    annotator: LatentAnnotator,
    config: ModelConfig,
    vocab: Vocab,
    query: tuple[str, str] | None = None,
) -> EncodedSequence:
    """Annotate and tokenize a history, optionally appending a query step.

    An empty history with a query yields the single-position query sequence.
    """
    steps = annotator.annotate(history)
    if query is not None:
        steps.append(annotator.query_step(history, query[0], query[1]))
    return encode_steps(steps, config, vocab)
