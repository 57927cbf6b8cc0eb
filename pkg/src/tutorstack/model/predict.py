"""Inference: predict the next response and append it to the history."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch

from tutorstack.interactions import Interaction
from tutorstack.model.checkpoint import LoadedCheckpoint, load_checkpoint
from tutorstack.model.encoding import LatentAnnotator, encode_history
from tutorstack.model.network import MlfbkNet


@dataclass
class PredictNext:
    p_correct: float
    appended: list[Interaction]


class KnowledgeTracer:
    """Model weights plus the latent annotation tables they were trained with.

    The underlying weights are immutable; concurrent predictions are safe.
    """

    def __init__(self, net: MlfbkNet, config, vocab, latent, train_students=()):
        torch.set_num_threads(1)
        self.net = net
        self.net.eval()
        self.config = config
        self.vocab = vocab
        self.latent = latent
        self.train_students = frozenset(train_students)
        self.annotator = LatentAnnotator(
            latent.bkt_params, latent.centroids, latent.difficulty_levels
        )

    @classmethod
    def from_loaded(cls, loaded: LoadedCheckpoint) -> "KnowledgeTracer":
        return cls(loaded.net, loaded.config, loaded.vocab, loaded.latent, loaded.train_students)

    @classmethod
    def from_dir(cls, path: str | Path) -> "KnowledgeTracer":
        return cls.from_loaded(load_checkpoint(path))

    def predict_next(
        self, history: Sequence[Interaction], question_id: str, skill_id: str
    ) -> PredictNext:
        """P(correct) for the masked query step appended after the history."""
        history = list(history)
        encoded = encode_history(
            history, self.annotator, self.config, self.vocab, query=(question_id, skill_id)
        )
        tokens = {
            "question": torch.from_numpy(encoded.question).unsqueeze(0),
            "skill": torch.from_numpy(encoded.skill).unsqueeze(0),
            "response": torch.from_numpy(encoded.response).unsqueeze(0),
            "mastery": torch.from_numpy(encoded.mastery).unsqueeze(0),
            "cluster": torch.from_numpy(encoded.cluster).unsqueeze(0),
            "difficulty": torch.from_numpy(encoded.difficulty).unsqueeze(0),
        }
        real = torch.from_numpy(encoded.real).unsqueeze(0)
        with torch.no_grad():
            p = float(torch.sigmoid(self.net(tokens, real))[0, -1])

        student_id = history[-1].student_id if history else "student"
        next_ts = history[-1].timestamp + 1 if history else 0
        predicted = Interaction(
            student_id=student_id,
            question_id=question_id,
            skill_id=skill_id,
            correct=p >= 0.5,
            timestamp=next_ts,
        )
        return PredictNext(p_correct=p, appended=history + [predicted])

    def baseline_score(self, question_id: str) -> float:
        """Per-question train success rate; global rate for unseen questions."""
        rate = self.latent.question_success_rates.get(question_id)
        return self.latent.global_success_rate if rate is None else rate


def predict_next(
    history: Sequence[Interaction],
    question_id: str,
    skill_id: str,
    checkpoint: KnowledgeTracer | LoadedCheckpoint,
) -> PredictNext:
    tracer = (
        checkpoint
        if isinstance(checkpoint, KnowledgeTracer)
        else KnowledgeTracer.from_loaded(checkpoint)
    )
    return tracer.predict_next(history, question_id, skill_id)
