"""sklearn-style front door for the knowledge tracer.

fit() trains on a list of interactions; predict_proba() scores the next
step for one student history. Hyperparameters live in the constructor so
get_params/set_params compose with the wider sklearn ecosystem.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from sklearn.base import BaseEstimator

from tutorstack.features.bkt import DEFAULT_BKT_PARAMS
from tutorstack.interactions import Interaction
from tutorstack.model.checkpoint import save_checkpoint
from tutorstack.model.predict import KnowledgeTracer
from tutorstack.model.train import TrainHyper, train_model


def check_interactions(X) -> list[Interaction]:
    """Validate an interaction sequence argument."""
    items = list(X)
    if not items:
        raise ValueError("expected a non-empty sequence of Interaction records")
    for it in items:
        if not isinstance(it, Interaction):
            raise TypeError(f"expected Interaction, got {type(it).__name__}")
    return items


class MlfbkKnowledgeTracer(BaseEstimator):
    def __init__(
        self,
        embed_dim: int = 64,
        num_layers: int = 2,
        num_heads: int = 4,
        ffn_dim: int = 256,
        max_seq_len: int = 128,
        conv_kernel: int = 7,
        dropout: float = 0.1,
        k_clusters: int = 5,
        lr: float = 1e-3,
        batch_size: int = 64,
        epochs: int = 30,
        mask_ratio: float = 0.15,
        val_fraction: float = 0.1,
        seed: int = 0,
    ):
        self.embed_dim = embed_dim
        self.num_layers = num_layers
        self.num_heads = num_heads
        self.ffn_dim = ffn_dim
        self.max_seq_len = max_seq_len
        self.conv_kernel = conv_kernel
        self.dropout = dropout
        self.k_clusters = k_clusters
        self.lr = lr
        self.batch_size = batch_size
        self.epochs = epochs
        self.mask_ratio = mask_ratio
        self.val_fraction = val_fraction
        self.seed = seed

    def fit(self, X: Sequence[Interaction], y=None):
        interactions = check_interactions(X)
        result = train_model(
            interactions,
            config_overrides=dict(
                embed_dim=self.embed_dim,
                num_layers=self.num_layers,
                num_heads=self.num_heads,
                ffn_dim=self.ffn_dim,
                max_seq_len=self.max_seq_len,
                conv_kernel=self.conv_kernel,
                dropout=self.dropout,
                k_clusters=self.k_clusters,
            ),
            hyper=TrainHyper(
                lr=self.lr,
                batch_size=self.batch_size,
                epochs=self.epochs,
                mask_ratio=self.mask_ratio,
                val_fraction=self.val_fraction,
                seed=self.seed,
            ),
            params=DEFAULT_BKT_PARAMS,
        )
        self.result_ = result
        self.report_ = result.report
        self.tracer_ = KnowledgeTracer(
            result.net, result.config, result.vocab, result.latent, result.train_students
        )
        return self

    def predict_proba(
        self, history: Sequence[Interaction], question_id: str, skill_id: str
    ) -> float:
        self._check_fitted()
        return self.tracer_.predict_next(history, question_id, skill_id).p_correct

    def predict(self, history: Sequence[Interaction], question_id: str, skill_id: str) -> bool:
        return self.predict_proba(history, question_id, skill_id) >= 0.5

    def save(self, out_dir: str | Path) -> Path:
        self._check_fitted()
        result = self.result_
        return save_checkpoint(
            out_dir, result.net, result.config, result.vocab, result.latent,
            result.train_students,
        )

    @classmethod
    def load(cls, path: str | Path) -> KnowledgeTracer:
        return KnowledgeTracer.from_dir(path)

    def _check_fitted(self):
        if not hasattr(self, "tracer_"):
            raise RuntimeError("MlfbkKnowledgeTracer is not fitted; call fit() first")
