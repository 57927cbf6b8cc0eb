"""Masked-response training of the sequence model.

Students are split 90/10 into train/validation; latent tables (difficulty,
success rates, ability centroids) are fitted on the training split only.
Each epoch masks a fresh 15% of real response positions and minimizes
binary cross-entropy on them; the checkpoint with the best validation AUC
wins. Runs single-threaded so a fixed seed reproduces results bit-for-bit.
"""

from __future__ import annotations

import copy
import logging
import time
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
import torch

from tutorstack.features.ability import ability_features, kmeans_fit
from tutorstack.features.bkt import DEFAULT_BKT_PARAMS, BktParams
from tutorstack.features.difficulty import DifficultyTracker
from tutorstack.features.store import REFRESH_EVERY
from tutorstack.interactions import Interaction, group_by_student
from tutorstack.model.checkpoint import LatentTables
from tutorstack.model.config import ModelConfig
from tutorstack.model.encoding import (
    EncodedSequence,
    LatentAnnotator,
    StepFeatures,
    Vocab,
    encode_steps,
)
from tutorstack.model.network import MlfbkNet
from tutorstack.sim.metrics import auc

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainHyper:
    lr: float = 1e-3
    betas: tuple[float, float] = (0.9, 0.999)
    batch_size: int = 64
    epochs: int = 30
    mask_ratio: float = 0.15
    seed: int = 0
    val_fraction: float = 0.1
    clip_norm: float = 5.0


@dataclass
class EpochStats:
    train_loss: float
    val_loss: float
    val_auc: float


@dataclass
class TrainReport:
    epochs: list[EpochStats]
    seed: int
    wall_seconds: float
    best_epoch: int

    def comparable(self) -> dict:
        """Everything that must be bit-identical across runs of one seed."""
        out = asdict(self)
        out.pop("wall_seconds")
        return out


@dataclass
class TrainResult:
    net: MlfbkNet
    config: ModelConfig
    vocab: Vocab
    latent: LatentTables
    train_students: list[str]
    val_students: list[str]
    report: TrainReport


def split_students(student_ids: Sequence[str], val_fraction: float, seed: int) -> tuple[list[str], list[str]]:
    ids = sorted(student_ids)
    if len(ids) < 2:
        raise ValueError(f"need at least 2 students to train, got {len(ids)}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(ids))
    n_val = max(1, round(val_fraction * len(ids)))
    n_val = min(n_val, len(ids) - 1)
    val = sorted(ids[i] for i in perm[:n_val])
    train = sorted(ids[i] for i in perm[n_val:])
    return train, val


def build_latent_tables(
    train_interactions: Sequence[Interaction],
    k_clusters: int,
    params: BktParams,
    seed: int,
) -> LatentTables:
    tracker = DifficultyTracker()
    for it in train_interactions:
        tracker.update(it.question_id, it.correct)
    levels = {q: tracker.level(q) for q in tracker.question_ids()}
    rates = {q: tracker.success_rate(q) for q in tracker.question_ids()}
    total_correct = sum(1 for it in train_interactions if it.correct)
    global_rate = total_correct / len(train_interactions) if train_interactions else 0.5

    points = []
    for log in group_by_student(train_interactions).values():
        for end in range(REFRESH_EVERY, len(log) + 1, REFRESH_EVERY):
            points.append(ability_features(log[:end]))
        points.append(ability_features(log))
    k = min(k_clusters, len(points)) if points else 1
    centroids = (
        kmeans_fit(points, k, seed=seed)
        if points
        else np.array([[0.5, 0.5, 0.5, 0.0]])
    )
    return LatentTables(
        bkt_params=params,
        difficulty_levels=levels,
        question_success_rates=rates,
        global_success_rate=global_rate,
        centroids=centroids,
    )


def _windows(steps: list[StepFeatures], max_len: int, stride: int) -> list[list[StepFeatures]]:
    if len(steps) <= max_len:
        return [steps] if steps else []
    out = []
    start = 0
    while True:
        end = min(start + max_len, len(steps))
        out.append(steps[start:end])
        if end == len(steps):
            return out
        start += stride


def _stack(sequences: list[EncodedSequence]) -> dict[str, torch.Tensor]:
    def cat(attr):
        return torch.from_numpy(np.stack([getattr(s, attr) for s in sequences]))

    return {
        "question": cat("question"),
        "skill": cat("skill"),
        "response": cat("response"),
        "mastery": cat("mastery"),
        "cluster": cat("cluster"),
        "difficulty": cat("difficulty"),
        "real": cat("real"),
    }


def encode_split(
    logs: dict[str, list[Interaction]],
    students: Sequence[str],
    annotator: LatentAnnotator,
    config: ModelConfig,
    vocab: Vocab,
    stride: int,
) -> dict[str, torch.Tensor]:
    sequences = []
    for student in students:
        steps = annotator.annotate(logs[student])
        for window in _windows(steps, config.max_seq_len, stride):
            sequences.append(encode_steps(window, config, vocab))
    if not sequences:
        raise ValueError("no non-empty training sequences")
    return _stack(sequences)


def _masked_batch(
    data: dict[str, torch.Tensor],
    idx: torch.Tensor,
    mask: torch.Tensor,
    config: ModelConfig,
) -> tuple[dict[str, torch.Tensor], torch.Tensor, torch.Tensor, torch.Tensor]:
    tokens = {name: data[name][idx] for name in MlfbkNet.CHANNELS}
    real = data["real"][idx]
    labels = (tokens["response"] == config.RESPONSE_CORRECT).float()
    response_in = tokens["response"].masked_fill(mask, config.RESPONSE_MASK)
    tokens = dict(tokens, response=response_in)
    return tokens, real, labels, mask


def _sample_mask(
    real: torch.Tensor, mask_ratio: float, generator: torch.Generator
) -> torch.Tensor:
    mask = (torch.rand(real.shape, generator=generator) < mask_ratio) & real
    empty_rows = (~mask.any(dim=1)) & real.any(dim=1)
    if empty_rows.any():
        # left-padded sequences always end in a real position
        mask[empty_rows, -1] = True
    return mask


def train_model(
    interactions: Sequence[Interaction],
    config_overrides: dict | None = None,
    hyper: TrainHyper = TrainHyper(),
    params: BktParams = DEFAULT_BKT_PARAMS,
) -> TrainResult:
    start = time.perf_counter()
    torch.set_num_threads(1)
    logs = group_by_student(interactions)
    train_students, val_students = split_students(list(logs), hyper.val_fraction, hyper.seed)

    train_interactions = [it for s in train_students for it in logs[s]]
    vocab = Vocab.from_interactions(train_interactions)
    overrides = dict(config_overrides or {})
    overrides.setdefault("num_questions", max(1, len(vocab.questions)))
    overrides.setdefault("num_skills", max(1, len(vocab.skills)))
    config = ModelConfig(**overrides)

    latent = build_latent_tables(train_interactions, config.k_clusters, params, hyper.seed)
    annotator = LatentAnnotator(params, latent.centroids, latent.difficulty_levels)

    train_data = encode_split(
        logs, train_students, annotator, config, vocab, stride=max(1, config.max_seq_len // 2)
    )
    val_data = encode_split(
        logs, val_students, annotator, config, vocab, stride=config.max_seq_len
    )

    torch.manual_seed(hyper.seed)
    net = MlfbkNet(config)
    opt = torch.optim.Adam(net.parameters(), lr=hyper.lr, betas=hyper.betas)
    loss_fn = torch.nn.BCEWithLogitsLoss()

    g_mask = torch.Generator().manual_seed(hyper.seed + 1)
    g_shuffle = torch.Generator().manual_seed(hyper.seed + 2)
    g_val = torch.Generator().manual_seed(hyper.seed + 3)
    val_mask = _sample_mask(val_data["real"], hyper.mask_ratio, g_val)

    n_train = train_data["real"].shape[0]
    stats: list[EpochStats] = []
    best_auc = -1.0
    best_epoch = -1
    best_state: dict | None = None

    for epoch in range(hyper.epochs):
        net.train()
        perm = torch.randperm(n_train, generator=g_shuffle)
        total_loss = 0.0
        total_masked = 0
        for lo in range(0, n_train, hyper.batch_size):
            idx = perm[lo : lo + hyper.batch_size]
            mask = _sample_mask(train_data["real"][idx], hyper.mask_ratio, g_mask)
            tokens, real, labels, mask = _masked_batch(train_data, idx, mask, config)
            logits = net(tokens, real)
            loss = loss_fn(logits[mask], labels[mask])
            opt.zero_grad()
            loss.backward()
            torch.nn.utils.clip_grad_norm_(net.parameters(), hyper.clip_norm)
            opt.step()
            n_masked = int(mask.sum())
            total_loss += float(loss.detach()) * n_masked
            total_masked += n_masked
        train_loss = total_loss / max(1, total_masked)

        net.eval()
        with torch.no_grad():
            all_idx = torch.arange(val_data["real"].shape[0])
            tokens, real, labels, mask = _masked_batch(val_data, all_idx, val_mask, config)
            logits = net(tokens, real)
            val_loss = float(loss_fn(logits[mask], labels[mask]))
            probs = torch.sigmoid(logits[mask]).numpy()
            val_labels = labels[mask].numpy() > 0.5
        try:
            val_auc = auc(probs.tolist(), val_labels.tolist())
        except ValueError:
            val_auc = 0.5
        stats.append(EpochStats(train_loss=train_loss, val_loss=val_loss, val_auc=val_auc))
        logger.info(
            "epoch %d: train_loss=%.4f val_loss=%.4f val_auc=%.4f",
            epoch, train_loss, val_loss, val_auc,
        )
        if val_auc > best_auc:
            best_auc = val_auc
            best_epoch = epoch
            best_state = copy.deepcopy(net.state_dict())

    if best_state is not None:
        net.load_state_dict(best_state)
    net.eval()

    report = TrainReport(
        epochs=stats,
        seed=hyper.seed,
        wall_seconds=time.perf_counter() - start,
        best_epoch=best_epoch,
    )
    return TrainResult(
        net=net,
        config=config,
        vocab=vocab,
        latent=latent,
        train_students=train_students,
        val_students=val_students,
        report=report,
    )
