"""Ranking and calibration metrics."""

from __future__ import annotations

import math
from typing import Sequence


class UndefinedMetricError(ValueError):
    """The metric needs both classes present."""


def auc(scores: Sequence[float], labels: Sequence[bool]) -> float:
    """ROC AUC via the Mann-Whitney statistic; tied scores count 0.5.

    Uses average ranks, so it runs in O(n log n) rather than comparing
    every positive-negative pair.
    """
    if len(scores) != len(labels):
        raise ValueError("scores and labels must have equal length")
    n_pos = sum(1 for lab in labels if lab)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs at least one positive and one negative label")

    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ranks = [0.0] * len(scores)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        avg_rank = (i + j) / 2.0 + 1.0  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg_rank
        i = j + 1

    rank_sum_pos = sum(r for r, lab in zip(ranks, labels) if lab)
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def log_loss(probs: Sequence[float], labels: Sequence[bool], eps: float = 1e-12) -> float:
    """Mean binary cross-entropy with probability clipping."""
    if len(probs) != len(labels):
        raise ValueError("probs and labels must have equal length")
    if not probs:
        raise ValueError("log_loss of an empty sample is undefined")
    total = 0.0
    for p, lab in zip(probs, labels):
        p = min(1.0 - eps, max(eps, p))
        total += -math.log(p) if lab else -math.log(1.0 - p)
    return total / len(probs)


def accuracy(probs: Sequence[float], labels: Sequence[bool], threshold: float = 0.5) -> float:
    if not probs:
        raise ValueError("accuracy of an empty sample is undefined")
    hits = sum(1 for p, lab in zip(probs, labels) if (p >= threshold) == bool(lab))
    return hits / len(probs)
