"""Ability profiles: windowed success-rate features clustered with k-means.

A student's profile is a 4-vector of success rates over the last 10, last 50
and all interactions, plus an interaction count squashed to [0,1]. Profiles
are clustered globally; the cluster id becomes a categorical model feature.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator

from tutorstack.interactions import Interaction

logger = logging.getLogger(__name__)

ABILITY_WINDOWS = (10, 50)
COUNT_SCALE = 200
N_ABILITY_FEATURES = len(ABILITY_WINDOWS) + 2

KMEANS_MAX_ITER = 100
KMEANS_RESTARTS = 10


def ability_features(history: Sequence[Interaction]) -> list[float]:
    """[rate(last 10), rate(last 50), rate(all), min(1, n/200)].

    Windows shorter than their nominal size use whatever is available; an
    empty history yields the uninformed prior [0.5, 0.5, 0.5, 0.0].
    """
    n = len(history)
    if n == 0:
        return [0.5] * (N_ABILITY_FEATURES - 1) + [0.0]
    correct = [1.0 if it.correct else 0.0 for it in history]
    feats = [sum(correct[-w:]) / min(w, n) for w in ABILITY_WINDOWS]
    feats.append(sum(correct) / n)
    feats.append(min(1.0, n / COUNT_SCALE))
    return feats


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: first center uniform, then D^2-weighted."""
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            centers[j:] = points[rng.integers(n, size=k - j)]
            break
        probs = d2 / total
        centers[j] = points[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    return centers


def _assignments(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def _sse(points: np.ndarray, centers: np.ndarray, assign: np.ndarray) -> float:
    return float(((points - centers[assign]) ** 2).sum())


def _lloyd(points: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, float]:
    """Lloyd iterations until the assignment fixpoint or KMEANS_MAX_ITER."""
    assign = _assignments(points, centers)
    for _ in range(KMEANS_MAX_ITER):
        new_centers = centers.copy()
        for j in range(len(centers)):
            members = points[assign == j]
            if len(members):
                new_centers[j] = members.mean(axis=0)
            else:
                # re-seed an empty cluster at the point farthest from its center
                far = np.argmax(((points - new_centers[assign]) ** 2).sum(axis=1))
                new_centers[j] = points[far]
        new_assign = _assignments(points, new_centers)
        centers = new_centers
        if np.array_equal(new_assign, assign):
            assign = new_assign
            break
        assign = new_assign
    return centers, _sse(points, centers, assign)


def kmeans_fit(points: Sequence[Sequence[float]], k: int, seed: int) -> np.ndarray:
    """Deterministic k-means: k-means++ seeding + Lloyd, best of several restarts.

    Returns centroids sorted lexicographically. If there are fewer distinct
    points than k, k is reduced to the distinct count (logged). Restarts are
    derived from `seed`, so results are reproducible; keeping the best-SSE run
    is what lets tiny instances reach the global optimum.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("points must be a non-empty 2-D array")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(pts) < k:
        raise ValueError(f"need at least k={k} points, got {len(pts)}")
    distinct = np.unique(pts, axis=0)
    if len(distinct) < k:
        logger.warning("only %d distinct points; reducing k from %d", len(distinct), k)
        k = len(distinct)

    rng = np.random.default_rng(seed)
    best_centers: np.ndarray | None = None
    best_sse = np.inf
    for _ in range(KMEANS_RESTARTS):
        centers, sse = _lloyd(pts, _kmeans_pp_init(pts, k, rng))
        if sse < best_sse - 1e-15:
            best_sse, best_centers = sse, centers
    assert best_centers is not None
    order = np.lexsort(best_centers.T[::-1])
    return best_centers[order]


def assign_cluster(features: Sequence[float], centroids: np.ndarray) -> int:
    """Index of the nearest centroid (Euclidean); ties go to the lowest index."""
    feats = np.asarray(features, dtype=np.float64)
    cents = np.asarray(centroids, dtype=np.float64)
    if cents.ndim != 2 or len(cents) == 0:
        raise ValueError("centroids must be a non-empty 2-D array")
    if feats.shape != (cents.shape[1],):
        raise ValueError(
            f"feature dimension {feats.shape} does not match centroids {cents.shape}"
        )
    return int(np.argmin(((cents - feats) ** 2).sum(axis=1)))


class AbilityProfiler(BaseEstimator):
    """K-means clustering of ability feature vectors, sklearn-style.

    fit(X) learns centroids; predict(X) assigns cluster ids.
    """

    def __init__(self, k: int = 5, seed: int = 0):
        self.k = k
        self.seed = seed

    def fit(self, X, y=None):
        self.centroids_ = kmeans_fit(X, self.k, self.seed)
        return self

    def predict(self, X):
        if not hasattr(self, "centroids_"):
            raise RuntimeError("AbilityProfiler is not fitted")
        return np.array([assign_cluster(x, self.centroids_) for x in np.asarray(X)])

    def fit_predict(self, X, y=None):
        return self.fit(X).predict(X)
