import itertools

import numpy as np
import pytest

from tutorstack.features.ability import (
    AbilityProfiler,
    ability_features,
    assign_cluster,
    kmeans_fit,
)

from .conftest import interactions_from_bools


class TestAbilityFeatures:
    def test_empty_history_uninformed_prior(self):
        assert ability_features([]) == [0.5, 0.5, 0.5, 0.0]

    def test_five_interactions_three_correct(self):
        hist = interactions_from_bools([1, 1, 0, 1, 0])
        assert ability_features(hist) == pytest.approx([0.6, 0.6, 0.6, 0.025])

    def test_windowed_counts(self):
        # 60 interactions: last 10 all correct, 30 correct overall
        corrects = [True] * 20 + [False] * 30 + [True] * 10
        hist = interactions_from_bools(corrects)
        feats = ability_features(hist)
        assert feats[0] == pytest.approx(1.0)
        assert feats[1] == pytest.approx(sum(corrects[-50:]) / 50)
        assert feats[2] == pytest.approx(0.5)
        assert feats[3] == pytest.approx(0.3)

    def test_all_in_unit_interval(self):
        hist = interactions_from_bools([True, False] * 150)
        assert all(0.0 <= f <= 1.0 for f in ability_features(hist))


def brute_force_sse(points, k):
    """Minimum within-cluster SSE over every assignment of points to k clusters."""
    pts = np.asarray(points, dtype=float)
    best = np.inf
    for assign in itertools.product(range(k), repeat=len(pts)):
        sse = 0.0
        for j in range(k):
            members = pts[[i for i, a in enumerate(assign) if a == j]]
            if len(members):
                sse += ((members - members.mean(axis=0)) ** 2).sum()
        best = min(best, sse)
    return best


class TestKmeans:
    def test_identical_points_single_cluster(self):
        pts = [[0.3, 0.7]] * 5
        cents = kmeans_fit(pts, 1, seed=0)
        assert cents.shape == (1, 2)
        assert cents[0] == pytest.approx([0.3, 0.7])

    def test_two_clusters_1d(self):
        pts = [[0.0], [0.1], [0.9], [1.0]]
        cents = kmeans_fit(pts, 2, seed=0)
        assert sorted(c[0] for c in cents) == pytest.approx([0.05, 0.95])

    def test_k_equals_n_zero_sse(self):
        pts = [[0.0, 0.0], [0.5, 0.1], [1.0, 0.9]]
        cents = kmeans_fit(pts, 3, seed=1)
        assert sorted(map(tuple, cents)) == sorted(map(tuple, pts))

    def test_reduces_k_for_few_distinct_points(self):
        pts = [[0.0], [0.0], [1.0], [1.0]]
        cents = kmeans_fit(pts, 3, seed=0)
        assert len(cents) == 2

    def test_deterministic_for_seed(self):
        rng = np.random.default_rng(5)
        pts = rng.random((40, 4))
        a = kmeans_fit(pts, 5, seed=11)
        b = kmeans_fit(pts, 5, seed=11)
        assert np.array_equal(a, b)

    def test_centroids_sorted_lexicographically(self):
        rng = np.random.default_rng(9)
        pts = rng.random((30, 3))
        cents = kmeans_fit(pts, 4, seed=2)
        as_tuples = [tuple(c) for c in cents]
        assert as_tuples == sorted(as_tuples)

    def test_matches_brute_force_optimum_on_small_instances(self):
        rng = np.random.default_rng(42)
        for trial in range(40):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(1, min(3, n) + 1))
            dim = int(rng.integers(1, 3))
            pts = rng.random((n, dim)).round(3)
            cents = kmeans_fit(pts, k, seed=trial)
            assign = np.array([assign_cluster(p, cents) for p in pts])
            sse = float(((pts - cents[assign]) ** 2).sum())
            k_eff = len(cents)
            assert sse == pytest.approx(brute_force_sse(pts, k_eff), abs=1e-9), (
                f"trial {trial}: SSE {sse} vs brute force"
            )

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            kmeans_fit([], 1, seed=0)
        with pytest.raises(ValueError):
            kmeans_fit([[0.1]], 0, seed=0)
        with pytest.raises(ValueError):
            kmeans_fit([[0.1]], 2, seed=0)


class TestAssignCluster:
    def test_exact_match(self):
        cents = np.array([[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]])
        assert assign_cluster([0.5, 0.5], cents) == 1

    def test_tie_goes_to_lowest_index(self):
        cents = np.array([[0.0], [1.0]])
        assert assign_cluster([0.5], cents) == 0

    def test_nearest(self):
        cents = np.array([[0.05], [0.95]])
        assert assign_cluster([0.9], cents) == 1

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            assign_cluster([0.5, 0.5], np.array([[0.1], [0.9]]))


class TestAbilityProfiler:
    def test_fit_predict_roundtrip(self):
        rng = np.random.default_rng(3)
        X = np.concatenate([rng.normal(0.2, 0.02, (20, 4)), rng.normal(0.8, 0.02, (20, 4))])
        prof = AbilityProfiler(k=2, seed=0).fit(X)
        labels = prof.predict(X)
        assert set(labels) == {0, 1}
        assert len(set(labels[:20])) == 1
        assert len(set(labels[20:])) == 1

    def test_get_params(self):
        assert AbilityProfiler(k=7, seed=3).get_params() == {"k": 7, "seed": 3}

    def test_predict_before_fit_raises(self):
        with pytest.raises(RuntimeError):
            AbilityProfiler().predict([[0.5] * 4])
