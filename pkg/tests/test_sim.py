import itertools
import random

import numpy as np
import pytest

from tutorstack.features.bkt import bkt_update, predict_correct
from tutorstack.interactions import group_by_student
from tutorstack.sim.metrics import UndefinedMetricError, accuracy, auc, log_loss
from tutorstack.sim.simulate import ParamRanges, SimConfig, simulate, write_simulation

from .oracles import brute_force_auc


class TestAuc:
    def test_perfect_separation(self):
        assert auc([0.9, 0.8, 0.3, 0.2], [True, True, False, False]) == 1.0

    def test_half(self):
        # 4 pos-neg pairs, 2 concordant
        assert auc([0.9, 0.4, 0.6, 0.2], [True, False, False, True]) == 0.5

    def test_all_ties(self):
        assert auc([0.5] * 6, [True, False, True, False, False, True]) == 0.5

    def test_single_class_rejected(self):
        with pytest.raises(UndefinedMetricError):
            auc([0.1, 0.9], [True, True])

    def test_matches_brute_force_on_random_instances(self):
        rng = random.Random(2024)
        for _ in range(1000):
            n = rng.randint(2, 12)
            labels = [rng.random() < 0.5 for _ in range(n)]
            if all(labels) or not any(labels):
                labels[0] = not labels[0]
            scores = [rng.choice([0.1, 0.25, 0.5, 0.75, 0.9, rng.random()]) for _ in range(n)]
            assert auc(scores, labels) == pytest.approx(
                brute_force_auc(scores, labels), abs=1e-12
            )


class TestOtherMetrics:
    def test_log_loss_of_perfect_predictions(self):
        assert log_loss([1.0, 0.0], [True, False]) == pytest.approx(0.0, abs=1e-10)

    def test_accuracy(self):
        assert accuracy([0.9, 0.2, 0.6], [True, True, False]) == pytest.approx(1 / 3)


class TestSimulate:
    def test_deterministic_by_seed(self, tmp_path):
        config = SimConfig(num_students=4, num_skills=3, num_questions=9, steps=20, seed=7)
        a, b = simulate(config), simulate(config)
        assert a.interactions == b.interactions
        assert a.ground_truth == b.ground_truth
        write_simulation(a, tmp_path / "x")
        write_simulation(b, tmp_path / "y")
        assert (tmp_path / "x" / "interactions.csv").read_bytes() == (
            tmp_path / "y" / "interactions.csv"
        ).read_bytes()
        assert (tmp_path / "x" / "ground_truth.csv").read_bytes() == (
            tmp_path / "y" / "ground_truth.csv"
        ).read_bytes()

    def test_certain_student_always_correct(self):
        ranges = ParamRanges(
            p_init=(1.0, 1.0), p_transit=(0.1, 0.1), p_guess=(0.0, 0.0), p_slip=(0.0, 0.0)
        )
        config = SimConfig(num_students=2, num_skills=2, num_questions=4, steps=30,
                           ranges=ranges, seed=1)
        result = simulate(config)
        assert all(it.correct for it in result.interactions)
        assert all(p == 1.0 for _, _, p in result.ground_truth)

    def test_empirical_rate_matches_probability(self):
        # a single never-learning skill held at p_init: emission rate is constant
        ranges = ParamRanges(
            p_init=(0.4, 0.4), p_transit=(0.0, 0.0), p_guess=(0.2, 0.2), p_slip=(0.1, 0.1)
        )
        config = SimConfig(num_students=100, num_skills=1, num_questions=1, steps=1000,
                           ranges=ranges, seed=3)
        result = simulate(config)
        # p(L)=0.4 forever? no: bkt_update still conditions on the response, so the
        # trajectory moves; instead verify the first-step rate, which is exactly p
        firsts = [it for it in result.interactions if it.timestamp == 0]
        p0 = predict_correct(0.4, result.true_params[("s0000", "skill000")])
        rate = sum(it.correct for it in firsts) / len(firsts)
        assert rate == pytest.approx(p0, abs=0.1)

    def test_monte_carlo_emission_rate(self):
        # large-sample check of the emission draw itself
        rng = np.random.default_rng(5)
        p = 0.634
        draws = rng.random(100_000) < p
        assert draws.mean() == pytest.approx(p, abs=0.01)

    def test_trajectories_replay_exactly(self):
        config = SimConfig(num_students=5, num_skills=4, num_questions=8, steps=50, seed=11)
        result = simulate(config)
        truth = {(s, step): p for s, step, p in result.ground_truth}
        logs = group_by_student(result.interactions)
        for student, log in logs.items():
            mastery = {}
            for step, it in enumerate(log):
                params = result.true_params[(student, it.skill_id)]
                m = mastery.get(it.skill_id, params.p_init)
                assert truth[(student, step)] == predict_correct(m, params)
                mastery[it.skill_id] = bkt_update(m, it.correct, params)

    def test_question_belongs_to_matching_skill(self):
        config = SimConfig(num_students=2, num_skills=5, num_questions=20, steps=40, seed=2)
        result = simulate(config)
        for it in result.interactions:
            q = int(it.question_id[1:])
            k = int(it.skill_id[5:])
            assert q % 5 == k

    def test_rejects_bad_config(self):
        with pytest.raises(ValueError):
            SimConfig(num_students=0)
