import dataclasses

import pytest
import torch

from tutorstack.model.train import TrainHyper, split_students, train_model
from tutorstack.sim.simulate import SimConfig, simulate

TINY_CONFIG = dict(embed_dim=16, num_heads=2, num_layers=1, ffn_dim=32,
                   max_seq_len=32, conv_kernel=3, dropout=0.0)


@pytest.fixture(scope="module")
def small_dataset():
    config = SimConfig(num_students=12, num_skills=4, num_questions=12, steps=40, seed=5)
    return simulate(config).interactions


class TestSplitStudents:
    def test_split_is_disjoint_and_seeded(self):
        ids = [f"s{i}" for i in range(20)]
        train1, val1 = split_students(ids, 0.1, seed=3)
        train2, val2 = split_students(ids, 0.1, seed=3)
        assert (train1, val1) == (train2, val2)
        assert set(train1) | set(val1) == set(ids)
        assert not set(train1) & set(val1)
        assert len(val1) == 2

    def test_requires_two_students(self):
        with pytest.raises(ValueError):
            split_students(["only"], 0.1, seed=0)


class TestTrainModel:
    def test_loss_decreases_early(self, small_dataset):
        result = train_model(
            small_dataset,
            config_overrides=TINY_CONFIG,
            hyper=TrainHyper(epochs=3, batch_size=16, seed=0),
        )
        losses = [e.train_loss for e in result.report.epochs]
        assert len(losses) == 3
        # allow one non-improving epoch
        non_improving = sum(1 for a, b in zip(losses, losses[1:]) if b >= a)
        assert non_improving <= 1
        assert all(torch.isfinite(torch.tensor(l)) for l in losses)

    def test_deterministic_report_for_seed(self, small_dataset):
        hyper = TrainHyper(epochs=2, batch_size=16, seed=9)
        r1 = train_model(small_dataset, config_overrides=TINY_CONFIG, hyper=hyper)
        r2 = train_model(small_dataset, config_overrides=TINY_CONFIG, hyper=hyper)
        assert r1.report.comparable() == r2.report.comparable()
        for name, param in r1.net.state_dict().items():
            assert torch.equal(param, r2.net.state_dict()[name]), name

    def test_zero_lr_leaves_parameters_unchanged(self, small_dataset):
        hyper = TrainHyper(epochs=1, batch_size=16, seed=4, lr=0.0)
        result = train_model(small_dataset, config_overrides=TINY_CONFIG, hyper=hyper)
        torch.manual_seed(4)
        from tutorstack.model.network import MlfbkNet

        fresh = MlfbkNet(result.config)
        for name, param in result.net.state_dict().items():
            assert torch.equal(param, fresh.state_dict()[name]), name

    def test_rejects_single_student(self, small_dataset):
        one_student = [it for it in small_dataset if it.student_id == "s0000"]
        with pytest.raises(ValueError):
            train_model(one_student, config_overrides=TINY_CONFIG)

    def test_report_fields(self, small_dataset):
        result = train_model(
            small_dataset,
            config_overrides=TINY_CONFIG,
            hyper=TrainHyper(epochs=2, batch_size=16, seed=1),
        )
        report = result.report
        assert report.seed == 1
        assert report.wall_seconds > 0
        assert 0 <= report.best_epoch < 2
        for epoch in report.epochs:
            assert 0.0 <= epoch.val_auc <= 1.0
        comparable = report.comparable()
        assert "wall_seconds" not in comparable
        assert dataclasses.asdict(report)["wall_seconds"] == report.wall_seconds

    def test_latent_tables_from_train_split_only(self, small_dataset):
        result = train_model(
            small_dataset,
            config_overrides=TINY_CONFIG,
            hyper=TrainHyper(epochs=1, batch_size=16, seed=2),
        )
        train_questions = {
            it.question_id for it in small_dataset if it.student_id in set(result.train_students)
        }
        assert set(result.latent.difficulty_levels) == train_questions
        assert set(result.vocab.questions) <= train_questions
