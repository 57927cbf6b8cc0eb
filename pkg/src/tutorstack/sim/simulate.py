"""Simulated students with known BKT dynamics.

Each student draws per-skill BKT parameters from configured ranges. At every
step a skill (and one of its questions) is sampled, the response is drawn
from the emission probability p = m*(1-slip) + (1-m)*guess, and the latent
mastery then advances through the full BKT filter update on that drawn
response. The recorded ground-truth probability is the emission probability
at the moment of the draw, so replaying the logged responses through
bkt_update reproduces the trajectory exactly.

Per-student generators are derived from (seed, student index), which keeps
output bytes identical no matter how the work is scheduled.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tutorstack.features.bkt import BktParams, bkt_update, predict_correct
from tutorstack.interactions import Interaction, save_interactions

GROUND_TRUTH_HEADER = ["student_id", "step", "p_correct"]


@dataclass(frozen=True)
class ParamRanges:
    p_init: tuple[float, float] = (0.05, 0.6)
    p_transit: tuple[float, float] = (0.05, 0.35)
    p_guess: tuple[float, float] = (0.05, 0.35)
    p_slip: tuple[float, float] = (0.05, 0.25)


@dataclass(frozen=True)
class SimConfig:
    num_students: int = 200
    num_skills: int = 20
    num_questions: int = 100
    steps: int = 200
    ranges: ParamRanges = field(default_factory=ParamRanges)
    seed: int = 42

    def __post_init__(self):
        for name in ("num_students", "num_skills", "num_questions", "steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass
class SimResult:
    interactions: list[Interaction]
    ground_truth: list[tuple[str, int, float]]  # (student_id, step, p_correct)
    true_params: dict[tuple[str, str], BktParams]  # (student_id, skill_id)


def _student_id(i: int) -> str:
    return f"s{i:04d}"


def _skill_id(i: int) -> str:
    return f"skill{i:03d}"


def _question_id(i: int) -> str:
    return f"q{i:04d}"


def question_skill(question_index: int, num_skills: int) -> int:
    """Questions map to skills round-robin."""
    return question_index % num_skills


def _draw(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(lo + (hi - lo) * rng.random())


def simulate(config: SimConfig = SimConfig()) -> SimResult:
    questions_of_skill: dict[int, list[int]] = {}
    for q in range(config.num_questions):
        questions_of_skill.setdefault(question_skill(q, config.num_skills), []).append(q)
    skills_with_questions = sorted(questions_of_skill)

    interactions: list[Interaction] = []
    ground_truth: list[tuple[str, int, float]] = []
    true_params: dict[tuple[str, str], BktParams] = {}

    for s in range(config.num_students):
        rng = np.random.default_rng([config.seed, s])
        student = _student_id(s)
        params: dict[int, BktParams] = {}
        mastery: dict[int, float] = {}
        for k in skills_with_questions:
            p = BktParams(
                p_init=_draw(rng, *config.ranges.p_init),
                p_transit=_draw(rng, *config.ranges.p_transit),
                p_guess=_draw(rng, *config.ranges.p_guess),
                p_slip=_draw(rng, *config.ranges.p_slip),
            )
            params[k] = p
            mastery[k] = p.p_init
            true_params[(student, _skill_id(k))] = p
        for step in range(config.steps):
            k = skills_with_questions[int(rng.integers(len(skills_with_questions)))]
            qs = questions_of_skill[k]
            q = qs[int(rng.integers(len(qs)))]
            p = predict_correct(mastery[k], params[k])
            correct = bool(rng.random() < p)
            interactions.append(
                Interaction(
                    student_id=student,
                    question_id=_question_id(q),
                    skill_id=_skill_id(k),
                    correct=correct,
                    timestamp=step * 1000,
                )
            )
            ground_truth.append((student, step, p))
            mastery[k] = bkt_update(mastery[k], correct, params[k])

    return SimResult(interactions=interactions, ground_truth=ground_truth, true_params=true_params)


def write_simulation(result: SimResult, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    interactions_path = out_dir / "interactions.csv"
    truth_path = out_dir / "ground_truth.csv"
    save_interactions(result.interactions, interactions_path)
    with truth_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GROUND_TRUTH_HEADER)
        for student, step, p in result.ground_truth:
            writer.writerow([student, step, f"{p:.12g}"])
    return interactions_path, truth_path


def load_ground_truth(path: str | Path) -> dict[tuple[str, int], float]:
    """Map (student_id, step) -> true success probability."""
    out: dict[tuple[str, int], float] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            out[(row["student_id"], int(row["step"]))] = float(row["p_correct"])
    return out
