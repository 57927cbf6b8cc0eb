"""Bayesian Knowledge Tracing: per-skill mastery as a filtered probability.

The update is the classic two-step recursion: condition the current mastery
estimate on the observed response (with guess/slip noise), then apply the
learning transition:

    correct:   post = p*(1-slip) / (p*(1-slip) + (1-p)*guess)
    incorrect: post = p*slip     / (p*slip     + (1-p)*(1-guess))
    next       = post + (1-post) * transit
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from tutorstack.interactions import Interaction


@dataclass(frozen=True)
class BktParams:
    p_init: float = 0.3
    p_transit: float = 0.2
    p_guess: float = 0.2
    p_slip: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.p_init <= 1.0:
            raise ValueError(f"p_init must be in [0,1], got {self.p_init}")
        if not 0.0 <= self.p_transit <= 1.0:
            raise ValueError(f"p_transit must be in [0,1], got {self.p_transit}")
        if not 0.0 <= self.p_guess < 0.5:
            raise ValueError(f"p_guess must be in [0,0.5), got {self.p_guess}")
        if not 0.0 <= self.p_slip < 0.5:
            raise ValueError(f"p_slip must be in [0,0.5), got {self.p_slip}")
        if self.p_guess + self.p_slip >= 1.0:
            raise ValueError("p_guess + p_slip must be < 1")


DEFAULT_BKT_PARAMS = BktParams()


def bkt_update(prior: float, correct: bool, params: BktParams = DEFAULT_BKT_PARAMS) -> float:
    """One BKT step: Bayesian posterior for the observation, then learning."""
    if not math.isfinite(prior) or not 0.0 <= prior <= 1.0:
        raise ValueError(f"prior must be a probability in [0,1], got {prior!r}")
    if correct:
        num = prior * (1.0 - params.p_slip)
        den = num + (1.0 - prior) * params.p_guess
    else:
        num = prior * params.p_slip
        den = num + (1.0 - prior) * (1.0 - params.p_guess)
    # den == 0 means the observation had probability zero under the model
    # (e.g. prior=0, guess=0, correct); keep the prior rather than divide.
    post = prior if den == 0.0 else num / den
    out = post + (1.0 - post) * params.p_transit
    return min(1.0, max(0.0, out))


def predict_correct(mastery: float, params: BktParams = DEFAULT_BKT_PARAMS) -> float:
    """Emission probability: P(correct) given the current mastery estimate."""
    return mastery * (1.0 - params.p_slip) + (1.0 - mastery) * params.p_guess


def mastery_sequence(
    log: Sequence[Interaction], params: BktParams = DEFAULT_BKT_PARAMS
) -> list[float]:
    """Mastery estimate *before* each interaction of one student-skill log.

    Element 0 is p_init; element t folds bkt_update over the first t
    observations. The log must already be sorted by timestamp.
    """
    out: list[float] = []
    mastery = params.p_init
    for it in log:
        out.append(mastery)
        mastery = bkt_update(mastery, it.correct, params)
    return out


def correctness_sequences(interactions: Sequence[Interaction]) -> list[list[bool]]:
    """Per student-skill boolean response sequences, in timestamp order."""
    groups: dict[tuple[str, str], list[Interaction]] = {}
    for it in interactions:
        groups.setdefault((it.student_id, it.skill_id), []).append(it)
    out = []
    for key in sorted(groups):
        log = sorted(groups[key], key=lambda x: x.timestamp)
        out.append([it.correct for it in log])
    return out


def _grid(lo: float, hi: float, step: float) -> list[float]:
    n = int(round((hi - lo) / step))
    return [round(lo + i * step, 10) for i in range(n + 1)]


def fit_bkt_params(
    sequences: Sequence[Sequence[bool]],
    holdout: Sequence[Sequence[bool]] | None = None,
    step: float = 0.05,
) -> BktParams:
    """Grid-search BKT parameters minimizing one-step-ahead log-loss.

    Candidates are scored on ``holdout`` when given, else on ``sequences``.
    The whole grid is evaluated in one vectorized sweep; ties break toward
    the earlier grid point so the result is deterministic.
    """
    eval_seqs = holdout if holdout is not None else sequences
    if not eval_seqs or not any(len(s) for s in eval_seqs):
        raise ValueError("grid search needs at least one non-empty sequence")

    inits = _grid(step, 1.0 - step, step)
    transits = _grid(step, 1.0 - step, step)
    guesses = _grid(step, 0.5 - step, step)
    slips = _grid(step, 0.5 - step, step)
    combos = list(itertools.product(inits, transits, guesses, slips))
    p0 = np.array([c[0] for c in combos])
    pt = np.array([c[1] for c in combos])
    pg = np.array([c[2] for c in combos])
    ps = np.array([c[3] for c in combos])

    total = np.zeros(len(combos))
    count = 0
    eps = 1e-12
    for seq in eval_seqs:
        m = p0.copy()
        for obs in seq:
            pred = m * (1.0 - ps) + (1.0 - m) * pg
            pred = np.clip(pred, eps, 1.0 - eps)
            total += -np.log(pred) if obs else -np.log(1.0 - pred)
            count += 1
            if obs:
                num = m * (1.0 - ps)
                den = num + (1.0 - m) * pg
            else:
                num = m * ps
                den = num + (1.0 - m) * (1.0 - pg)
            post = np.where(den > 0, num / np.where(den > 0, den, 1.0), m)
            m = post + (1.0 - post) * pt
    best = int(np.argmin(total))
    i, t, g, s = combos[best]
    return BktParams(p_init=i, p_transit=t, p_guess=g, p_slip=s)
