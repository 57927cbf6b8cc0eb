"""Problem difficulty on a 1 (easy) to 10 (extremely difficult) scale.

Levels come from empirical success rates; questions with too few attempts
sit at the scale midpoint until enough evidence accumulates.
"""

from __future__ import annotations

import math

DEFAULT_LEVEL = 5
MIN_ATTEMPTS = 5


def difficulty_level(attempts: int, successes: int, min_attempts: int = MIN_ATTEMPTS) -> int:
    """1 + floor(9 * failure rate), clamped to [1,10]; midpoint under-evidence."""
    if attempts < 0 or successes < 0:
        raise ValueError("attempts and successes must be non-negative")
    if successes > attempts:
        raise ValueError(f"successes ({successes}) cannot exceed attempts ({attempts})")
    if attempts < min_attempts:
        return DEFAULT_LEVEL
    rate = successes / attempts
    return min(10, max(1, 1 + math.floor(9.0 * (1.0 - rate))))


class DifficultyTracker:
    """Per-question attempt/success counts with derived difficulty levels."""

    def __init__(self, min_attempts: int = MIN_ATTEMPTS):
        self.min_attempts = min_attempts
        self._counts: dict[str, list[int]] = {}

    def update(self, question_id: str, correct: bool) -> None:
        counts = self._counts.setdefault(question_id, [0, 0])
        counts[0] += 1
        if correct:
            counts[1] += 1

    def counts(self, question_id: str) -> tuple[int, int]:
        attempts, successes = self._counts.get(question_id, (0, 0))
        return attempts, successes

    def level(self, question_id: str) -> int:
        attempts, successes = self.counts(question_id)
        return difficulty_level(attempts, successes, self.min_attempts)

    def success_rate(self, question_id: str) -> float | None:
        attempts, successes = self.counts(question_id)
        return successes / attempts if attempts else None

    def question_ids(self) -> list[str]:
        return sorted(self._counts)
