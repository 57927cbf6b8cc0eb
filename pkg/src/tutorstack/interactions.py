"""Interaction records and CSV log handling.

One Interaction is a single student-question event; interaction logs are
CSV files with the header ``student_id,question_id,skill_id,correct,timestamp``
(``correct`` is 0/1, ``timestamp`` is integer milliseconds since epoch).
Rows need not be pre-sorted; loading sorts each student's log by timestamp.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

CSV_HEADER = ["student_id", "question_id", "skill_id", "correct", "timestamp"]


@dataclass(frozen=True)
class Interaction:
    student_id: str
    question_id: str
    skill_id: str
    correct: bool
    timestamp: int

    def __post_init__(self):
        if not self.student_id or not self.question_id or not self.skill_id:
            raise ValueError("interaction ids must be non-empty")
        if self.timestamp < 0:
            raise ValueError(f"timestamp must be >= 0, got {self.timestamp}")


def sort_log(interactions: Iterable[Interaction]) -> list[Interaction]:
    """Stable-sort interactions by (student_id, timestamp)."""
    return sorted(interactions, key=lambda x: (x.student_id, x.timestamp))


def group_by_student(interactions: Iterable[Interaction]) -> dict[str, list[Interaction]]:
    """Group into per-student logs, each sorted by timestamp (stable)."""
    groups: dict[str, list[Interaction]] = {}
    for it in interactions:
        groups.setdefault(it.student_id, []).append(it)
    for log in groups.values():
        log.sort(key=lambda x: x.timestamp)
    return groups


def _parse_correct(raw: str) -> bool:
    if raw not in ("0", "1"):
        raise ValueError(f"correct must be 0 or 1, got {raw!r}")
    return raw == "1"


def load_interactions(path: str | Path) -> list[Interaction]:
    """Read an interaction CSV, returning rows sorted by (student, timestamp)."""
    path = Path(path)
    rows: list[Interaction] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing CSV columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append(
                    Interaction(
                        student_id=row["student_id"],
                        question_id=row["question_id"],
                        skill_id=row["skill_id"],
                        correct=_parse_correct(row["correct"]),
                        timestamp=int(row["timestamp"]),
                    )
                )
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad interaction row: {exc}") from exc
    return sort_log(rows)


def save_interactions(interactions: Iterable[Interaction], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for it in interactions:
            writer.writerow(
                [it.student_id, it.question_id, it.skill_id, int(it.correct), it.timestamp]
            )
