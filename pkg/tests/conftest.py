from __future__ import annotations

import pytest

from tutorstack.interactions import Interaction


@pytest.fixture
def make_interaction():
    def _make(correct, student="s1", question="q1", skill="k1", timestamp=None, index=0):
        return Interaction(
            student_id=student,
            question_id=question,
            skill_id=skill,
            correct=bool(correct),
            timestamp=timestamp if timestamp is not None else index * 1000,
        )

    return _make


def interactions_from_bools(corrects, student="s1", question="q1", skill="k1"):
    return [
        Interaction(student, question, skill, bool(c), i * 1000)
        for i, c in enumerate(corrects)
    ]
