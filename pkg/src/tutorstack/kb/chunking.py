"""Sliding-window word chunks, the unit of retrieval."""

from __future__ import annotations

from dataclasses import dataclass

WINDOW_WORDS = 200
OVERLAP_WORDS = 40
MIN_TAIL_WORDS = 20


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    chunk_index: int
    text: str
    word_start: int
    word_end: int

    @property
    def ref(self) -> tuple[str, int]:
        return (self.doc_id, self.chunk_index)


def chunk_text(
    text: str,
    window: int = WINDOW_WORDS,
    overlap: int = OVERLAP_WORDS,
    doc_id: str = "",
    min_tail: int = MIN_TAIL_WORDS,
) -> list[Chunk]:
    """Tile the text with word windows at stride window-overlap.

    The final partial window is kept only if it has at least ``min_tail``
    words or is the only chunk.
    """
    if overlap < 0 or window <= overlap:
        raise ValueError(f"need window > overlap >= 0, got window={window} overlap={overlap}")
    words = text.split()
    if not words:
        return []
    stride = window - overlap
    spans: list[tuple[int, int]] = []
    start = 0
    while True:
        end = min(start + window, len(words))
        spans.append((start, end))
        if end == len(words):
            break
        start += stride
    if len(spans) > 1 and spans[-1][1] - spans[-1][0] < min_tail:
        spans.pop()
    return [
        Chunk(
            doc_id=doc_id,
            chunk_index=i,
            text=" ".join(words[s:e]),
            word_start=s,
            word_end=e,
        )
        for i, (s, e) in enumerate(spans)
    ]
