"""Okapi BM25 over an in-memory inverted index.

Tokenization is lowercase alphanumeric runs (no stemming, no stopwords);
idf uses the ln(1 + (N - n + 0.5)/(n + 0.5)) form, so scores are >= 0.
An index is immutable once built; the knowledge base swaps in a fresh one
per commit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

from tutorstack.kb.chunking import Chunk

K1 = 1.2
B = 0.75

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class SearchHit:
    chunk: Chunk
    score: float


class Bm25Index:
    def __init__(self, chunks: Sequence[Chunk], k1: float = K1, b: float = B):
        self.k1 = k1
        self.b = b
        # canonical chunk order: postings stay sorted by (doc_id, chunk_index)
        self.chunks: tuple[Chunk, ...] = tuple(sorted(chunks, key=lambda c: c.ref))
        self._ordinal: dict[tuple[str, int], int] = {
            c.ref: i for i, c in enumerate(self.chunks)
        }
        self.lengths = [len(tokenize(c.text)) for c in self.chunks]
        self.n_chunks = len(self.chunks)
        total = sum(self.lengths)
        self.avg_length = total / self.n_chunks if self.n_chunks else 0.0
        self.postings: dict[str, list[tuple[int, int]]] = {}
        for i, chunk in enumerate(self.chunks):
            tf: dict[str, int] = {}
            for term in tokenize(chunk.text):
                tf[term] = tf.get(term, 0) + 1
            for term, count in tf.items():
                self.postings.setdefault(term, []).append((i, count))

    def idf(self, term: str) -> float:
        n = len(self.postings.get(term, ()))
        return math.log(1.0 + (self.n_chunks - n + 0.5) / (n + 0.5))

    def ordinal(self, ref: tuple[str, int]) -> int:
        return self._ordinal[ref]

    def _score_ordinal(self, query_terms: Sequence[str], i: int) -> float:
        score = 0.0
        length = self.lengths[i]
        norm = self.k1 * (1.0 - self.b + self.b * (length / self.avg_length if self.avg_length else 0.0))
        for term in query_terms:
            tf = 0
            for ordinal, count in self.postings.get(term, ()):
                if ordinal == i:
                    tf = count
                    break
            if tf == 0:
                continue
            score += self.idf(term) * (tf * (self.k1 + 1.0)) / (tf + norm)
        return score

    def score(self, query_terms: Sequence[str], chunk: Chunk | tuple[str, int]) -> float:
        """BM25 score of one chunk for the given query terms (unknown terms add 0)."""
        ref = chunk.ref if isinstance(chunk, Chunk) else chunk
        return self._score_ordinal(query_terms, self._ordinal[ref])

    def search(self, query: str, top_k: int = 5) -> list[SearchHit]:
        """Top-k chunks by score (desc), ties by chunk ref; zero scores excluded."""
        if top_k <= 0 or not self.n_chunks:
            return []
        terms = tokenize(query)
        candidates: set[int] = set()
        for term in terms:
            candidates.update(i for i, _ in self.postings.get(term, ()))
        scored = []
        for i in sorted(candidates):
            s = self._score_ordinal(terms, i)
            if s > 0.0:
                scored.append((-s, self.chunks[i].ref, i))
        scored.sort()
        return [SearchHit(chunk=self.chunks[i], score=-neg) for neg, _, i in scored[:top_k]]


def bm25_score(query_terms: Sequence[str], chunk: Chunk | tuple[str, int], index: Bm25Index) -> float:
    return index.score(query_terms, chunk)
