import math
import random

import pytest

from tutorstack.kb.bm25 import Bm25Index, bm25_score, tokenize
from tutorstack.kb.chunking import Chunk

from .oracles import brute_force_bm25


def make_chunks(texts, doc_prefix="d"):
    return [
        Chunk(doc_id=f"{doc_prefix}{i}", chunk_index=0, text=t, word_start=0, word_end=len(t.split()))
        for i, t in enumerate(texts)
    ]


class TestTokenize:
    def test_lowercase_and_split(self):
        assert tokenize("Linear-Algebra 101!") == ["linear", "algebra", "101"]

    def test_underscore_splits(self):
        assert tokenize("matrix_rank") == ["matrix", "rank"]

    def test_empty(self):
        assert tokenize("...") == []


class TestBm25Score:
    def test_hand_example(self):
        # {d1: "linear algebra", d2: "matrix rank"}, query "algebra" on d1:
        # idf = ln 2, tf term = 1.0 -> score = ln 2
        chunks = make_chunks(["linear algebra", "matrix rank"])
        index = Bm25Index(chunks)
        score = bm25_score(["algebra"], chunks[0], index)
        assert score == pytest.approx(math.log(2.0), abs=1e-12)

    def test_absent_term_contributes_zero(self):
        chunks = make_chunks(["linear algebra", "matrix rank"])
        index = Bm25Index(chunks)
        assert bm25_score(["calculus"], chunks[0], index) == 0.0

    def test_identical_chunks_identical_scores(self):
        chunks = make_chunks(["span basis dimension"] * 4)
        index = Bm25Index(chunks)
        scores = {bm25_score(["basis"], c, index) for c in chunks}
        assert len(scores) == 1

    def test_matches_brute_force(self):
        rng = random.Random(99)
        vocab = ["matrix", "vector", "rank", "linear", "span", "basis", "eigen", "norm"]
        for trial in range(50):
            texts = [
                " ".join(rng.choices(vocab, k=rng.randint(1, 30)))
                for _ in range(rng.randint(1, 8))
            ]
            chunks = make_chunks(texts)
            index = Bm25Index(chunks)
            query = " ".join(rng.choices(vocab, k=rng.randint(1, 3)))
            for i, c in enumerate(chunks):
                got = bm25_score(tokenize(query), c, index)
                want = brute_force_bm25(query, texts, i)
                assert got == pytest.approx(want, abs=1e-9)


class TestSearch:
    def test_single_matching_chunk_first(self):
        chunks = make_chunks(["eigenvalues here", "nothing relevant", "also nothing"])
        index = Bm25Index(chunks)
        hits = index.search("eigenvalues")
        assert len(hits) == 1
        assert hits[0].chunk.doc_id == "d0"

    def test_top_k_limits(self):
        chunks = make_chunks(["rank one", "rank two", "rank three"])
        index = Bm25Index(chunks)
        assert len(index.search("rank", top_k=1)) == 1
        assert len(index.search("rank", top_k=0)) == 0

    def test_zero_scores_excluded(self):
        chunks = make_chunks(["alpha beta", "gamma delta"])
        index = Bm25Index(chunks)
        assert index.search("epsilon") == []

    def test_ties_break_by_ref(self):
        chunks = make_chunks(["same text here"] * 3)
        index = Bm25Index(chunks)
        hits = index.search("text")
        assert [h.chunk.doc_id for h in hits] == ["d0", "d1", "d2"]

    def test_empty_index(self):
        assert Bm25Index([]).search("anything") == []

    def test_ranking_matches_brute_force(self):
        rng = random.Random(4242)
        vocab = [f"term{i}" for i in range(12)]
        for trial in range(100):
            texts = [
                " ".join(rng.choices(vocab, k=rng.randint(1, 25)))
                for _ in range(rng.randint(1, 12))
            ]
            chunks = make_chunks(texts)
            index = Bm25Index(chunks)
            query = " ".join(rng.choices(vocab, k=rng.randint(1, 4)))
            hits = index.search(query, top_k=len(chunks))
            expected = []
            for i, t in enumerate(texts):
                s = brute_force_bm25(query, texts, i)
                if s > 0:
                    expected.append((-s, chunks[i].ref))
            expected.sort()
            assert [h.chunk.ref for h in hits] == [ref for _, ref in expected]
            for h in hits:
                want = brute_force_bm25(query, texts, int(h.chunk.doc_id[1:]))
                assert h.score == pytest.approx(want, abs=1e-9)
