import pytest

from tutorstack.kb.bm25 import SearchHit
from tutorstack.kb.chunking import Chunk
from tutorstack.rag.prompt import assemble_prompt


def hit(doc, idx, text, score=1.0):
    return SearchHit(
        chunk=Chunk(doc_id=doc, chunk_index=idx, text=text, word_start=0,
                    word_end=len(text.split())),
        score=score,
    )


HITS = [
    hit("aaa", 0, "first ranked chunk " + "x " * 30, score=3.0),
    hit("bbb", 1, "second ranked chunk " + "y " * 30, score=2.0),
    hit("ccc", 2, "third ranked chunk " + "z " * 30, score=1.0),
]


class TestAssemblePrompt:
    def test_blocks_in_rank_order(self):
        bundle = assemble_prompt("learner", HITS, "what is rank?")
        tags = [b.tag for b in bundle.context_blocks]
        assert tags == ["[chunk aaa#0]", "[chunk bbb#1]", "[chunk ccc#2]"]

    def test_rendering_deterministic(self):
        a = assemble_prompt("learner", HITS, "what is rank?").render()
        b = assemble_prompt("learner", HITS, "what is rank?").render()
        assert a.encode() == b.encode()

    def test_zero_chunks_still_valid(self):
        bundle = assemble_prompt("learner", [], "anything?")
        rendered = bundle.render()
        assert "(no retrieved context)" in rendered
        assert "anything?" in rendered

    def test_empty_question_rejected(self):
        with pytest.raises(ValueError):
            assemble_prompt("learner", HITS, "")
        with pytest.raises(ValueError):
            assemble_prompt("learner", HITS, "   ")

    def test_budget_drops_lowest_ranked_first(self):
        full = assemble_prompt("learner", HITS, "q?")
        full_len = len(full.render())
        # choose a budget that fits exactly two blocks
        two = assemble_prompt("learner", HITS[:2], "q?")
        budget = (len(two.render()) + full_len) // 2
        bundle = assemble_prompt("learner", HITS, "q?", budget=budget)
        tags = [b.tag for b in bundle.context_blocks]
        assert tags == ["[chunk aaa#0]", "[chunk bbb#1]"]
        assert len(bundle.render()) <= budget

    def test_budget_below_smallest_chunk_keeps_summary(self):
        bundle = assemble_prompt("learner summary text", HITS, "q?", budget=10)
        assert bundle.context_blocks == []
        assert "learner summary text" in bundle.render()
        assert "q?" in bundle.render()

    def test_monotone_in_budget(self):
        lengths = {}
        for budget in range(50, 2000, 25):
            bundle = assemble_prompt("learner", HITS, "q?", budget=budget)
            lengths[budget] = len(bundle.context_blocks)
        budgets = sorted(lengths)
        for b1, b2 in zip(budgets, budgets[1:]):
            assert lengths[b1] <= lengths[b2]

    def test_never_truncates_mid_block(self):
        for budget in range(50, 2000, 37):
            bundle = assemble_prompt("learner", HITS, "q?", budget=budget)
            rendered = bundle.render()
            for block in bundle.context_blocks:
                assert block.text in rendered

    def test_citations_match_blocks(self):
        bundle = assemble_prompt("learner", HITS, "q?")
        refs = [(c["doc_id"], c["chunk_index"]) for c in bundle.citations()]
        assert refs == [("aaa", 0), ("bbb", 1), ("ccc", 2)]
