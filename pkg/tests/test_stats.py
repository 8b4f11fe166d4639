from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_subset
from nbestkit.corpus import NormConfig
from nbestkit.stats import overall_novelty, subset_novelty_stats, utterance_novelty

token_seqs = st.lists(st.sampled_from("abcd"), max_size=8).map(tuple)

# Hand tally for the 4-sample fixture, frozen before implementation:
#   ref "a b c d"      hyps {"a b", "b c"}            -> nt 1 ("d"), new
#   ref "x x y"        hyps {"y"}                     -> nt 2 (both "x"), new
#   ref "hello world"  hyps {"hello world", ...}      -> nt 0, exact match
#   ref "the cat"      hyps {"the cat sat", "a cat"}  -> nt 0, new
# totals: 3 new tokens / 11 ref tokens / 3 new sentences / 4 utterances
FIXTURE_ROWS = [
    (["a b", "b c"], "a b c d"),
    (["y"], "x x y"),
    (["hello world", "hello word"], "hello world"),
    (["the cat sat", "a cat"], "the cat"),
]
# Second fixture: ref "q" matched exactly; ref "r s" missing "s".
# totals: 1 new token / 3 ref tokens / 1 new sentence / 2 utterances
FIXTURE2_ROWS = [
    (["q"], "q"),
    (["r"], "r s"),
]


class TestUtteranceNovelty:
    def test_exact_first_hypothesis(self):
        ref = ("a", "b")
        assert utterance_novelty(ref, [ref, ("c",)]) == (0, False)

    def test_single_new_token(self):
        got = utterance_novelty(("a", "b", "c", "d"), [("a", "b"), ("b", "c")])
        assert got == (1, True)

    def test_counts_occurrences_not_types(self):
        assert utterance_novelty(("x", "x", "y"), [("y",)]) == (2, True)

    def test_needs_hypotheses(self):
        with pytest.raises(ValueError):
            utterance_novelty(("a",), [])

    @given(token_seqs, st.lists(token_seqs, min_size=1, max_size=5))
    def test_count_bounded_by_ref_length(self, ref, hyps):
        nt, _ = utterance_novelty(ref, hyps)
        assert 0 <= nt <= len(ref)

    @given(token_seqs, st.lists(token_seqs, min_size=1, max_size=5))
    def test_exact_match_implies_no_new_tokens(self, ref, hyps):
        nt, is_new = utterance_novelty(ref, hyps)
        if not is_new:
            assert nt == 0


class TestSubsetNoveltyStats:
    def test_hand_tally(self):
        subset = make_subset("toy", "train", FIXTURE_ROWS)
        got = subset_novelty_stats(subset, NormConfig())
        assert got.avg_nt == pytest.approx(3 / 4)
        assert got.pct_nt == pytest.approx(100 * 3 / 11)
        assert got.pct_ns == pytest.approx(75.0)
        assert got.n_utts == 4

    def test_all_tokens_covered_means_zero(self):
        subset = make_subset("toy", "train", [(["a b", "c"], "a b c")])
        got = subset_novelty_stats(subset, NormConfig())
        assert got.avg_nt == 0.0 and got.pct_nt == 0.0

    def test_rank1_equal_means_no_new_sentences(self):
        subset = make_subset("toy", "test", [(["a b", "zzz"], "a b"),
                                             (["c", "zzz"], "c")])
        assert subset_novelty_stats(subset, NormConfig()).pct_ns == 0.0

    def test_empty_subset_rejected(self):
        subset = make_subset("toy", "train", [])
        with pytest.raises(ValueError):
            subset_novelty_stats(subset, NormConfig())


class TestOverallNovelty:
    def test_single_subset_equals_subset_stats(self):
        subset = make_subset("toy", "train", FIXTURE_ROWS)
        assert overall_novelty([subset], NormConfig()) == \
            subset_novelty_stats(subset, NormConfig())

    def test_pooled_hand_tally(self):
        subsets = [make_subset("one", "train", FIXTURE_ROWS),
                   make_subset("two", "train", FIXTURE2_ROWS)]
        got = overall_novelty(subsets, NormConfig())
        assert got.avg_nt == pytest.approx(4 / 6)
        assert got.pct_nt == pytest.approx(100 * 4 / 14)
        assert got.pct_ns == pytest.approx(100 * 4 / 6)
        assert got.n_utts == 6

    def test_subset_mean_alternative(self):
        subsets = [make_subset("one", "train", FIXTURE_ROWS),
                   make_subset("two", "train", FIXTURE2_ROWS)]
        got = overall_novelty(subsets, NormConfig(), subset_mean=True)
        assert got.avg_nt == pytest.approx((3 / 4 + 1 / 2) / 2)
        assert got.pct_nt == pytest.approx((100 * 3 / 11 + 100 * 1 / 3) / 2)
        assert got.pct_ns == pytest.approx((75.0 + 50.0) / 2)
        assert got.n_utts == 6
