import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beginsum import rouge
from oracles import lcs_full_table, rouge_n_brute


def test_identical_texts_score_one():
    toks = "a quick brown fox".split()
    for n in (1, 2):
        s = rouge.rouge_n(toks, toks, n)
        assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)
    s = rouge.rouge_l(toks, toks)
    assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)


def test_hand_counted_unigram_case():
    s = rouge.rouge_n("the cat sat".split(), "the cat".split(), 1)
    assert s.precision == pytest.approx(2 / 3)
    assert s.recall == 1.0
    assert s.f1 == pytest.approx(0.8)


def test_disjoint_vocabulary_scores_zero():
    s = rouge.rouge_n("a b".split(), "c d".split(), 1)
    assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)


def test_empty_candidate_scores_zero():
    assert rouge.rouge_n([], "a b".split(), 1) == rouge.ZERO
    assert rouge.rouge_l([], "a b".split()) == rouge.ZERO


def test_lcs_hand_table():
    s = rouge.rouge_l("a b c".split(), "a x c".split())
    assert s.precision == pytest.approx(2 / 3)
    assert s.recall == pytest.approx(2 / 3)
    assert s.f1 == pytest.approx(2 / 3)


def test_lcs_reversed_reference():
    s = rouge.rouge_l("a b c".split(), "c b a".split())
    assert s.precision == pytest.approx(1 / 3)


def _random_tokens(rng, max_len=12, alphabet="abcd"):
    return [rng.choice(alphabet) for _ in range(rng.randint(0, max_len))]


def test_rouge_n_equals_brute_force_on_100_random_pairs():
    rng = random.Random(42)
    for _ in range(100):
        cand = _random_tokens(rng)
        ref = _random_tokens(rng)
        for n in (1, 2):
            got = rouge.rouge_n(cand, ref, n)
            p, r, f1 = rouge_n_brute(cand, ref, n)
            assert (got.precision, got.recall, got.f1) == (p, r, f1)


def test_rouge_l_lcs_matches_full_table_oracle():
    rng = random.Random(7)
    for _ in range(100):
        cand = _random_tokens(rng)
        ref = _random_tokens(rng)
        got = rouge.rouge_l(cand, ref)
        lcs = lcs_full_table(cand, ref)
        if cand and ref:
            assert got.precision == lcs / len(cand)
            assert got.recall == lcs / len(ref)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("abc"), max_size=10),
       st.lists(st.sampled_from("abc"), max_size=10))
def test_symmetry_swaps_precision_and_recall(cand, ref):
    fwd = rouge.rouge_n(cand, ref, 1)
    rev = rouge.rouge_n(ref, cand, 1)
    assert fwd.precision == rev.recall
    assert fwd.recall == rev.precision
    assert fwd.f1 == pytest.approx(rev.f1, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("abc"), min_size=1, max_size=8),
       st.lists(st.sampled_from("abc"), min_size=1, max_size=8))
def test_appending_reference_unigram_never_lowers_recall(cand, ref):
    before = rouge.rouge_n(cand, ref, 1).recall
    after = rouge.rouge_n(cand + [ref[0]], ref, 1).recall
    assert after >= before


def test_corpus_average_identity_and_mean():
    one = rouge.RougeResult(rouge.RougeScore(1, 1, 1.0),
                            rouge.RougeScore(1, 1, 1.0),
                            rouge.RougeScore(1, 1, 1.0))
    zero = rouge.RougeResult(rouge.ZERO, rouge.ZERO, rouge.ZERO)
    assert rouge.corpus_average([one]) == one
    avg = rouge.corpus_average([one, zero])
    assert avg.r1.f1 == 0.5 and avg.r2.f1 == 0.5 and avg.rl.f1 == 0.5


def test_corpus_average_matches_high_precision_accumulation():
    import math
    rng = random.Random(3)
    results = []
    for _ in range(100):
        cand = _random_tokens(rng, 10)
        ref = _random_tokens(rng, 10)
        results.append(rouge.score_pair(cand, ref))
    avg = rouge.corpus_average(results)
    expected = math.fsum(r.r1.f1 for r in results) / len(results)
    assert avg.r1.f1 == pytest.approx(expected, abs=1e-12)


def test_normalization_strips_punctuation_and_lowercases():
    assert rouge.normalize_tokens("The cat, sat!") == ["the", "cat", "sat"]


def test_multi_reference_takes_best_f1():
    res = rouge.score_summary("the cat sat", ["totally different words", "the cat sat"])
    assert res.r1.f1 == 1.0


def test_report_format():
    res = rouge.score_summary("the cat sat", "the cat")
    out = rouge.format_report_rows([("demo", res)])
    lines = out.strip().split("\n")
    assert lines[0] == "model\tR1\tR2\tRL"
    # R2: one of two candidate bigrams overlaps, reference has one -> F1 = 2/3
    assert lines[1].split("\t") == ["demo", "80.00", "66.67", "80.00"]
