import random

import pytest

from beginsum.corpus import RawThread, assemble, build_vocab
from beginsum.keywords import keywords_for_document, load_stopwords, rake
from oracles import rake_brute

STOP = load_stopwords()


def test_all_stopword_sentence_yields_nothing():
    assert rake(["the", "of", "and"], STOP) == []


def test_single_keyword_scores_one():
    ranked = rake(["a", "b"], frozenset({"a"}))
    assert ranked == [(["b"], 1.0)]


def test_spanning_phrase_matches_brute_force_table():
    tokens = "deep learning improves deep models".split()
    got = rake(tokens, frozenset())
    want = rake_brute(tokens, frozenset())
    assert [(p, s) for p, s in got] == [(p, s) for p, s in want]
    # one phrase spans the whole sentence; "deep" occurs twice
    assert len(got) == 1
    phrase, score = got[0]
    assert phrase == tokens
    assert score == pytest.approx(25.0)


def test_degree_over_frequency_hand_case():
    # "red apple . red wine" -> phrases [red apple], [red wine]
    ranked = rake(["red", "apple", ".", "red", "wine"], frozenset())
    scores = dict((tuple(p), s) for p, s in ranked)
    # freq: red 2, apple 1, wine 1; degree: red 4, apple 2, wine 2
    assert scores[("red", "apple")] == pytest.approx(2.0 + 2.0)
    assert scores[("red", "wine")] == pytest.approx(2.0 + 2.0)


def test_ties_keep_first_occurrence_order():
    ranked = rake(["b", ".", "a"], frozenset())
    assert [p for p, _ in ranked] == [["b"], ["a"]]


def test_no_emitted_phrase_contains_stopword_or_punctuation():
    rng = random.Random(5)
    pool = list("abcdefg") + ["the", "of", ".", ","]
    for _ in range(50):
        tokens = [rng.choice(pool) for _ in range(rng.randint(1, 15))]
        for phrase, score in rake(tokens, STOP):
            assert all(tok not in STOP for tok in phrase)
            assert all(any(ch.isalnum() for ch in tok) for tok in phrase)
            assert score >= 1.0


def test_matches_brute_force_on_50_random_texts():
    rng = random.Random(99)
    pool = ["river", "stone", "light", "river", "the", "of", ".", "win", "arc"]
    for _ in range(50):
        tokens = [rng.choice(pool) for _ in range(rng.randint(1, 18))]
        got = rake(tokens, STOP)
        want = rake_brute(tokens, STOP)
        assert got == want


def test_deterministic():
    tokens = "alpha beta . alpha gamma delta".split()
    assert rake(tokens, STOP) == rake(tokens, STOP)


def _doc(*comments):
    threads = [RawThread("t", list(comments))]
    vocab = build_vocab(threads, min_count=1)
    return assemble(threads[0], vocab, max_tokens=20)


def test_keywords_for_document_top_t_and_empty():
    doc = _doc("Red apple pie. The of and.")
    kws = keywords_for_document(doc, STOP, top_t=1)
    assert kws[0] == ["red", "apple", "pie"]
    assert kws[1] == []  # all stopwords -> empty sequence


def test_keywords_top_t_keeps_higher_scoring_phrase():
    # phrase "green tea leaf" (score 9) beats "cup" (score 1)
    doc = _doc("Green tea leaf in a cup.")
    kws = keywords_for_document(doc, STOP, top_t=1)
    assert kws[0] == ["green", "tea", "leaf"]
    both = keywords_for_document(doc, STOP, top_t=2)
    assert both[0] == ["green", "tea", "leaf", "cup"]


def test_keywords_tie_break_earlier_phrase_first():
    doc = _doc("Blue sky. Red fox.")
    kws = keywords_for_document(doc, STOP, top_t=2)
    assert kws[0] == ["blue", "sky"]
    assert kws[1] == ["red", "fox"]


def test_load_stopwords_from_file(tmp_path):
    p = tmp_path / "stop.txt"
    p.write_text("foo\nbar\n")
    assert load_stopwords(p) == frozenset({"foo", "bar"})
    empty = tmp_path / "empty.txt"
    empty.write_text("\n")
    with pytest.raises(ValueError):
        load_stopwords(empty)
