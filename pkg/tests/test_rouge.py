import random

import pytest

from nonsense_factory.rouge import (
    RougeScore,
    corpus_rouge,
    lcs_length,
    rouge_l,
    rouge_n,
    score_pair,
    tokenize,
)

TOL = 1e-9


def brute_force_lcs(a, b):
    """Exponential oracle: longest subsequence of `a` that is also in `b`."""
    best = 0
    for mask in range(1 << len(a)):
        sub = [a[i] for i in range(len(a)) if mask >> i & 1]
        it = iter(b)
        if all(tok in it for tok in sub):
            best = max(best, len(sub))
    return best


def test_unigram_hand_case():
    s = rouge_n("aaa baa caa".split(), "aaa caa".split(), 1)
    assert abs(s.precision - 2 / 3) < TOL
    assert abs(s.recall - 1.0) < TOL
    assert abs(s.f1 - 0.8) < TOL


def test_bigram_hand_case():
    s = rouge_n("aaa baa caa".split(), "aaa baa daa".split(), 2)
    assert abs(s.precision - 0.5) < TOL
    assert abs(s.recall - 0.5) < TOL
    assert abs(s.f1 - 0.5) < TOL


def test_lcs_hand_case():
    s = rouge_l("aaa baa caa".split(), "aaa caa".split())
    assert abs(s.precision - 2 / 3) < TOL
    assert abs(s.recall - 1.0) < TOL
    assert abs(s.f1 - 0.8) < TOL


def test_identity_scores_one():
    toks = "aaa baa caa daa".split()
    for s in score_pair(toks, toks).values():
        assert s.precision == s.recall == s.f1 == 1.0


def test_disjoint_scores_zero():
    a, b = "aaa baa".split(), "caa daa".split()
    for s in score_pair(a, b).values():
        assert s.precision == s.recall == s.f1 == 0.0


def test_empty_sides_convention():
    for s in (rouge_n([], "aaa".split()), rouge_n("aaa".split(), []),
              rouge_l([], []), rouge_l("aaa".split(), [])):
        assert s == RougeScore.zero()


def test_reference_subsequence_gives_full_recall():
    cand = "x aaa y baa z caa".split()
    ref = "aaa baa caa".split()
    assert abs(rouge_l(cand, ref).recall - 1.0) < TOL


def test_clipped_counts():
    # candidate repeats a reference unigram; matches clip at the reference count
    s = rouge_n("aaa aaa aaa".split(), "aaa baa".split(), 1)
    assert abs(s.precision - 1 / 3) < TOL
    assert abs(s.recall - 1 / 2) < TOL


def test_precision_recall_duality():
    rng = random.Random(99)
    words = ["w%d" % i for i in range(8)]
    for _ in range(300):
        a = rng.choices(words, k=rng.randint(0, 12))
        b = rng.choices(words, k=rng.randint(0, 12))
        for n in (1, 2):
            ab = rouge_n(a, b, n)
            ba = rouge_n(b, a, n)
            assert abs(ab.precision - ba.recall) < TOL
            assert abs(ab.recall - ba.precision) < TOL


def test_recall_monotone_in_candidate_extension():
    rng = random.Random(100)
    words = ["w%d" % i for i in range(6)]
    for _ in range(200):
        ref = rng.choices(words, k=rng.randint(2, 8))
        cand = rng.choices(words, k=rng.randint(0, 8))
        base = rouge_n(cand, ref, 1).recall
        extended = rouge_n(cand + [rng.choice(ref)], ref, 1).recall
        assert extended >= base - TOL


def test_lcs_matches_brute_force():
    rng = random.Random(101)
    words = ["w%d" % i for i in range(5)]
    for _ in range(300):
        a = rng.choices(words, k=rng.randint(0, 10))
        b = rng.choices(words, k=rng.randint(0, 10))
        assert lcs_length(a, b) == brute_force_lcs(a, b)


def test_relabeling_invariance():
    rng = random.Random(102)
    words = ["w%d" % i for i in range(10)]
    mapping = {w: "x%d" % i for i, w in enumerate(reversed(words))}
    for _ in range(100):
        a = rng.choices(words, k=rng.randint(1, 10))
        b = rng.choices(words, k=rng.randint(1, 10))
        left = score_pair(a, b)
        right = score_pair([mapping[w] for w in a], [mapping[w] for w in b])
        for v in ("r1", "r2", "rl"):
            assert abs(left[v].f1 - right[v].f1) < TOL


def test_rouge_n_rejects_bad_order():
    with pytest.raises(ValueError):
        rouge_n("aaa".split(), "aaa".split(), 0)


def test_corpus_report_means():
    pair_a = ("aaa baa caa".split(), "aaa caa".split())  # f1 = 0.8
    pair_b = ("aaa zzz yyy xxx".split(), "aaa www".split())  # r1: p=1/4 r=1/2 f1=1/3
    report = corpus_rouge([pair_a, pair_b])
    assert abs(report.means["r1"].f1 - (0.8 + 1 / 3) / 2) < TOL
    assert len(report.pairs) == 2

    single = corpus_rouge([pair_a])
    assert abs(single.means["r1"].f1 - 0.8) < TOL

    identical = corpus_rouge([(["aaa"], ["aaa"])] * 5)
    assert identical.means["rl"].f1 == 1.0

    with pytest.raises(ValueError):
        corpus_rouge([])


def test_report_serialization():
    report = corpus_rouge([("a b".split(), "a c".split())])
    d = report.to_json_dict()
    assert set(d["mean"]) == {"r1", "r2", "rl"}
    assert {"p", "r", "f1"} == set(d["mean"]["r1"])
    text = report.render_text()
    assert "r1" in text and "rl" in text


def test_tokenize_lowercase_toggle():
    assert tokenize("Foo BAR") == ["foo", "bar"]
    assert tokenize("Foo BAR", lowercase=False) == ["Foo", "BAR"]
