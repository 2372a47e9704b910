from collections import Counter

import pytest

from nonsense_factory.corpus import DocPolicy, Document
from nonsense_factory.elementary import TaskRecord, compute_gold
from nonsense_factory.ensemble import (
    DEFAULT_ELIGIBLE,
    EXCLUDED_FROM_ENSEMBLE,
    EnsembleConfig,
    compose,
    verify_instance,
)
from nonsense_factory.rng import derive_rng


def test_default_eligible_set():
    assert len(DEFAULT_ELIGIBLE) == 16
    assert not set(DEFAULT_ELIGIBLE) & set(EXCLUDED_FROM_ENSEMBLE)


def test_config_validation():
    with pytest.raises(ValueError):
        EnsembleConfig(eligible_kinds=("CopyQuoted",), tasks_per_instance=2)
    with pytest.raises(ValueError):
        EnsembleConfig(eligible_kinds=("NoSuchKind",))
    with pytest.raises(ValueError):
        EnsembleConfig(tasks_per_instance=0)
    # replacement allows more draws than kinds
    EnsembleConfig(eligible_kinds=("CopyQuoted", "TruncateSentence"),
                   tasks_per_instance=3, replacement=True)


def test_composed_instances_verify(scheme, vocab):
    cfg = EnsembleConfig()
    for i in range(800):
        rng = derive_rng(50, "ens", i)
        inst = compose(rng, scheme, cfg, vocab)
        assert verify_instance(inst.source, inst.target, inst.meta), i


def test_excluded_kinds_never_appear(scheme, vocab):
    cfg = EnsembleConfig()
    seen = set()
    for i in range(800):
        rng = derive_rng(51, "ens", i)
        inst = compose(rng, scheme, cfg, vocab)
        for rec in inst.meta["records"]:
            seen.add(rec["kind"])
    assert not seen & set(EXCLUDED_FROM_ENSEMBLE)
    assert seen <= set(DEFAULT_ELIGIBLE)


def test_kinds_are_distinct_within_instance(scheme, vocab):
    cfg = EnsembleConfig()
    for i in range(200):
        rng = derive_rng(52, "ens", i)
        inst = compose(rng, scheme, cfg, vocab)
        kinds = [rec["kind"] for rec in inst.meta["records"]]
        assert len(kinds) == 3
        assert len(set(kinds)) == 3


def test_footprints_are_disjoint(scheme, vocab):
    cfg = EnsembleConfig()
    for i in range(300):
        rng = derive_rng(53, "ens", i)
        inst = compose(rng, scheme, cfg, vocab)
        records = [TaskRecord.from_meta(m) for m in inst.meta["records"]]
        seen: set[int] = set()
        for rec in records:
            fp = rec.footprint()
            assert not fp & seen
            seen |= fp


def test_target_is_concatenation_of_golds(scheme, vocab):
    cfg = EnsembleConfig()
    for i in range(200):
        rng = derive_rng(54, "ens", i)
        inst = compose(rng, scheme, cfg, vocab)
        doc = Document.from_tokens(inst.source)
        expected: list[str] = []
        for m in inst.meta["records"]:
            expected.extend(compute_gold(TaskRecord.from_meta(m), doc))
        assert list(inst.target) == expected


def test_corrupted_targets_rejected(scheme, vocab):
    cfg = EnsembleConfig()
    rng = derive_rng(55, "ens", 0)
    inst = compose(rng, scheme, cfg, vocab)

    # a single altered token fails
    bad = list(inst.target)
    bad[0] = "zzz" if bad[0] != "zzz" else "aaa"
    assert not verify_instance(inst.source, tuple(bad), inst.meta)

    # swapping whole segments across deterministic kinds fails
    doc = Document.from_tokens(inst.source)
    golds = [compute_gold(TaskRecord.from_meta(m), doc) for m in inst.meta["records"]]
    swapped = tuple(t for g in (golds[1], golds[0], golds[2]) for t in g)
    assert not verify_instance(inst.source, swapped, inst.meta)

    # truncation fails
    assert not verify_instance(inst.source, inst.target[:-1], inst.meta)
    assert not verify_instance(inst.source, inst.target + ("aaa",), inst.meta)


def test_kind_marginal_roughly_uniform(scheme, vocab):
    cfg = EnsembleConfig()
    n = 2000
    counts = Counter()
    for i in range(n):
        rng = derive_rng(56, "marginal", i)
        inst = compose(rng, scheme, cfg, vocab)
        for rec in inst.meta["records"]:
            counts[rec["kind"]] += 1
    p = 3 / 16
    sigma = (n * p * (1 - p)) ** 0.5
    for kind in DEFAULT_ELIGIBLE:
        assert abs(counts[kind] - n * p) <= 4 * sigma, (kind, counts[kind])


def test_trigger_material_identifies_sampled_kinds(scheme, vocab):
    # namespaces: keyword bands, markers, commas, numbers, class keywords.
    # classed keywords are shared between two kinds and numbers between
    # two kinds, so those assert at the namespace-union level.
    band_kinds = {
        "MajorityKeyword",
        "CopyKwdOneSentence",
        "CopyKwdMultipleSentInOrder",
        "CopyKwdMultipleSentSorted",
        "CopyKwdMultipleSentShuffled",
        "JoinClauses",
    }
    cfg = EnsembleConfig()
    class_members = {
        m for c in scheme.category_classes for m in scheme.classed_keywords[c]
    }
    for i in range(300):
        rng = derive_rng(57, "sig", i)
        inst = compose(rng, scheme, cfg, vocab)
        kinds = {rec["kind"] for rec in inst.meta["records"]}
        tokens = set(inst.source)
        for kind in band_kinds:
            assert (bool(set(scheme.band(kind)) & tokens)) == (kind in kinds), kind
        assert (scheme.bullet_marker in tokens) == ("CopyBulleted" in kinds)
        assert (scheme.quote_open in tokens) == ("CopyQuoted" in kinds)
        assert (scheme.cutoff_keyword in tokens) == ("TruncateSentence" in kinds)
        assert (bool(set(scheme.synonyms) & tokens)) == ("ParaphraseWords" in kinds)
        assert (scheme.numeric_trigger in tokens) == bool(
            kinds & {"ThresholdNumber", "LargestNumber"}
        )
        assert (bool(class_members & tokens)) == bool(
            kinds & {"ReplaceClassKeyword", "TopicSegregation"}
        )
        assert ("," in tokens) == ("BreakClauses" in kinds)


def test_compose_with_pinned_document(scheme, vocab):
    policy = DocPolicy()
    rng = derive_rng(58, "pin", 0)
    doc = policy.sample(rng, vocab)
    inst = compose(rng, scheme, EnsembleConfig(), vocab, policy, doc=doc)
    assert verify_instance(inst.source, inst.target, inst.meta)
    # source must be the pinned document plus planted material
    assert Document.from_tokens(inst.source).sentence_count == doc.sentence_count
