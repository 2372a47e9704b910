import pytest

from nonsense_factory.corpus import Document, Sentence, sample_document_by_tokens
from nonsense_factory.denoising import (
    MDG,
    MDG_ADJUSTED,
    NSG,
    SR,
    SR_ADJUSTED,
    MaskConfig,
    apply_mask,
    make_mdg,
    make_mdg_adjusted,
    make_nsg,
    make_sr,
    make_sr_adjusted,
    restoring_indices,
    sample_disarranged_order,
    split_boundary,
    verify_denoising_instance,
)
from nonsense_factory.rng import derive_rng


def doc_of(*sentences):
    return Document(tuple(Sentence(tuple(words.split())) for words in sentences))


def test_nsg_even_split():
    doc = doc_of("a b c d e", "f g h i j", "k l m n o", "p q r s t")
    inst = make_nsg(doc)
    assert inst.source == tuple("a b c d e . f g h i j .".split())
    assert inst.target == tuple("k l m n o . p q r s t .".split())
    assert inst.meta["split_sentence"] == 2


def test_nsg_two_sentences():
    doc = doc_of("a b c d e", "f g h i j")
    inst = make_nsg(doc)
    assert inst.source == tuple("a b c d e .".split())
    assert inst.target == tuple("f g h i j .".split())


def test_nsg_partition_property(vocab):
    for i in range(50):
        rng = derive_rng(13, "nsg", i)
        doc = sample_document_by_tokens(rng, vocab)
        inst = make_nsg(doc)
        assert list(inst.source) + list(inst.target) == doc.tokens()
        assert inst.source and inst.target


def test_nsg_tie_prefers_earlier_boundary():
    # boundaries at 6 and 12 of 18 tokens are equally far from 9
    doc = doc_of("a b c d e", "f g h i j", "k l m n o")
    assert split_boundary(doc) == 1


def test_nsg_single_sentence_rejected():
    with pytest.raises(ValueError):
        make_nsg(doc_of("a b c"))


def test_sr_properties(vocab):
    for i in range(100):
        rng = derive_rng(14, "sr", i)
        doc = sample_document_by_tokens(rng, vocab)
        inst = make_sr(rng, doc)
        order = inst.meta["order"]
        assert sorted(order) == list(range(doc.sentence_count))
        assert order != sorted(order)  # identity resampled away
        shuffled = Document.from_tokens(inst.source)
        # multiset of sentences preserved
        assert sorted(s.tokens() for s in shuffled.sentences) == sorted(
            s.tokens() for s in doc.sentences
        )
        # sorting source sentences by their original index restores the target
        restored = [None] * len(order)
        for j, original in enumerate(order):
            restored[original] = shuffled.sentences[j]
        assert Document(tuple(restored)).tokens() == list(inst.target)
        assert list(inst.target) == doc.tokens()


def test_sr_adjusted_hand_example():
    # original [A, B, C] presented as [C, A, B]: copy positions 2 3 1
    assert restoring_indices([2, 0, 1]) == ["2", "3", "1"]


def test_sr_adjusted_inverse_property(vocab):
    for i in range(100):
        rng = derive_rng(15, "sra", i)
        doc = sample_document_by_tokens(rng, vocab)
        inst = make_sr_adjusted(rng, doc)
        shuffled = Document.from_tokens(inst.source)
        picked = [shuffled.sentences[int(tok) - 1] for tok in inst.target]
        assert Document(tuple(picked)).tokens() == doc.tokens()
        assert list(inst.target) != [str(k + 1) for k in range(len(inst.target))]


def test_disarranged_order_never_identity():
    rng = derive_rng(16, "perm", 0)
    for n in (2, 3, 5):
        for _ in range(50):
            assert sample_disarranged_order(rng, n) != list(range(n))


def test_mask_span_length():
    assert MaskConfig(mask_fraction=0.15).span_length(512) == 77
    assert MaskConfig(mask_fraction=0.01).span_length(10) == 1  # floor of one token
    with pytest.raises(ValueError):
        MaskConfig(mask_fraction=0.0)
    with pytest.raises(ValueError):
        MaskConfig(mask_fraction=1.0)


def test_apply_mask_hand_example():
    tokens = list("abcdefghij")
    cfg = MaskConfig(mask_token="[MASK]")
    masked = apply_mask(tokens, 3, 3, cfg)
    assert masked == ("a", "b", "c", "[MASK]", "[MASK]", "[MASK]", "g", "h", "i", "j")
    collapsed = apply_mask(tokens, 3, 3, MaskConfig(per_token=False))
    assert collapsed == ("a", "b", "c", "[MASK]", "g", "h", "i", "j")


def test_mdg_properties(vocab):
    cfg = MaskConfig()
    for i in range(100):
        rng = derive_rng(17, "mdg", i)
        doc = sample_document_by_tokens(rng, vocab)
        inst = make_mdg(rng, doc, cfg)
        tokens = doc.tokens()
        start, length = inst.meta["mask_start"], inst.meta["mask_len"]
        assert length == max(1, int(0.15 * len(tokens) + 0.5))
        assert list(inst.target) == tokens
        # non-masked positions match the target
        for pos, tok in enumerate(inst.source):
            if not start <= pos < start + length:
                assert tok == tokens[pos]
        # exactly one maximal run of mask tokens
        runs = 0
        prev = False
        for tok in inst.source:
            is_mask = tok == "[MASK]"
            if is_mask and not prev:
                runs += 1
            prev = is_mask
        assert runs == 1


def test_mdg_adjusted_splice(vocab):
    cfg = MaskConfig()
    for i in range(100):
        rng = derive_rng(18, "mdga", i)
        doc = sample_document_by_tokens(rng, vocab)
        inst = make_mdg_adjusted(rng, doc, cfg)
        start = inst.meta["mask_start"]
        spliced = (
            list(inst.source[:start])
            + list(inst.target)
            + list(inst.source[start + len(inst.target) :])
        )
        assert spliced == doc.tokens()
        assert len(inst.target) == inst.meta["mask_len"]


def test_mdg_span_cannot_cover_document():
    doc = doc_of("a b c")
    rng = derive_rng(19, "cover", 0)
    with pytest.raises(ValueError):
        make_mdg(rng, doc, MaskConfig(mask_fraction=0.999))


def test_verify_accepts_fresh_instances(vocab):
    cfg = MaskConfig()
    for i in range(50):
        rng = derive_rng(20, "verify", i)
        doc = sample_document_by_tokens(rng, vocab)
        for inst in (
            make_nsg(doc),
            make_sr(rng, doc),
            make_sr_adjusted(rng, doc),
            make_mdg(rng, doc, cfg),
            make_mdg_adjusted(rng, doc, cfg),
        ):
            assert verify_denoising_instance(inst.task, inst.source, inst.target, inst.meta)


def test_verify_rejects_corruption(vocab):
    rng = derive_rng(21, "corrupt", 0)
    doc = sample_document_by_tokens(rng, vocab)

    sr = make_sr(rng, doc)
    bad_target = list(sr.target)
    bad_target[0], bad_target[1] = bad_target[1], bad_target[0]
    assert not verify_denoising_instance(SR, sr.source, tuple(bad_target), sr.meta)

    sra = make_sr_adjusted(rng, doc)
    assert not verify_denoising_instance(SR_ADJUSTED, sra.source, sra.target[:-1], sra.meta)

    mdg = make_mdg(rng, doc)
    bad = list(mdg.target)
    bad[mdg.meta["mask_start"]] = "zzz"
    assert not verify_denoising_instance(MDG, mdg.source, tuple(bad), mdg.meta)

    mdga = make_mdg_adjusted(rng, doc)
    assert not verify_denoising_instance(
        MDG_ADJUSTED, mdga.source, mdga.target + ("aaa",), mdga.meta
    )

    nsg = make_nsg(doc)
    assert not verify_denoising_instance(NSG, nsg.source, (), nsg.meta)
    assert verify_denoising_instance(NSG, nsg.source, nsg.target, nsg.meta)
