import json

import pytest
import torch

from nonsense_trainer.data import (
    BOS,
    EOS,
    PAD,
    TokenVocab,
    encode_batch,
    iter_batches,
    read_records,
    split_train_val,
    to_examples,
)


def test_read_records_validates(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "x"}\n', encoding="utf-8")
    with pytest.raises(ValueError, match="missing field"):
        read_records(path)
    path.write_text("not json\n", encoding="utf-8")
    with pytest.raises(ValueError, match="invalid JSON"):
        read_records(path)
    path.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="empty"):
        read_records(path)


def test_read_real_dataset(small_copy_dataset):
    records = read_records(small_copy_dataset)
    assert len(records) == 300
    assert all(r["task"] == "CopyKwdOneSentence" for r in records)


def test_examples_and_vocab(small_copy_dataset):
    records = read_records(small_copy_dataset)
    examples = to_examples(records, 96, 16)
    vocab = TokenVocab.build(examples)
    assert vocab.tokens[:4] == ["<pad>", "<bos>", "<eos>", "<unk>"]
    sample = examples[0].source
    assert vocab.decode(vocab.encode(sample)) == list(sample)
    assert vocab.encode(["never-seen-token"]) == [3]


def test_truncation_limits(small_copy_dataset):
    records = read_records(small_copy_dataset)
    examples = to_examples(records, 10, 4)
    assert all(len(ex.source) <= 10 and len(ex.target) <= 4 for ex in examples)


def test_ablation_replaces_sources(small_copy_dataset):
    records = read_records(small_copy_dataset)
    examples = to_examples(records, 96, 16, ablate_input=True)
    assert all(ex.source == ("<unk>",) for ex in examples)
    assert all(ex.target for ex in examples)


def test_split_is_deterministic_and_disjoint(small_copy_dataset):
    records = read_records(small_copy_dataset)
    examples = to_examples(records, 96, 16)
    a_train, a_val = split_train_val(examples, 0.1, 7)
    b_train, b_val = split_train_val(examples, 0.1, 7)
    assert [e.id for e in a_val] == [e.id for e in b_val]
    assert len(a_val) == 30
    assert {e.id for e in a_train} | {e.id for e in a_val} == {e.id for e in examples}
    assert not {e.id for e in a_train} & {e.id for e in a_val}


def test_encode_batch_shapes(small_copy_dataset):
    records = read_records(small_copy_dataset)
    examples = to_examples(records, 96, 16)[:8]
    vocab = TokenVocab.build(examples)
    src, tgt_in, tgt_out = encode_batch(examples, vocab)
    assert src.shape[0] == tgt_in.shape[0] == tgt_out.shape[0] == 8
    assert tgt_in.shape == tgt_out.shape
    assert (tgt_in[:, 0] == BOS).all()
    for i, ex in enumerate(examples):
        n = len(ex.target)
        assert tgt_out[i, n] == EOS
        assert (tgt_out[i, n + 1 :] == PAD).all()
        assert vocab.decode(tgt_out[i].tolist()) == list(ex.target)


def test_iter_batches_covers_everything(small_copy_dataset):
    import random

    records = read_records(small_copy_dataset)
    examples = to_examples(records, 96, 16)
    seen = []
    for batch in iter_batches(examples, 32, random.Random(3)):
        assert len(batch) <= 32
        seen.extend(ex.id for ex in batch)
    assert sorted(seen) == sorted(ex.id for ex in examples)


def test_unknown_fraction(small_copy_dataset):
    records = read_records(small_copy_dataset)
    examples = to_examples(records, 96, 16)
    vocab = TokenVocab.build(examples)
    assert vocab.unknown_fraction(examples) == 0.0
    half_vocab = TokenVocab(vocab.tokens[: len(vocab.tokens) // 2])
    assert vocab.unknown_fraction(examples) < half_vocab.unknown_fraction(examples)
