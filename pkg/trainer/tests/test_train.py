import math

import pytest
import torch

from nonsense_trainer.config import TrainConfig
from nonsense_trainer.data import TokenVocab, read_records, split_train_val, to_examples
from nonsense_trainer.evaluate import token_prediction_metrics
from nonsense_trainer.model import build_model
from nonsense_trainer.train import (
    finetune,
    load_checkpoint,
    pretrain,
    save_checkpoint,
    train_model,
)

FAST = dict(d_model=32, num_heads=2, ffn_dim=64, batch_size=32,
            max_source_len=64, max_target_len=16, dropout=0.0)


def test_loss_decreases_within_one_epoch(small_copy_dataset):
    cfg = TrainConfig(lr=2e-3, max_epochs=1, seed=5, **FAST)
    examples = to_examples(read_records(small_copy_dataset),
                           cfg.max_source_len, cfg.max_target_len)
    vocab = TokenVocab.build(examples)
    train_ex, val_ex = split_train_val(examples, 0.1, cfg.seed)
    model = build_model(len(vocab), cfg)
    start_acc, start_nll = token_prediction_metrics(model, val_ex, vocab, cfg)
    history = train_model(model, train_ex, val_ex, vocab, cfg, quiet=True)
    assert history[0]["val_nll"] < start_nll
    assert history[0]["train_loss"] < math.log(len(vocab)) + 0.5


def test_same_seed_same_curves(tmp_path, small_copy_dataset):
    cfg = TrainConfig(lr=1e-3, max_epochs=2, seed=9, **FAST)
    h1 = pretrain(cfg, small_copy_dataset, tmp_path / "a.ckpt", quiet=True)
    h2 = pretrain(cfg, small_copy_dataset, tmp_path / "b.ckpt", quiet=True)
    assert len(h1) == len(h2)
    for a, b in zip(h1, h2):
        assert a["train_loss"] == pytest.approx(b["train_loss"], rel=1e-6)
        assert a["val_accuracy"] == pytest.approx(b["val_accuracy"], rel=1e-6)


def test_checkpoint_roundtrip(tmp_path, small_copy_dataset):
    cfg = TrainConfig(lr=1e-3, max_epochs=1, seed=2, **FAST)
    pretrain(cfg, small_copy_dataset, tmp_path / "m.ckpt", quiet=True)
    model, vocab, loaded_cfg, history = load_checkpoint(tmp_path / "m.ckpt")
    assert loaded_cfg.d_model == cfg.d_model
    assert len(history) == 1
    examples = to_examples(read_records(small_copy_dataset),
                           cfg.max_source_len, cfg.max_target_len)[:16]
    acc, nll = token_prediction_metrics(model, examples, vocab, cfg)
    assert 0.0 <= acc <= 1.0 and nll > 0


def test_zero_epoch_finetune_preserves_metrics(tmp_path, small_copy_dataset):
    cfg = TrainConfig(lr=1e-3, max_epochs=1, seed=2, **FAST)
    pretrain(cfg, small_copy_dataset, tmp_path / "m.ckpt", quiet=True)
    finetune(cfg, tmp_path / "m.ckpt", small_copy_dataset, tmp_path / "ft.ckpt",
             epochs=0, quiet=True)
    before, vb, cfg_b, _ = load_checkpoint(tmp_path / "m.ckpt")
    after, va, cfg_a, _ = load_checkpoint(tmp_path / "ft.ckpt")
    examples = to_examples(read_records(small_copy_dataset),
                           cfg.max_source_len, cfg.max_target_len)[:32]
    m_before = token_prediction_metrics(before, examples, vb, cfg_b)
    m_after = token_prediction_metrics(after, examples, va, cfg_a)
    assert m_before == pytest.approx(m_after)


def test_random_init_differs_from_pretrained(tmp_path, small_copy_dataset,
                                             small_classify_dataset):
    cfg = TrainConfig(lr=2e-3, max_epochs=2, seed=4, **FAST)
    pretrain(cfg, small_copy_dataset, tmp_path / "m.ckpt", quiet=True)
    finetune(cfg, tmp_path / "m.ckpt", small_classify_dataset, tmp_path / "warm.ckpt",
             epochs=1, quiet=True)
    finetune(cfg, tmp_path / "m.ckpt", small_classify_dataset, tmp_path / "cold.ckpt",
             random_init=True, epochs=1, quiet=True)
    warm, vw, cw, _ = load_checkpoint(tmp_path / "warm.ckpt")
    cold, vc, cc, _ = load_checkpoint(tmp_path / "cold.ckpt")
    assert vw.tokens == vc.tokens  # same vocabulary either way
    params_differ = any(
        not torch.equal(a, b) for a, b in zip(warm.parameters(), cold.parameters())
    )
    assert params_differ


def test_vocabulary_mismatch_rejected(tmp_path, small_copy_dataset):
    cfg = TrainConfig(lr=1e-3, max_epochs=1, seed=2, **FAST)
    pretrain(cfg, small_copy_dataset, tmp_path / "m.ckpt", quiet=True)
    alien = tmp_path / "alien.jsonl"
    rows = []
    for i in range(40):
        rows.append(
            '{"id": "a-%d", "task": "demo", "source": "ALIEN%d TOKENS HERE .", '
            '"target": "ALIEN%d .", "meta": {}}' % (i, i, i)
        )
    alien.write_text("\n".join(rows) + "\n", encoding="utf-8")
    with pytest.raises(ValueError, match="vocabulary mismatch"):
        finetune(cfg, tmp_path / "m.ckpt", alien, tmp_path / "x.ckpt", quiet=True)


def test_early_stopping_restores_best(tmp_path, small_classify_dataset):
    cfg = TrainConfig(lr=2e-3, max_epochs=6, patience=2, seed=6, **FAST)
    examples = to_examples(read_records(small_classify_dataset),
                           cfg.max_source_len, cfg.max_target_len)
    vocab = TokenVocab.build(examples)
    train_ex, val_ex = split_train_val(examples, 0.15, cfg.seed)
    model = build_model(len(vocab), cfg)
    history = train_model(model, train_ex, val_ex, vocab, cfg, quiet=True)
    best = max(h["val_accuracy"] for h in history)
    acc, _ = token_prediction_metrics(model, val_ex, vocab, cfg)
    assert acc == pytest.approx(best, abs=1e-6)
