"""Training loops, early stopping, and checkpoints."""

from __future__ import annotations

import copy
import random
from pathlib import Path

import torch
from torch import nn

from .config import TrainConfig
from .data import (
    PAD,
    Example,
    TokenVocab,
    encode_batch,
    iter_batches,
    read_records,
    split_train_val,
    to_examples,
)
from .evaluate import token_prediction_metrics
from .model import MiniSeq2Seq, build_model

VOCAB_MISMATCH_LIMIT = 0.2  # fraction of unknown tokens that flags a bad pairing


def train_model(
    model: MiniSeq2Seq,
    train_examples: list[Example],
    val_examples: list[Example],
    vocab: TokenVocab,
    cfg: TrainConfig,
    epochs: int | None = None,
    quiet: bool = False,
) -> list[dict]:
    """Teacher-forced training with early stopping on validation accuracy.

    Returns the per-epoch history; the model is left holding the weights
    of its best validation epoch.
    """
    max_epochs = cfg.max_epochs if epochs is None else epochs
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.lr)
    loss_fn = nn.CrossEntropyLoss(ignore_index=PAD)
    history: list[dict] = []
    best_acc = -1.0
    best_state = copy.deepcopy(model.state_dict())
    stale = 0
    for epoch in range(max_epochs):
        model.train()
        rng = random.Random(cfg.seed * 100003 + epoch)
        total_loss = 0.0
        batches = 0
        for batch in iter_batches(train_examples, cfg.batch_size, rng):
            src, tgt_in, tgt_out = encode_batch(batch, vocab)
            logits = model(src, tgt_in)
            loss = loss_fn(logits.reshape(-1, logits.size(-1)), tgt_out.reshape(-1))
            optimizer.zero_grad()
            loss.backward()
            nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip)
            optimizer.step()
            total_loss += loss.item()
            batches += 1
        val_acc, val_nll = token_prediction_metrics(model, val_examples, vocab, cfg)
        history.append(
            {
                "epoch": epoch,
                "train_loss": total_loss / max(1, batches),
                "val_accuracy": val_acc,
                "val_nll": val_nll,
            }
        )
        if not quiet:
            print(
                f"epoch {epoch}: loss={history[-1]['train_loss']:.4f} "
                f"val_acc={val_acc:.4f} val_nll={val_nll:.4f}"
            )
        if val_acc > best_acc:
            best_acc = val_acc
            best_state = copy.deepcopy(model.state_dict())
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    model.load_state_dict(best_state)
    return history


def save_checkpoint(path, model: MiniSeq2Seq, vocab: TokenVocab,
                    cfg: TrainConfig, history: list[dict]) -> None:
    torch.save(
        {
            "model_state": model.state_dict(),
            "vocab_tokens": vocab.tokens,
            "config": cfg.to_dict(),
            "history": history,
        },
        path,
    )


def load_checkpoint(path):
    payload = torch.load(path, map_location="cpu", weights_only=False)
    cfg = TrainConfig.from_dict(payload["config"])
    vocab = TokenVocab(payload["vocab_tokens"])
    model = build_model(len(vocab), cfg)
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model, vocab, cfg, payload["history"]


def pretrain(cfg: TrainConfig, dataset_path, out_path,
             epochs: int | None = None, quiet: bool = False) -> list[dict]:
    records = read_records(dataset_path)
    examples = to_examples(records, cfg.max_source_len, cfg.max_target_len,
                           ablate_input=cfg.ablate_input)
    vocab = TokenVocab.build(examples)
    train_ex, val_ex = split_train_val(examples, cfg.val_fraction, cfg.seed)
    torch.manual_seed(cfg.seed)
    model = build_model(len(vocab), cfg)
    history = train_model(model, train_ex, val_ex, vocab, cfg,
                          epochs=epochs, quiet=quiet)
    save_checkpoint(out_path, model, vocab, cfg, history)
    return history


def finetune(cfg: TrainConfig, checkpoint_path, dataset_path, out_path,
             random_init: bool = False, epochs: int | None = None,
             quiet: bool = False) -> list[dict]:
    """Continue training a checkpoint on a new dataset.

    The checkpoint supplies the architecture and vocabulary; `cfg`
    supplies the optimization knobs. With random_init the weights are
    re-drawn (the same-architecture no-pretraining baseline).
    """
    model, vocab, ckpt_cfg, _ = load_checkpoint(checkpoint_path)
    run_cfg = TrainConfig.from_dict({**ckpt_cfg.to_dict(), **{
        "lr": cfg.lr,
        "batch_size": cfg.batch_size,
        "max_epochs": cfg.max_epochs,
        "patience": cfg.patience,
        "grad_clip": cfg.grad_clip,
        "val_fraction": cfg.val_fraction,
        "seed": cfg.seed,
        "ablate_input": cfg.ablate_input,
    }})
    if random_init:
        model = build_model(len(vocab), run_cfg)
    records = read_records(dataset_path)
    examples = to_examples(records, run_cfg.max_source_len, run_cfg.max_target_len,
                           ablate_input=run_cfg.ablate_input)
    unknown = vocab.unknown_fraction(examples)
    if unknown > VOCAB_MISMATCH_LIMIT:
        raise ValueError(
            f"vocabulary mismatch: {unknown:.0%} of dataset tokens are unknown "
            f"to the checkpoint vocabulary"
        )
    history: list[dict] = []
    if epochs != 0:
        train_ex, val_ex = split_train_val(examples, run_cfg.val_fraction, run_cfg.seed)
        torch.manual_seed(run_cfg.seed)
        history = train_model(model, train_ex, val_ex, vocab, run_cfg,
                              epochs=epochs, quiet=quiet)
    save_checkpoint(out_path, model, vocab, run_cfg, history)
    return history
