"""Evaluation: next-token metrics, decoding, oracle accuracy, ROUGE.

Next-token accuracy and negative log-likelihood are averaged per
summary over its decoding timesteps, then averaged across summaries.
Oracle accuracy (the fraction of decoded outputs the task oracle
accepts) is judged by the factory's own `verify` command so there is a
single acceptance code path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import torch
import torch.nn.functional as F

from .config import TrainConfig
from .data import BOS, EOS, PAD, Example, TokenVocab, encode_batch, iter_batches
from .factory import rouge_means, verify_report


@dataclass
class EvalMetrics:
    next_token_accuracy: float
    nll: float
    pr_percent: float | None = None
    rouge: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "next_token_accuracy": self.next_token_accuracy,
            "nll": self.nll,
        }
        if self.pr_percent is not None:
            out["pr_percent"] = self.pr_percent
        if self.rouge is not None:
            out["rouge"] = self.rouge
        return out


@torch.no_grad()
def token_prediction_metrics(model, examples: list[Example], vocab: TokenVocab,
                             cfg: TrainConfig) -> tuple[float, float]:
    """(accuracy, NLL) under teacher forcing, averaged per summary first."""
    model.eval()
    accs: list[float] = []
    nlls: list[float] = []
    for batch in iter_batches(examples, cfg.batch_size):
        src, tgt_in, tgt_out = encode_batch(batch, vocab)
        logits = model(src, tgt_in)
        logprobs = F.log_softmax(logits, dim=-1)
        picked = logprobs.gather(-1, tgt_out.unsqueeze(-1)).squeeze(-1)
        correct = logits.argmax(dim=-1).eq(tgt_out)
        mask = tgt_out.ne(PAD)
        steps = mask.sum(dim=1).clamp(min=1)
        accs.extend(((correct & mask).sum(dim=1) / steps).tolist())
        nlls.extend(((-picked * mask).sum(dim=1) / steps).tolist())
    if not accs:
        raise ValueError("no examples to evaluate")
    return sum(accs) / len(accs), sum(nlls) / len(nlls)


@torch.no_grad()
def greedy_decode(model, src: torch.Tensor, min_len: int, max_len: int) -> list[list[int]]:
    """Batched greedy decoding; EOS is barred before min_len steps."""
    model.eval()
    batch = src.size(0)
    memory, pad_mask = model.encode(src)
    tgt = torch.full((batch, 1), BOS, dtype=torch.long)
    finished = torch.zeros(batch, dtype=torch.bool)
    for step in range(max_len):
        logits = model.decode(tgt, memory, pad_mask)[:, -1, :]
        if step < min_len:
            logits[:, EOS] = float("-inf")
        logits[:, PAD] = float("-inf")
        logits[:, BOS] = float("-inf")
        next_ids = logits.argmax(dim=-1)
        next_ids[finished] = PAD
        tgt = torch.cat([tgt, next_ids.unsqueeze(1)], dim=1)
        finished |= next_ids.eq(EOS)
        if bool(finished.all()):
            break
    return [row[1:].tolist() for row in tgt]


@torch.no_grad()
def beam_decode(model, src_row: torch.Tensor, beam_size: int,
                min_len: int, max_len: int) -> list[int]:
    """Length-normalized beam search for one example."""
    model.eval()
    memory, pad_mask = model.encode(src_row.unsqueeze(0))
    beams: list[tuple[float, list[int], bool]] = [(0.0, [BOS], False)]
    for step in range(max_len):
        candidates: list[tuple[float, list[int], bool]] = []
        for score, ids, done in beams:
            if done:
                candidates.append((score, ids, True))
                continue
            tgt = torch.tensor([ids], dtype=torch.long)
            logits = model.decode(tgt, memory, pad_mask)[0, -1, :]
            if step < min_len:
                logits[EOS] = float("-inf")
            logits[PAD] = float("-inf")
            logits[BOS] = float("-inf")
            logprobs = F.log_softmax(logits, dim=-1)
            top = torch.topk(logprobs, beam_size)
            for lp, tok in zip(top.values.tolist(), top.indices.tolist()):
                candidates.append((score + lp, ids + [tok], tok == EOS))
        candidates.sort(key=lambda c: c[0] / (len(c[1]) - 1), reverse=True)
        beams = candidates[:beam_size]
        if all(done for _, _, done in beams):
            break
    best = max(beams, key=lambda c: c[0] / (len(c[1]) - 1))
    ids = best[1][1:]
    return ids[: ids.index(EOS)] if EOS in ids else ids


def decode_examples(model, examples: list[Example], vocab: TokenVocab,
                    cfg: TrainConfig, min_len: int = 1, max_len: int = 64,
                    beam_size: int | None = None) -> list[str]:
    """Decoded summaries as whitespace-token text, aligned with examples."""
    texts: list[str] = []
    min_len = max(1, min_len)
    if beam_size:
        for ex in examples:
            src = torch.tensor(vocab.encode(ex.source), dtype=torch.long)
            ids = beam_decode(model, src, beam_size, min_len, max_len)
            texts.append(" ".join(vocab.decode(ids)) or "<empty>")
        return texts
    for batch in iter_batches(examples, cfg.batch_size):
        src, _tgt_in, _tgt_out = encode_batch(batch, vocab)
        for ids in greedy_decode(model, src, min_len, max_len):
            texts.append(" ".join(vocab.decode(ids)) or "<empty>")
    return texts


def oracle_accuracy(examples: list[Example], decoded: list[str], workdir) -> float:
    """Pr%: decoded outputs written back into records, judged by `verify`."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    decoded_path = workdir / "decoded.jsonl"
    with open(decoded_path, "w", encoding="utf-8") as fh:
        for ex, text in zip(examples, decoded):
            rec = dict(ex.record)
            rec["target"] = text
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    report = verify_report(decoded_path, workdir)
    return 100.0 * report["passed"] / max(1, report["total"])


def rouge_against_references(examples: list[Example], decoded: list[str],
                             workdir) -> dict:
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    cand = workdir / "candidates.txt"
    ref = workdir / "references.txt"
    cand.write_text("\n".join(decoded) + "\n", encoding="utf-8")
    ref.write_text(
        "\n".join(" ".join(ex.target) for ex in examples) + "\n", encoding="utf-8"
    )
    return rouge_means(cand, ref, workdir)


def evaluate(model, examples: list[Example], vocab: TokenVocab, cfg: TrainConfig,
             workdir, min_decode_len: int = 1, max_decode_len: int = 64,
             beam_size: int | None = None, with_pr: bool = True,
             with_rouge: bool = False) -> EvalMetrics:
    accuracy, nll = token_prediction_metrics(model, examples, vocab, cfg)
    metrics = EvalMetrics(next_token_accuracy=accuracy, nll=nll)
    if with_pr or with_rouge:
        decoded = decode_examples(model, examples, vocab, cfg,
                                  min_decode_len, max_decode_len, beam_size)
        if with_pr:
            metrics.pr_percent = oracle_accuracy(examples, decoded, workdir)
        if with_rouge:
            metrics.rouge = rouge_against_references(examples, decoded, workdir)
    return metrics


def uniform_nll(vocab_size: int) -> float:
    """NLL of a predictor that spreads mass uniformly: ln(vocab size)."""
    return math.log(vocab_size)
