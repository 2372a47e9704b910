"""Reading the generator's dataset format and batching it for training.

The dataset interface is one JSON object per line with fields
(id, task, source, target, meta); source and target are whitespace-token
text. This module parses that format directly so the trainer depends
only on the file contract, not on the generator's internals.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

import torch

PAD, BOS, EOS, UNK = 0, 1, 2, 3
SPECIALS = ("<pad>", "<bos>", "<eos>", "<unk>")
ABLATED_SOURCE = ("<unk>",)  # constant stub shown when input is ablated


@dataclass
class Example:
    id: str
    task: str
    source: tuple[str, ...]
    target: tuple[str, ...]
    record: dict  # the raw record, kept for oracle replay files


def read_records(path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            for key in ("id", "task", "source", "target", "meta"):
                if key not in obj:
                    raise ValueError(f"{path}:{lineno}: missing field {key!r}")
            records.append(obj)
    if not records:
        raise ValueError(f"empty dataset: {path}")
    return records


def to_examples(records, max_source_len: int, max_target_len: int,
                ablate_input: bool = False) -> list[Example]:
    out = []
    for rec in records:
        source = tuple(rec["source"].split())[:max_source_len]
        if ablate_input:
            source = ABLATED_SOURCE
        out.append(
            Example(
                id=rec["id"],
                task=rec["task"],
                source=source,
                target=tuple(rec["target"].split())[:max_target_len],
                record=rec,
            )
        )
    return out


class TokenVocab:
    """Closed word-level vocabulary with reserved special ids."""

    def __init__(self, tokens: list[str]):
        if tokens[: len(SPECIALS)] != list(SPECIALS):
            tokens = list(SPECIALS) + tokens
        self.tokens = list(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}

    @classmethod
    def build(cls, examples: list[Example]) -> "TokenVocab":
        seen = set()
        for ex in examples:
            seen.update(ex.source)
            seen.update(ex.target)
        return cls(list(SPECIALS) + sorted(seen - set(SPECIALS)))

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, tokens) -> list[int]:
        return [self.index.get(t, UNK) for t in tokens]

    def decode(self, ids) -> list[str]:
        out = []
        for i in ids:
            if i == EOS:
                break
            if i in (PAD, BOS):
                continue
            out.append(self.tokens[i])
        return out

    def unknown_fraction(self, examples: list[Example]) -> float:
        total = unknown = 0
        for ex in examples:
            for t in ex.source + ex.target:
                total += 1
                unknown += t not in self.index
        return unknown / total if total else 0.0


def split_train_val(examples: list[Example], val_fraction: float, seed: int):
    order = list(range(len(examples)))
    random.Random(seed).shuffle(order)
    n_val = max(1, int(len(examples) * val_fraction))
    val_idx = set(order[:n_val])
    train = [ex for i, ex in enumerate(examples) if i not in val_idx]
    val = [ex for i, ex in enumerate(examples) if i in val_idx]
    return train, val


def encode_batch(examples: list[Example], vocab: TokenVocab, device="cpu"):
    """Pad a batch: returns (src, tgt_in, tgt_out) id tensors."""
    src_ids = [vocab.encode(ex.source) for ex in examples]
    tgt_ids = [vocab.encode(ex.target) for ex in examples]
    max_src = max(len(s) for s in src_ids)
    max_tgt = max(len(t) for t in tgt_ids) + 1  # room for BOS/EOS shift
    src = torch.full((len(examples), max_src), PAD, dtype=torch.long)
    tgt_in = torch.full((len(examples), max_tgt), PAD, dtype=torch.long)
    tgt_out = torch.full((len(examples), max_tgt), PAD, dtype=torch.long)
    for i, (s, t) in enumerate(zip(src_ids, tgt_ids)):
        src[i, : len(s)] = torch.tensor(s, dtype=torch.long)
        tgt_in[i, 0] = BOS
        tgt_in[i, 1 : len(t) + 1] = torch.tensor(t, dtype=torch.long)
        tgt_out[i, : len(t)] = torch.tensor(t, dtype=torch.long)
        tgt_out[i, len(t)] = EOS
    return src.to(device), tgt_in.to(device), tgt_out.to(device)


def iter_batches(examples: list[Example], batch_size: int, rng: random.Random | None = None):
    """Sequential batches, or shuffled length-bucketed batches when rng is given.

    Training (rng set): shuffled pools of 16 batches are length-sorted
    internally and the batch order reshuffled, so batches stay mixed
    while similar lengths travel together, limiting padding waste.
    Evaluation (rng None): plain chunks in the original example order.
    """
    if rng is None:
        for start in range(0, len(examples), batch_size):
            yield examples[start : start + batch_size]
        return
    order = list(range(len(examples)))
    rng.shuffle(order)
    pool_size = batch_size * 16
    batches = []
    for pool_start in range(0, len(order), pool_size):
        pool = order[pool_start : pool_start + pool_size]
        pool.sort(key=lambda i: len(examples[i].source))
        for start in range(0, len(pool), batch_size):
            batches.append([examples[i] for i in pool[start : start + batch_size]])
    rng.shuffle(batches)
    yield from batches
