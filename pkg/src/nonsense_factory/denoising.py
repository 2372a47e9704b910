"""Denoising pretraining tasks over base documents.

Five kinds: next-half generation (nsg), sentence reordering (sr),
contiguous-span masking (mdg), and the adjusted variants that strip the
copying component (sr-adjusted emits only the reordering indices,
mdg-adjusted emits only the masked span). Instance metadata always
carries enough to check a candidate target against the source exactly,
except for nsg whose target is independent of the source by design.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import SENTENCE_TERMINATORS, Document
from .dataset import TaskInstance

NSG = "nsg"
SR = "sr"
SR_ADJUSTED = "sr-adjusted"
MDG = "mdg"
MDG_ADJUSTED = "mdg-adjusted"

DENOISING_KINDS = (NSG, SR, SR_ADJUSTED, MDG, MDG_ADJUSTED)

MASK_TOKEN = "[MASK]"


@dataclass(frozen=True)
class MaskConfig:
    mask_fraction: float = 0.15
    mask_token: str = MASK_TOKEN
    per_token: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.mask_fraction < 1.0:
            raise ValueError(f"mask_fraction {self.mask_fraction} outside (0, 1)")

    def span_length(self, token_count: int) -> int:
        # round half up, never below one token
        return max(1, int(self.mask_fraction * token_count + 0.5))


def split_boundary(doc: Document) -> int:
    """Sentence boundary whose leading token count is closest to half.

    Returns k meaning "split after sentence k" (1-based); ties pick the
    earlier boundary.
    """
    total = doc.token_count
    best_k, best_d = 1, None
    cum = 0
    for k, sent in enumerate(doc.sentences[:-1], start=1):
        cum += sent.token_count
        d = abs(2 * cum - total)
        if best_d is None or d < best_d:
            best_k, best_d = k, d
    return best_k


def make_nsg(doc: Document, instance_id: str = "") -> TaskInstance:
    if doc.sentence_count < 2:
        raise ValueError("nsg needs at least 2 sentences")
    k = split_boundary(doc)
    head = Document(doc.sentences[:k])
    tail = Document(doc.sentences[k:])
    return TaskInstance(
        id=instance_id,
        task=NSG,
        source=tuple(head.tokens()),
        target=tuple(tail.tokens()),
        meta={"split_sentence": k},
    )


def sample_disarranged_order(rng: random.Random, n: int) -> list[int]:
    """Uniform non-identity permutation (resample the identity)."""
    order = list(range(n))
    while True:
        rng.shuffle(order)
        if order != sorted(order):
            return order


def restoring_indices(order: list[int]) -> list[str]:
    """1-based positions to copy from, restoring the original sentence order.

    order[j] = original index of the sentence shown at position j; the
    k-th emitted index points at the presented position of original
    sentence k.
    """
    inverse = [0] * len(order)
    for j, original in enumerate(order):
        inverse[original] = j
    return [str(j + 1) for j in inverse]


def _shuffled_source(rng: random.Random, doc: Document) -> tuple[list[int], tuple[str, ...]]:
    if doc.sentence_count < 2:
        raise ValueError("sentence reordering needs at least 2 sentences")
    order = sample_disarranged_order(rng, doc.sentence_count)
    shuffled = Document(tuple(doc.sentences[i] for i in order))
    return order, tuple(shuffled.tokens())


def make_sr(rng: random.Random, doc: Document, instance_id: str = "") -> TaskInstance:
    order, source = _shuffled_source(rng, doc)
    return TaskInstance(
        id=instance_id,
        task=SR,
        source=source,
        target=tuple(doc.tokens()),
        meta={"order": order},
    )


def make_sr_adjusted(rng: random.Random, doc: Document, instance_id: str = "") -> TaskInstance:
    order, source = _shuffled_source(rng, doc)
    return TaskInstance(
        id=instance_id,
        task=SR_ADJUSTED,
        source=source,
        target=tuple(restoring_indices(order)),
        meta={"order": order},
    )


def apply_mask(
    tokens: list[str], start: int, length: int, cfg: MaskConfig
) -> tuple[str, ...]:
    """Replace tokens[start:start+length] with mask tokens."""
    if length < 1 or start < 0 or start + length > len(tokens):
        raise ValueError("mask span outside token stream")
    span = [cfg.mask_token] * length if cfg.per_token else [cfg.mask_token]
    return tuple(tokens[:start] + span + tokens[start + length :])


def _sample_mask(
    rng: random.Random, doc: Document, cfg: MaskConfig
) -> tuple[list[str], int, int]:
    tokens = doc.tokens()
    length = cfg.span_length(len(tokens))
    if length >= len(tokens):
        raise ValueError(
            f"mask span {length} would cover the whole {len(tokens)}-token document"
        )
    start = rng.randint(0, len(tokens) - length)
    return tokens, start, length


def make_mdg(
    rng: random.Random, doc: Document, cfg: MaskConfig | None = None, instance_id: str = ""
) -> TaskInstance:
    cfg = cfg or MaskConfig()
    tokens, start, length = _sample_mask(rng, doc, cfg)
    return TaskInstance(
        id=instance_id,
        task=MDG,
        source=apply_mask(tokens, start, length, cfg),
        target=tuple(tokens),
        meta={
            "mask_start": start,
            "mask_len": length,
            "per_token": cfg.per_token,
            "mask_token": cfg.mask_token,
            "mask_fill": tokens[start : start + length],
        },
    )


def make_mdg_adjusted(
    rng: random.Random, doc: Document, cfg: MaskConfig | None = None, instance_id: str = ""
) -> TaskInstance:
    cfg = cfg or MaskConfig()
    tokens, start, length = _sample_mask(rng, doc, cfg)
    return TaskInstance(
        id=instance_id,
        task=MDG_ADJUSTED,
        source=apply_mask(tokens, start, length, cfg),
        target=tuple(tokens[start : start + length]),
        meta={
            "mask_start": start,
            "mask_len": length,
            "per_token": cfg.per_token,
            "mask_token": cfg.mask_token,
            "mask_fill": tokens[start : start + length],
        },
    )


def _expected_masked_target(
    source: tuple[str, ...], meta: dict
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(expected full target, expected span target) for a masked source."""
    start = int(meta["mask_start"])
    fill = tuple(meta["mask_fill"])
    per_token = bool(meta["per_token"])
    masked_width = len(fill) if per_token else 1
    full = source[:start] + fill + source[start + masked_width :]
    return full, fill


def verify_denoising_instance(
    task: str, source: tuple[str, ...], target: tuple[str, ...], meta: dict
) -> bool:
    """Check a (source, target, meta) triple against its task contract.

    Exact reconstruction for sr/mdg and their adjusted variants; nsg is
    checked structurally only, since its target cannot be derived from
    the source.
    """
    try:
        if task == NSG:
            return (
                len(source) > 0
                and len(target) > 0
                and source[-1] in SENTENCE_TERMINATORS
                and target[-1] in SENTENCE_TERMINATORS
                and Document.from_tokens(source).sentence_count == int(meta["split_sentence"])
            )
        if task in (SR, SR_ADJUSTED):
            order = [int(i) for i in meta["order"]]
            shuffled = Document.from_tokens(source)
            if shuffled.sentence_count != len(order) or sorted(order) != list(
                range(len(order))
            ):
                return False
            if task == SR_ADJUSTED:
                return list(target) == restoring_indices(order)
            inverse = [0] * len(order)
            for j, original in enumerate(order):
                inverse[original] = j
            restored = Document(tuple(shuffled.sentences[j] for j in inverse))
            return list(target) == restored.tokens()
        if task in (MDG, MDG_ADJUSTED):
            mask_token = meta["mask_token"]
            start = int(meta["mask_start"])
            fill = tuple(meta["mask_fill"])
            per_token = bool(meta["per_token"])
            masked_width = len(fill) if per_token else 1
            span = source[start : start + masked_width]
            if any(tok != mask_token for tok in span):
                return False
            if mask_token in source[:start] or mask_token in source[start + masked_width :]:
                return False
            full, span_target = _expected_masked_target(source, meta)
            expected = span_target if task == MDG_ADJUSTED else full
            return tuple(target) == expected
    except (KeyError, ValueError, TypeError, IndexError):
        return False
    return False
