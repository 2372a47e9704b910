"""Composite pretraining pairs: several subtasks applied to one document.

Each composed instance samples distinct task kinds, plants their trigger
material on disjoint sentences, and concatenates the per-task summaries
in applied order. Verification replays every task's acceptance oracle
against its summary segment.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import DocPolicy, Document
from .dataset import TaskInstance
from .elementary import (
    ELEMENTARY_KINDS,
    PlacementError,
    TaskRecord,
    apply_modification,
    compute_gold,
    oracle_accepts,
)
from .keywords import KeywordScheme
from .vocab import Vocabulary

# Kinds that cannot carry an identifying keyword on every instance, or
# that a model could not learn even alone, stay out of composed data.
EXCLUDED_FROM_ENSEMBLE = (
    "CopyFirstSentence",
    "CopyLastSentence",
    "CheckKeyword",
    "SumOfNumbers",
    "CompareNumbers",
)

DEFAULT_ELIGIBLE = tuple(k for k in ELEMENTARY_KINDS if k not in EXCLUDED_FROM_ENSEMBLE)


@dataclass(frozen=True)
class EnsembleConfig:
    eligible_kinds: tuple[str, ...] = DEFAULT_ELIGIBLE
    tasks_per_instance: int = 3
    replacement: bool = False
    max_placement_retries: int = 100

    def __post_init__(self) -> None:
        unknown = [k for k in self.eligible_kinds if k not in ELEMENTARY_KINDS]
        if unknown:
            raise ValueError(f"unknown kinds in eligible set: {unknown}")
        if len(set(self.eligible_kinds)) != len(self.eligible_kinds):
            raise ValueError("eligible kinds must be distinct")
        if self.tasks_per_instance < 1:
            raise ValueError("tasks_per_instance must be positive")
        if not self.replacement and self.tasks_per_instance > len(self.eligible_kinds):
            raise ValueError(
                f"cannot draw {self.tasks_per_instance} distinct kinds "
                f"from {len(self.eligible_kinds)} eligible"
            )


def compose(
    rng: random.Random,
    scheme: KeywordScheme,
    cfg: EnsembleConfig,
    vocab: Vocabulary,
    policy: DocPolicy | None = None,
    instance_id: str = "",
    doc: Document | None = None,
) -> TaskInstance:
    """One composed pair: sampled kinds applied sequentially to one document.

    Placements collide when a kind cannot find room outside sentences
    already claimed by earlier kinds; placement is then resampled, and
    after max_placement_retries the base document is resampled. A caller
    supplying `doc` pins the base document; exhausting retries on it is
    an error since it cannot be resampled.
    """
    policy = policy or DocPolicy()
    if cfg.replacement:
        kinds = [rng.choice(cfg.eligible_kinds) for _ in range(cfg.tasks_per_instance)]
    else:
        kinds = rng.sample(cfg.eligible_kinds, cfg.tasks_per_instance)
    while True:
        base = doc if doc is not None else policy.sample(rng, vocab)
        for _attempt in range(cfg.max_placement_retries):
            modified = base
            used: set[int] = set()
            records: list[TaskRecord] = []
            try:
                for kind in kinds:
                    allowed = [i for i in range(modified.sentence_count) if i not in used]
                    modified, record = apply_modification(
                        kind, modified, rng, scheme, vocab, allowed=allowed
                    )
                    used |= record.footprint()
                    records.append(record)
            except PlacementError:
                continue
            target: list[str] = []
            for record in records:
                target.extend(compute_gold(record, modified))
            return TaskInstance(
                id=instance_id,
                task="ensemble",
                source=tuple(modified.tokens()),
                target=tuple(target),
                meta={"records": [r.to_meta() for r in records]},
            )
        if doc is not None:
            raise PlacementError(
                f"could not place {kinds} on the supplied document "
                f"after {cfg.max_placement_retries} retries"
            )


def verify_instance(source: tuple[str, ...], target: tuple[str, ...], meta: dict) -> bool:
    """Replay every task oracle against its summary segment.

    The target must split into consecutive segments, one per recorded
    task, each accepted by that task's oracle; segment lengths come from
    the recomputed golds. Works for single-task instances too.
    """
    try:
        doc = Document.from_tokens(source)
        records = [TaskRecord.from_meta(m) for m in meta["records"]]
        target = tuple(target)
        pos = 0
        for record in records:
            gold = compute_gold(record, doc)
            segment = target[pos : pos + len(gold)]
            if not oracle_accepts(record, doc, segment):
                return False
            pos += len(gold)
        return pos == len(target)
    except (ValueError, KeyError, TypeError, IndexError):
        return False
