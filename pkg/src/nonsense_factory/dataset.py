"""Dataset records, JSON-lines serialization, statistics, real-text ingestion.

One JSON object per line, UTF-8, field order (id, task, source, target,
meta). Records are byte-stable: identical records always serialize to
identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .corpus import SENTENCE_TERMINATORS, Document, Sentence
from .rng import derive_rng


class DatasetFormatError(ValueError):
    """Malformed dataset file (parse error, duplicate id, missing field)."""


@dataclass
class TaskInstance:
    """One input-summary pair before serialization; tokens, not text."""

    id: str
    task: str
    source: tuple[str, ...]
    target: tuple[str, ...]
    meta: dict


@dataclass
class DatasetRecord:
    id: str
    task: str
    source: str
    target: str
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_instance(cls, inst: TaskInstance) -> "DatasetRecord":
        return cls(
            id=inst.id,
            task=inst.task,
            source=" ".join(inst.source),
            target=" ".join(inst.target),
            meta=inst.meta,
        )


def record_to_json(record: DatasetRecord) -> str:
    payload = {
        "id": record.id,
        "task": record.task,
        "source": record.source,
        "target": record.target,
        "meta": record.meta,
    }
    return json.dumps(payload, ensure_ascii=False)


def _record_from_obj(obj: dict, where: str) -> DatasetRecord:
    for key in ("id", "task", "source", "target", "meta"):
        if key not in obj:
            raise DatasetFormatError(f"{where}: missing field {key!r}")
    if not obj["source"] or not obj["target"]:
        raise DatasetFormatError(f"{where}: empty source or target")
    return DatasetRecord(
        id=str(obj["id"]),
        task=str(obj["task"]),
        source=obj["source"],
        target=obj["target"],
        meta=obj["meta"],
    )


def write_dataset(records: Iterable[DatasetRecord], path: str | Path) -> int:
    """Write records as JSON lines; returns the record count."""
    seen: set[str] = set()
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            if rec.id in seen:
                raise DatasetFormatError(f"duplicate record id {rec.id!r}")
            if not rec.source or not rec.target:
                raise DatasetFormatError(f"record {rec.id!r}: empty source or target")
            seen.add(rec.id)
            fh.write(record_to_json(rec))
            fh.write("\n")
            count += 1
    return count


def iter_dataset(path: str | Path) -> Iterator[DatasetRecord]:
    """Stream records, validating line syntax and id uniqueness."""
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(f"{where}: invalid JSON ({exc.msg})") from exc
            rec = _record_from_obj(obj, where)
            if rec.id in seen:
                raise DatasetFormatError(f"{where}: duplicate record id {rec.id!r}")
            seen.add(rec.id)
            yield rec


def read_dataset(path: str | Path) -> list[DatasetRecord]:
    return list(iter_dataset(path))


def config_digest(config: dict) -> str:
    """Short stable digest used for provenance stamps in record meta."""
    blob = json.dumps(config, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


# --- statistics ---------------------------------------------------------


def nearest_rank_percentile(sorted_values: list[int], p: float) -> int:
    """Nearest-rank percentile: smallest value covering p percent of data."""
    if not sorted_values:
        raise ValueError("no values")
    rank = max(1, math.ceil(p / 100.0 * len(sorted_values)))
    return sorted_values[rank - 1]


@dataclass
class StatsReport:
    count: int
    source_percentiles: dict[int, int]
    target_percentiles: dict[int, int]
    task_histogram: dict[str, int]

    def to_json_dict(self) -> dict:
        return {
            "count": self.count,
            "source_tokens": {f"p{k}": v for k, v in self.source_percentiles.items()},
            "target_tokens": {f"p{k}": v for k, v in self.target_percentiles.items()},
            "tasks": dict(sorted(self.task_histogram.items())),
        }

    def render_text(self) -> str:
        lines = [f"records: {self.count}"]
        if self.count:
            src = self.source_percentiles
            tgt = self.target_percentiles
            lines.append(
                f"source tokens: p5={src[5]} p50={src[50]} p95={src[95]}"
            )
            lines.append(
                f"target tokens: p5={tgt[5]} p50={tgt[50]} p95={tgt[95]}"
            )
            lines.append("tasks:")
            for task, n in sorted(self.task_histogram.items()):
                lines.append(f"  {task}: {n}")
        return "\n".join(lines)


def dataset_stats(path: str | Path) -> StatsReport:
    source_lens: list[int] = []
    target_lens: list[int] = []
    histogram: dict[str, int] = {}
    for rec in iter_dataset(path):
        source_lens.append(len(rec.source.split()))
        target_lens.append(len(rec.target.split()))
        histogram[rec.task] = histogram.get(rec.task, 0) + 1
    if not source_lens:
        return StatsReport(0, {}, {}, {})
    source_lens.sort()
    target_lens.sort()
    pcts = (5, 50, 95)
    return StatsReport(
        count=len(source_lens),
        source_percentiles={p: nearest_rank_percentile(source_lens, p) for p in pcts},
        target_percentiles={p: nearest_rank_percentile(target_lens, p) for p in pcts},
        task_histogram=histogram,
    )


# --- real-text ingestion ------------------------------------------------

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


@dataclass(frozen=True)
class IngestPolicy:
    """Document assembly rule for ingested text."""

    mode: str  # "sentences" or "tokens"
    min_sentences: int = 7
    max_sentences: int = 13
    token_budget: int = 512

    @classmethod
    def by_sentences(cls, min_sentences: int = 7, max_sentences: int = 13) -> "IngestPolicy":
        if not 1 <= min_sentences <= max_sentences:
            raise ValueError("bad sentence bounds")
        return cls("sentences", min_sentences=min_sentences, max_sentences=max_sentences)

    @classmethod
    def by_tokens(cls, budget: int = 512) -> "IngestPolicy":
        if budget < 1:
            raise ValueError("bad token budget")
        return cls("tokens", token_budget=budget)


def split_real_sentences(text: str) -> list[Sentence]:
    """Naive splitter: break on ./!/? followed by whitespace.

    The terminal punctuation becomes its own token. Chunks without a
    terminal mark (trailing fragments) are dropped, so abbreviations
    split over-eagerly; input is expected to be pre-cleaned plain text.
    """
    sentences: list[Sentence] = []
    for chunk in _SENTENCE_SPLIT.split(text):
        words = chunk.split()
        if not words:
            continue
        last = words[-1]
        if last in SENTENCE_TERMINATORS:
            term, words = last, words[:-1]
        elif last[-1] in SENTENCE_TERMINATORS:
            term = last[-1]
            words = words[:-1] + ([last[:-1]] if len(last) > 1 else [])
        else:
            continue
        if words:
            sentences.append(Sentence(tuple(words), term))
    return sentences


def ingest_real_corpus(
    path: str | Path,
    policy: IngestPolicy,
    seed: int = 0,
) -> Iterator[Document]:
    """Assemble documents from plain text; short tails are dropped.

    Sentence-count draws for the by-sentences policy come from a stream
    derived from `seed`, so identical inputs yield identical documents.
    """
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise OSError(f"empty input file: {path}")
    sentences = split_real_sentences(text)
    if policy.mode == "sentences":
        rng = derive_rng(seed, "ingest/by-sentences")
        i = 0
        while i < len(sentences):
            want = rng.randint(policy.min_sentences, policy.max_sentences)
            chunk = sentences[i : i + want]
            i += want
            if len(chunk) >= policy.min_sentences:
                yield Document(tuple(chunk))
    elif policy.mode == "tokens":
        batch: list[Sentence] = []
        total = 0
        for s in sentences:
            batch.append(s)
            total += s.token_count
            if total >= policy.token_budget:
                yield Document(tuple(batch))
                batch, total = [], 0
        # incomplete tail dropped
    else:
        raise ValueError(f"unknown ingest mode {policy.mode!r}")
