"""Command-line surface: generate, ingest, verify, stats, rouge.

Generation is deterministic given the flags: every record is produced
from an RNG stream derived from (seed, stream label, record index), so
output bytes do not depend on worker count. A sidecar
<out>.config.json provenance file is written next to each dataset.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .corpus import DocPolicy, Document
from .dataset import (
    DatasetRecord,
    IngestPolicy,
    TaskInstance,
    config_digest,
    dataset_stats,
    ingest_real_corpus,
    iter_dataset,
    record_to_json,
)
from .denoising import (
    DENOISING_KINDS,
    MDG,
    MDG_ADJUSTED,
    NSG,
    SR,
    SR_ADJUSTED,
    MaskConfig,
    make_mdg,
    make_mdg_adjusted,
    make_nsg,
    make_sr,
    make_sr_adjusted,
    verify_denoising_instance,
)
from .elementary import ELEMENTARY_KINDS, generate_elementary
from .ensemble import EnsembleConfig, compose, verify_instance
from .keywords import DEFAULT_SCHEME_TEXT, default_scheme, load_scheme_text
from .rng import derive_rng
from .rouge import corpus_rouge, tokenize
from .vocab import build_vocabulary

SCHEME_ENV_VAR = "NONSENSE_SCHEME"


@dataclass
class GenJob:
    """Picklable description of one generation run."""

    mode: str  # "step" or "tasks"
    kind: str
    seed: int
    count: int
    vocab_size: int
    scheme_text: str
    min_sentences: int
    max_sentences: int
    min_words: int
    max_words: int
    budget: int
    mask_fraction: float
    mask_token: str
    collapse_span: bool
    tasks_per_instance: int
    corpus_path: str | None
    check_every: int
    stream_id: str
    digest: str


class _Generator:
    """Per-process state for producing record lines by index."""

    def __init__(self, job: GenJob):
        self.job = job
        self.vocab = build_vocabulary(job.vocab_size)
        self.scheme = load_scheme_text(job.scheme_text, self.vocab)
        if job.mode == "step":
            self.policy = DocPolicy(
                min_words=job.min_words,
                max_words=job.max_words,
                token_budget=job.budget,
            )
        else:
            self.policy = DocPolicy(
                min_sentences=job.min_sentences,
                max_sentences=job.max_sentences,
                min_words=job.min_words,
                max_words=job.max_words,
            )
        self.mask_cfg = MaskConfig(
            mask_fraction=job.mask_fraction,
            mask_token=job.mask_token,
            per_token=not job.collapse_span,
        )
        self.ensemble_cfg = EnsembleConfig(tasks_per_instance=job.tasks_per_instance)
        self.corpus_docs: list[Document] | None = None
        if job.corpus_path:
            self.corpus_docs = [
                Document.from_text(rec["text"])
                for rec in _read_doc_file(job.corpus_path)
            ]
            if not self.corpus_docs:
                raise ValueError(f"no documents in {job.corpus_path}")

    def _base_doc(self, index: int, rng) -> Document | None:
        if self.corpus_docs is not None:
            return self.corpus_docs[index % len(self.corpus_docs)]
        return None

    def instance(self, index: int) -> TaskInstance:
        job = self.job
        rng = derive_rng(job.seed, job.stream_id, index)
        instance_id = f"{job.kind}-{index:08d}"
        doc = self._base_doc(index, rng)
        if job.mode == "step":
            if doc is None:
                doc = self.policy.sample(rng, self.vocab)
            if job.kind == NSG:
                inst = make_nsg(doc, instance_id)
            elif job.kind == SR:
                inst = make_sr(rng, doc, instance_id)
            elif job.kind == SR_ADJUSTED:
                inst = make_sr_adjusted(rng, doc, instance_id)
            elif job.kind == MDG:
                inst = make_mdg(rng, doc, self.mask_cfg, instance_id)
            elif job.kind == MDG_ADJUSTED:
                inst = make_mdg_adjusted(rng, doc, self.mask_cfg, instance_id)
            else:
                raise ValueError(f"unknown step kind {job.kind!r}")
        elif job.kind == "ensemble":
            inst = compose(
                rng, self.scheme, self.ensemble_cfg, self.vocab, self.policy,
                instance_id, doc=doc,
            )
        else:
            inst = generate_elementary(
                job.kind, rng, self.scheme, self.vocab, self.policy,
                instance_id, doc=doc,
            )
        if job.check_every and index % job.check_every == 0:
            self._self_check(inst)
        return inst

    def _self_check(self, inst: TaskInstance) -> None:
        if self.job.mode == "step":
            ok = verify_denoising_instance(inst.task, inst.source, inst.target, inst.meta)
        else:
            ok = verify_instance(inst.source, inst.target, inst.meta)
        if not ok:
            raise RuntimeError(f"self-check failed for {inst.id}")

    def line(self, index: int) -> str:
        inst = self.instance(index)
        job = self.job
        meta = {
            "seed": job.seed,
            "stream": job.stream_id,
            "index": index,
            "config": job.digest,
            **inst.meta,
        }
        record = DatasetRecord(
            id=inst.id,
            task=inst.task,
            source=" ".join(inst.source),
            target=" ".join(inst.target),
            meta=meta,
        )
        return record_to_json(record)


def _read_doc_file(path: str) -> list[dict]:
    docs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                docs.append(json.loads(line))
    return docs


def _gen_chunk(job: GenJob, start: int, stop: int) -> str:
    gen = _Generator(job)
    return "".join(gen.line(i) + "\n" for i in range(start, stop))


def _run_generation(job: GenJob, out: Path, workers: int) -> None:
    started = time.perf_counter()
    if workers <= 1:
        gen = _Generator(job)
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            for i in range(job.count):
                fh.write(gen.line(i))
                fh.write("\n")
    else:
        chunk = -(-job.count // workers)
        ranges = [
            (start, min(start + chunk, job.count))
            for start in range(0, job.count, chunk)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_gen_chunk, *zip(*[(job, a, b) for a, b in ranges]))
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                for part in parts:
                    fh.write(part)
    elapsed = time.perf_counter() - started
    rate = job.count / elapsed if elapsed > 0 else float("inf")
    print(
        f"wrote {job.count} records to {out} in {elapsed:.1f}s ({rate:.0f}/s)",
        file=sys.stderr,
    )


def _sidecar(out: Path, command: str, config: dict, digest: str) -> None:
    payload = {
        "command": command,
        "config": config,
        "digest": digest,
        "version": __version__,
    }
    sidecar = out.with_name(out.name + ".config.json")
    sidecar.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _resolve_scheme_text(path: str | None) -> str:
    if path is None:
        path = os.environ.get(SCHEME_ENV_VAR) or None
    if path is None:
        return DEFAULT_SCHEME_TEXT
    return Path(path).read_text(encoding="utf-8")


def _make_job(args: argparse.Namespace, mode: str) -> tuple[GenJob, dict]:
    scheme_text = _resolve_scheme_text(args.scheme)
    check_every = 0
    if args.self_check > 0:
        check_every = max(1, round(100.0 / args.self_check))
    config = {
        "mode": mode,
        "kind": args.kind,
        "seed": args.seed,
        "count": args.count,
        "vocab_size": args.vocab_size,
        "min_sentences": getattr(args, "min_sentences", 7),
        "max_sentences": getattr(args, "max_sentences", 13),
        "min_words": args.min_words,
        "max_words": args.max_words,
        "budget": getattr(args, "budget", 512),
        "mask_fraction": getattr(args, "mask_fraction", 0.15),
        "mask_token": getattr(args, "mask_token", "[MASK]"),
        "collapse_span": getattr(args, "collapse_span", False),
        "tasks_per_instance": getattr(args, "tasks_per_instance", 3),
        "corpus": args.corpus,
        "scheme_sha256": config_digest({"scheme": scheme_text}),
    }
    digest = config_digest(config)
    job = GenJob(
        mode=mode,
        kind=args.kind,
        seed=args.seed,
        count=args.count,
        vocab_size=args.vocab_size,
        scheme_text=scheme_text,
        min_sentences=config["min_sentences"],
        max_sentences=config["max_sentences"],
        min_words=args.min_words,
        max_words=args.max_words,
        budget=config["budget"],
        mask_fraction=config["mask_fraction"],
        mask_token=config["mask_token"],
        collapse_span=config["collapse_span"],
        tasks_per_instance=config["tasks_per_instance"],
        corpus_path=args.corpus,
        check_every=check_every,
        stream_id=f"{mode}/{args.kind}",
        digest=digest,
    )
    return job, config


def _cmd_gen(args: argparse.Namespace, mode: str) -> int:
    job, config = _make_job(args, mode)
    out = Path(args.out)
    _run_generation(job, out, args.workers)
    _sidecar(out, f"gen {mode}", {**config, "stream": job.stream_id}, job.digest)
    return 0


def _cmd_ingest(args: argparse.Namespace) -> int:
    if args.mode == "sentences":
        policy = IngestPolicy.by_sentences(args.min_sentences, args.max_sentences)
    else:
        policy = IngestPolicy.by_tokens(args.budget)
    count = 0
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        for doc in ingest_real_corpus(args.input, policy, seed=args.seed):
            fh.write(json.dumps({"id": f"doc-{count:08d}", "text": doc.text()},
                                ensure_ascii=False))
            fh.write("\n")
            count += 1
    print(f"wrote {count} documents to {args.out}", file=sys.stderr)
    if count == 0:
        print("warning: no documents assembled (input too short?)", file=sys.stderr)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    total = 0
    failed: list[str] = []
    for rec in iter_dataset(args.dataset):
        total += 1
        source = tuple(rec.source.split())
        target = tuple(rec.target.split())
        if rec.task in DENOISING_KINDS:
            ok = verify_denoising_instance(rec.task, source, target, rec.meta)
        elif rec.task in ELEMENTARY_KINDS or rec.task == "ensemble":
            ok = verify_instance(source, target, rec.meta)
        else:
            print(f"unknown task tag {rec.task!r} for {rec.id}", file=sys.stderr)
            ok = False
        if not ok:
            failed.append(rec.id)
    passed = total - len(failed)
    print(f"passed {passed}/{total}")
    for rec_id in failed[:20]:
        print(f"FAIL {rec_id}")
    if args.json:
        payload = {
            "total": total,
            "passed": passed,
            "failed": len(failed),
            "failed_ids": failed[:1000],
        }
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0 if not failed else 1


def _cmd_stats(args: argparse.Namespace) -> int:
    report = dataset_stats(args.dataset)
    print(report.render_text())
    if args.json:
        Path(args.json).write_text(
            json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="utf-8"
        )
    return 0


def _cmd_rouge(args: argparse.Namespace) -> int:
    candidates = Path(args.candidates).read_text(encoding="utf-8").splitlines()
    references = Path(args.references).read_text(encoding="utf-8").splitlines()
    if len(candidates) != len(references):
        raise RuntimeError(
            f"line count mismatch: {len(candidates)} candidates "
            f"vs {len(references)} references"
        )
    lowercase = not args.keep_case
    pairs = [
        (tokenize(c, lowercase), tokenize(r, lowercase))
        for c, r in zip(candidates, references)
    ]
    report = corpus_rouge(pairs)
    print(report.render_text())
    if args.json:
        Path(args.json).write_text(
            json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="utf-8"
        )
    return 0


def _cmd_scheme(args: argparse.Namespace) -> int:
    # dumps the built-in scheme so users can copy and edit it
    default_scheme()
    print(DEFAULT_SCHEME_TEXT, end="")
    return 0


def _add_gen_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, required=True, help="master seed (required)")
    p.add_argument("--count", type=int, required=True, help="records to generate")
    p.add_argument("--out", required=True, help="output dataset path (JSON lines)")
    p.add_argument("--vocab-size", type=int, default=5000)
    p.add_argument("--min-words", type=int, default=5)
    p.add_argument("--max-words", type=int, default=15)
    p.add_argument("--scheme", default=None,
                   help=f"keyword scheme file (default: ${SCHEME_ENV_VAR} or built-in)")
    p.add_argument("--corpus", default=None,
                   help="ingested document file to use instead of sampling nonsense")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--self-check", type=float, default=1.0, metavar="PCT",
                   help="verify this percentage of generated records (0 disables)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonsense",
        description="Deterministic factory for synthetic pretraining corpora",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate datasets")
    gen_sub = gen.add_subparsers(dest="gen_mode", required=True)

    step = gen_sub.add_parser("step", help="denoising tasks over token-budget documents")
    step.add_argument("--kind", required=True, choices=DENOISING_KINDS)
    _add_gen_common(step)
    step.add_argument("--budget", type=int, default=512, help="document token budget")
    step.add_argument("--mask-fraction", type=float, default=0.15)
    step.add_argument("--mask-token", default="[MASK]")
    step.add_argument("--collapse-span", action="store_true",
                      help="replace the masked span with a single mask token")
    step.set_defaults(func=lambda a: _cmd_gen(a, "step"))

    tasks = gen_sub.add_parser("tasks", help="elementary subtasks or their ensemble")
    tasks.add_argument("--kind", required=True, choices=ELEMENTARY_KINDS + ("ensemble",))
    _add_gen_common(tasks)
    tasks.add_argument("--min-sentences", type=int, default=7)
    tasks.add_argument("--max-sentences", type=int, default=13)
    tasks.add_argument("--tasks-per-instance", type=int, default=3)
    tasks.set_defaults(func=lambda a: _cmd_gen(a, "tasks"))

    ingest = sub.add_parser("ingest", help="assemble documents from plain text")
    ingest.add_argument("input", help="plain-text file")
    ingest.add_argument("--out", required=True)
    ingest.add_argument("--mode", choices=("sentences", "tokens"), default="sentences")
    ingest.add_argument("--min-sentences", type=int, default=7)
    ingest.add_argument("--max-sentences", type=int, default=13)
    ingest.add_argument("--budget", type=int, default=512)
    ingest.add_argument("--seed", type=int, default=0)
    ingest.set_defaults(func=_cmd_ingest)

    verify = sub.add_parser("verify", help="replay task oracles over a dataset")
    verify.add_argument("dataset")
    verify.add_argument("--json", default=None, help="write a JSON report here")
    verify.set_defaults(func=_cmd_verify)

    stats = sub.add_parser("stats", help="record counts, length percentiles, task histogram")
    stats.add_argument("dataset")
    stats.add_argument("--json", default=None, help="write a JSON report here")
    stats.set_defaults(func=_cmd_stats)

    rouge = sub.add_parser("rouge", help="score candidate summaries against references")
    rouge.add_argument("candidates", help="one candidate summary per line")
    rouge.add_argument("references", help="one reference summary per line")
    rouge.add_argument("--json", default=None, help="write a JSON report here")
    rouge.add_argument("--keep-case", action="store_true")
    rouge.set_defaults(func=_cmd_rouge)

    scheme = sub.add_parser("scheme", help="print the built-in keyword scheme")
    scheme.set_defaults(func=_cmd_scheme)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
