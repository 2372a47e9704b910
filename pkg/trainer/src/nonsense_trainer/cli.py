"""Trainer command line: pretrain, finetune, evaluate."""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from .config import TrainConfig
from .data import read_records, to_examples
from .evaluate import evaluate
from .factory import target_length_percentiles
from .train import finetune, load_checkpoint, pretrain


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--max-epochs", type=int, default=30)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--d-model", type=int, default=128)
    p.add_argument("--num-heads", type=int, default=4)
    p.add_argument("--enc-layers", type=int, default=2)
    p.add_argument("--dec-layers", type=int, default=2)
    p.add_argument("--ffn-dim", type=int, default=256)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--max-source-len", type=int, default=256)
    p.add_argument("--max-target-len", type=int, default=64)
    p.add_argument("--val-fraction", type=float, default=0.05)
    p.add_argument("--ablate-input", action="store_true",
                   help="replace every source with a constant stub")


def _config_from_args(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        d_model=args.d_model,
        num_heads=args.num_heads,
        enc_layers=args.enc_layers,
        dec_layers=args.dec_layers,
        ffn_dim=args.ffn_dim,
        dropout=args.dropout,
        lr=args.lr,
        batch_size=args.batch_size,
        max_epochs=args.max_epochs,
        patience=args.patience,
        val_fraction=args.val_fraction,
        max_source_len=args.max_source_len,
        max_target_len=args.max_target_len,
        seed=args.seed,
        ablate_input=args.ablate_input,
    )


def _cmd_pretrain(args: argparse.Namespace) -> int:
    history = pretrain(_config_from_args(args), args.data, args.out)
    print(f"saved {args.out} after {len(history)} epochs")
    return 0


def _cmd_finetune(args: argparse.Namespace) -> int:
    history = finetune(
        _config_from_args(args), args.ckpt, args.data, args.out,
        random_init=args.random_init, epochs=args.epochs,
    )
    print(f"saved {args.out} after {len(history)} epochs")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    model, vocab, cfg, _history = load_checkpoint(args.ckpt)
    records = read_records(args.data)
    examples = to_examples(records, cfg.max_source_len, cfg.max_target_len,
                           ablate_input=cfg.ablate_input)
    workdir = args.workdir or tempfile.mkdtemp(prefix="nonsense-eval-")
    if args.min_decode_len is None or args.max_decode_len is None:
        p5, p95 = target_length_percentiles(args.data, workdir)
    min_len = args.min_decode_len if args.min_decode_len is not None else p5
    max_len = args.max_decode_len if args.max_decode_len is not None else p95
    metrics = evaluate(
        model, examples, vocab, cfg, workdir,
        min_decode_len=min_len, max_decode_len=max_len,
        beam_size=args.beam, with_pr=not args.no_pr, with_rouge=args.rouge,
    )
    payload = json.dumps(metrics.to_dict(), indent=2)
    print(payload)
    if args.json:
        Path(args.json).write_text(payload + "\n", encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonsense-trainer",
        description="Compact sequence-to-sequence trainer for generated corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pre = sub.add_parser("pretrain", help="train a model from scratch")
    pre.add_argument("--data", required=True)
    pre.add_argument("--out", required=True)
    _add_train_flags(pre)
    pre.set_defaults(func=_cmd_pretrain)

    fine = sub.add_parser("finetune", help="continue training a checkpoint")
    fine.add_argument("--ckpt", required=True)
    fine.add_argument("--data", required=True)
    fine.add_argument("--out", required=True)
    fine.add_argument("--epochs", type=int, default=None,
                      help="0 copies the checkpoint through unchanged")
    fine.add_argument("--random-init", action="store_true",
                      help="reinitialize weights (no-pretraining baseline)")
    _add_train_flags(fine)
    fine.set_defaults(func=_cmd_finetune)

    ev = sub.add_parser("evaluate", help="metrics for a checkpoint on a dataset")
    ev.add_argument("--ckpt", required=True)
    ev.add_argument("--data", required=True)
    ev.add_argument("--json", default=None)
    ev.add_argument("--workdir", default=None)
    ev.add_argument("--beam", type=int, default=None, help="beam size (default greedy)")
    ev.add_argument("--min-decode-len", type=int, default=None,
                    help="default: 5th percentile of target lengths")
    ev.add_argument("--max-decode-len", type=int, default=None,
                    help="default: 95th percentile of target lengths")
    ev.add_argument("--no-pr", action="store_true", help="skip oracle accuracy")
    ev.add_argument("--rouge", action="store_true", help="score ROUGE against targets")
    ev.set_defaults(func=_cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
