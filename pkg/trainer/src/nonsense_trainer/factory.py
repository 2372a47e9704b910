"""Subprocess access to the corpus factory CLI.

The trainer talks to the generator only through its command line and
file formats: `verify` replays acceptance oracles (the Pr% judge),
`rouge` scores summaries, `stats` supplies decode-length percentiles.
Set NONSENSE_CLI to override the default `python -m nonsense_factory`.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import sys
from pathlib import Path

CLI_ENV_VAR = "NONSENSE_CLI"


def factory_command() -> list[str]:
    override = os.environ.get(CLI_ENV_VAR)
    if override:
        return shlex.split(override)
    return [sys.executable, "-m", "nonsense_factory"]


def run_factory(*args: str, check: bool = True) -> subprocess.CompletedProcess:
    proc = subprocess.run(
        factory_command() + list(args), capture_output=True, text=True
    )
    if check and proc.returncode != 0:
        raise RuntimeError(
            f"factory CLI failed ({proc.returncode}): {' '.join(args)}\n{proc.stderr}"
        )
    return proc


def verify_report(dataset_path, workdir) -> dict:
    """Oracle pass/fail counts for a dataset file; nonzero exit only means
    some records failed, which is expected for model outputs."""
    report_path = Path(workdir) / "verify-report.json"
    run_factory("verify", str(dataset_path), "--json", str(report_path), check=False)
    return json.loads(report_path.read_text(encoding="utf-8"))


def rouge_means(candidates_path, references_path, workdir) -> dict:
    report_path = Path(workdir) / "rouge-report.json"
    run_factory(
        "rouge", str(candidates_path), str(references_path),
        "--json", str(report_path),
    )
    return json.loads(report_path.read_text(encoding="utf-8"))["mean"]


def target_length_percentiles(dataset_path, workdir) -> tuple[int, int]:
    """(p5, p95) of target token lengths, the decode-length bounds."""
    report_path = Path(workdir) / "stats-report.json"
    run_factory("stats", str(dataset_path), "--json", str(report_path))
    stats = json.loads(report_path.read_text(encoding="utf-8"))
    return stats["target_tokens"]["p5"], stats["target_tokens"]["p95"]
