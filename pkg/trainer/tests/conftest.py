import subprocess
import sys

import pytest

GEN_DEFAULTS = [
    "--vocab-size", "500",
    "--min-words", "3", "--max-words", "8",
]


def generate(path, *args):
    """Produce a dataset through the factory CLI (the external interface)."""
    cmd = [sys.executable, "-m", "nonsense_factory"] + list(args) + ["--out", str(path)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return path


@pytest.fixture(scope="session")
def small_copy_dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "copy.jsonl"
    return generate(
        path, "gen", "tasks", "--kind", "CopyKwdOneSentence",
        "--count", "300", "--seed", "41",
        "--min-sentences", "4", "--max-sentences", "6", *GEN_DEFAULTS,
    )


@pytest.fixture(scope="session")
def small_classify_dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "classify.jsonl"
    return generate(
        path, "gen", "tasks", "--kind", "ClassifyKeyword",
        "--count", "200", "--seed", "42",
        "--min-sentences", "4", "--max-sentences", "6", *GEN_DEFAULTS,
    )
