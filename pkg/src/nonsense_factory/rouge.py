"""ROUGE-1/2/L scoring over whitespace tokens.

Conventions: clipped n-gram counts, recall = matches / reference
n-grams, precision = matches / candidate n-grams, F1 with beta = 1 for
every variant. An empty candidate or reference scores zero across the
board. No stemming or stopword removal; lowercasing is a caller choice
made during tokenization.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

VARIANTS = ("r1", "r2", "rl")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def zero(cls) -> "RougeScore":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def from_fractions(cls, precision: float, recall: float) -> "RougeScore":
        denom = precision + recall
        f1 = 2.0 * precision * recall / denom if denom > 0 else 0.0
        return cls(precision, recall, f1)

    def as_dict(self) -> dict[str, float]:
        return {"p": self.precision, "r": self.recall, "f1": self.f1}


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    return text.lower().split() if lowercase else text.split()


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int = 1) -> RougeScore:
    """Clipped n-gram overlap score."""
    if n < 1:
        raise ValueError(f"n-gram order must be positive, got {n}")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    if cand_total == 0 or ref_total == 0:
        return RougeScore.zero()
    match = sum(min(count, ref[gram]) for gram, count in cand.items() if gram in ref)
    return RougeScore.from_fractions(match / cand_total, match / ref_total)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length, O(len(a) * len(b)) with two rows."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Longest-common-subsequence score over whole token sequences."""
    if not candidate or not reference:
        return RougeScore.zero()
    lcs = lcs_length(candidate, reference)
    return RougeScore.from_fractions(lcs / len(candidate), lcs / len(reference))


def score_pair(candidate: Sequence[str], reference: Sequence[str]) -> dict[str, RougeScore]:
    return {
        "r1": rouge_n(candidate, reference, 1),
        "r2": rouge_n(candidate, reference, 2),
        "rl": rouge_l(candidate, reference),
    }


@dataclass
class RougeReport:
    pairs: list[dict[str, RougeScore]]
    means: dict[str, RougeScore]
    beta: float = 1.0

    def to_json_dict(self, include_pairs: bool = True) -> dict:
        out: dict = {
            "beta": self.beta,
            "pairs_scored": len(self.pairs),
            "mean": {v: self.means[v].as_dict() for v in VARIANTS},
        }
        if include_pairs:
            out["pairs"] = [
                {v: pair[v].as_dict() for v in VARIANTS} for pair in self.pairs
            ]
        return out

    def render_text(self) -> str:
        lines = [f"pairs: {len(self.pairs)}", "variant  precision  recall     f1"]
        for v in VARIANTS:
            s = self.means[v]
            lines.append(f"{v:<7}  {s.precision:9.6f}  {s.recall:9.6f}  {s.f1:9.6f}")
        return "\n".join(lines)


def corpus_rouge(
    pairs: Iterable[tuple[Sequence[str], Sequence[str]]],
) -> RougeReport:
    """Arithmetic means of per-pair scores over (candidate, reference) pairs."""
    scored = [score_pair(c, r) for c, r in pairs]
    if not scored:
        raise ValueError("no pairs to score")
    means = {}
    for v in VARIANTS:
        n = len(scored)
        means[v] = RougeScore(
            precision=sum(p[v].precision for p in scored) / n,
            recall=sum(p[v].recall for p in scored) / n,
            f1=sum(p[v].f1 for p in scored) / n,
        )
    return RougeReport(pairs=scored, means=means)
