"""Nonsense sentences and documents.

A token is a whitespace-delimited unit. Every sentence ends with its
terminator emitted as a standalone token; generated text always uses
the period. Token counts include one terminator per sentence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from .vocab import Vocabulary

PERIOD = "."
SENTENCE_TERMINATORS = frozenset({".", "!", "?"})


@dataclass(frozen=True)
class Sentence:
    words: tuple[str, ...]
    terminator: str = PERIOD

    @property
    def token_count(self) -> int:
        return len(self.words) + 1

    def tokens(self) -> tuple[str, ...]:
        return self.words + (self.terminator,)


@dataclass(frozen=True)
class Document:
    sentences: tuple[Sentence, ...]

    @property
    def sentence_count(self) -> int:
        return len(self.sentences)

    @property
    def token_count(self) -> int:
        return sum(s.token_count for s in self.sentences)

    def tokens(self) -> list[str]:
        out: list[str] = []
        for s in self.sentences:
            out.extend(s.words)
            out.append(s.terminator)
        return out

    def text(self) -> str:
        return " ".join(self.tokens())

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "Document":
        """Rebuild sentence structure from a flat token stream.

        Splits after each standalone terminator token; a trailing run
        without a terminator is malformed.
        """
        sentences: list[Sentence] = []
        words: list[str] = []
        for tok in tokens:
            if tok in SENTENCE_TERMINATORS:
                sentences.append(Sentence(tuple(words), tok))
                words = []
            else:
                words.append(tok)
        if words:
            raise ValueError("token stream does not end with a sentence terminator")
        if not sentences:
            raise ValueError("empty token stream")
        return cls(tuple(sentences))

    @classmethod
    def from_text(cls, text: str) -> "Document":
        return cls.from_tokens(text.split())


def sample_sentence(
    rng: random.Random,
    vocab: Vocabulary,
    min_words: int = 5,
    max_words: int = 15,
) -> Sentence:
    """Length uniform over [min_words, max_words], words i.i.d. uniform."""
    if len(vocab) == 0:
        raise ValueError("empty vocabulary")
    if not 1 <= min_words <= max_words:
        raise ValueError(f"bad sentence length bounds [{min_words}, {max_words}]")
    n = rng.randint(min_words, max_words)
    return Sentence(tuple(rng.choices(vocab.words, k=n)))


def sample_document_by_sentences(
    rng: random.Random,
    vocab: Vocabulary,
    min_sentences: int = 7,
    max_sentences: int = 13,
    min_words: int = 5,
    max_words: int = 15,
) -> Document:
    """Sentence count uniform over [min_sentences, max_sentences]."""
    if not 1 <= min_sentences <= max_sentences:
        raise ValueError(f"bad sentence count bounds [{min_sentences}, {max_sentences}]")
    count = rng.randint(min_sentences, max_sentences)
    return Document(
        tuple(sample_sentence(rng, vocab, min_words, max_words) for _ in range(count))
    )


def sample_document_by_tokens(
    rng: random.Random,
    vocab: Vocabulary,
    budget: int = 512,
    min_words: int = 5,
    max_words: int = 15,
) -> Document:
    """Append sentences until the token count reaches the budget.

    The final document overshoots by at most one sentence (max_words
    tokens); dropping its last sentence always lands under the budget.
    """
    if budget < max_words + 1:
        raise ValueError(f"budget {budget} below one max-length sentence ({max_words + 1})")
    sentences: list[Sentence] = []
    total = 0
    while total < budget:
        s = sample_sentence(rng, vocab, min_words, max_words)
        sentences.append(s)
        total += s.token_count
    return Document(tuple(sentences))


@dataclass(frozen=True)
class DocPolicy:
    """How base documents are produced: sentence-count or token-budget regime."""

    min_sentences: int = 7
    max_sentences: int = 13
    min_words: int = 5
    max_words: int = 15
    token_budget: int | None = None

    def sample(self, rng: random.Random, vocab: Vocabulary) -> Document:
        if self.token_budget is not None:
            return sample_document_by_tokens(
                rng, vocab, self.token_budget, self.min_words, self.max_words
            )
        return sample_document_by_sentences(
            rng, vocab, self.min_sentences, self.max_sentences, self.min_words, self.max_words
        )
