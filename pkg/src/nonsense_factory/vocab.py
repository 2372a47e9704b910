"""Artificial vocabulary of three-letter words.

Words are ordered by their two-letter suffix first (compared the usual
way), with the leading character cycling fastest: "aaa", "baa", ...,
"zaa", "aab", "bab", ... The default vocabulary keeps the first 5000
words of this sequence.
"""

from __future__ import annotations

ALPHABET = "abcdefghijklmnopqrstuvwxyz"
MAX_WORDS = len(ALPHABET) ** 3  # 17576
DEFAULT_SIZE = 5000


def word_at(index: int) -> str:
    """Word at a 0-based position of the suffix-major sequence."""
    if not 0 <= index < MAX_WORDS:
        raise ValueError(f"word index {index} outside [0, {MAX_WORDS})")
    suffix = index // 26
    return (
        ALPHABET[index % 26]
        + ALPHABET[(suffix // 26) % 26]
        + ALPHABET[suffix % 26]
    )


def index_of(word: str) -> int:
    """Inverse of word_at; raises for anything that is not a 3-letter word."""
    if len(word) != 3 or any(c not in ALPHABET for c in word):
        raise ValueError(f"not a vocabulary word: {word!r}")
    a, b, c = (ord(ch) - ord("a") for ch in word)
    return a + 676 * b + 26 * c


class Vocabulary:
    """The first `size` words of the three-letter sequence."""

    __slots__ = ("words", "word_set")

    def __init__(self, size: int = DEFAULT_SIZE):
        if not 1 <= size <= MAX_WORDS:
            raise ValueError(f"vocabulary size {size} outside [1, {MAX_WORDS}]")
        self.words: tuple[str, ...] = tuple(word_at(i) for i in range(size))
        self.word_set: frozenset[str] = frozenset(self.words)

    @property
    def size(self) -> int:
        return len(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.word_set

    def index_of(self, word: str) -> int:
        idx = index_of(word)
        if idx >= len(self.words):
            raise ValueError(f"word {word!r} beyond vocabulary of {len(self.words)}")
        return idx


def build_vocabulary(size: int = DEFAULT_SIZE) -> Vocabulary:
    return Vocabulary(size)
