"""Deterministic splittable RNG streams.

Every sampled artifact is a pure function of the triple
(master_seed, stream_id, index). The triple is folded through the
splitmix64 finalizer and the result seeds a stdlib Mersenne Twister.
Output is byte-stable across runs and across parallel workers that
derive their own streams; bit-equality across languages is not a goal.
"""

from __future__ import annotations

import random

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """splitmix64 finalizer: avalanche a 64-bit value."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def hash_stream_id(stream_id: str) -> int:
    """FNV-1a over the UTF-8 bytes of the stream label."""
    h = 0xCBF29CE484222325
    for b in stream_id.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _MASK64
    return h


def derive_seed(master_seed: int, stream_id: str, index: int = 0) -> int:
    """Fold (master_seed, stream_id, index) into a single 64-bit seed."""
    s = mix64(master_seed)
    s = mix64(s ^ hash_stream_id(stream_id))
    s = mix64(s ^ ((index * _GOLDEN) & _MASK64))
    return s


def derive_rng(master_seed: int, stream_id: str, index: int = 0) -> random.Random:
    """Independent generator for one instance; equal triples give equal streams."""
    return random.Random(derive_seed(master_seed, stream_id, index))
