"""Deterministic seed derivation and generator construction.

Every random object in the package (matrix, signal, Monte Carlo trial) is
drawn from its own counter-based generator keyed by a 64-bit seed derived
from (master_seed, purpose tags, index). Derivation is a pure function, so
results never depend on scheduling or worker count.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4B7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _tag_word(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & _MASK64
    if isinstance(tag, str):
        h = _FNV_OFFSET
        for b in tag.encode("utf-8"):
            h = ((h ^ b) * _FNV_PRIME) & _MASK64
        return h
    raise TypeError(f"seed tag must be int or str, got {type(tag).__name__}")


def derive_seed(master_seed: int, *tags) -> int:
    """Mix a master seed with purpose tags (strings or ints) into a fresh
    64-bit seed. Distinct tag tuples give statistically independent seeds."""
    h = _splitmix64(int(master_seed) & _MASK64)
    for tag in tags:
        h = _splitmix64(h ^ _tag_word(tag))
    return h


def generator(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))
