"""Reproducible random streams and stateless per-query randomness.

Two kinds of randomness live here:

* ``RandomSource`` wraps a numpy PCG64 generator seeded through
  ``SeedSequence(seed, spawn_key=path)``.  Distinct ``(seed, path)`` pairs
  give statistically independent streams, and the mapping is injective and
  stable across runs and platforms, so published results reproduce.
* A stateless splitmix64-style mixer that turns ``(stream key, candidate
  identity, token)`` into a uniform variate.  Classifier queries drawn this
  way are reproducible and independent of the order in which the candidate
  list is expanded.

The derivation scheme below is part of the output contract: changing any
constant or the path layout changes every published CSV.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_B = 0xBF58476D1CE4E5B9
_MIX_C = 0x94D049BB133111EB
_COMBINE_MUL = 0xD1342543DE82EF95

# Sub-stream selectors appended to a RandomSource path: one leaf feeds the
# PCG64 generator, the other the stateless hash key.  Keeping them on
# separate leaves means bulk draws and per-query hashing never share state.
_GENERATOR_LEAF = 0
_HASH_KEY_LEAF = 1

_U64 = np.uint64
_UNIT_SCALE = 2.0**-53


def mix64(z: int) -> int:
    """Splitmix64 finalizer on a 64-bit integer (scalar path)."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX_B) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_C) & _MASK64
    return z ^ (z >> 31)


def _mix64_raw(z: np.ndarray) -> np.ndarray:
    # Callers must be inside np.errstate(over="ignore"): uint64 wraparound
    # is the point of the finalizer.
    z = z + _U64(_GOLDEN)
    z = (z ^ (z >> _U64(30))) * _U64(_MIX_B)
    z = (z ^ (z >> _U64(27))) * _U64(_MIX_C)
    return z ^ (z >> _U64(31))


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized ``mix64`` on uint64 arrays; bit-identical to the scalar."""
    with np.errstate(over="ignore"):
        return _mix64_raw(z)


def combine64(h: int, w: int) -> int:
    """Fold one more word into a running 64-bit identity hash."""
    return mix64((h * _COMBINE_MUL + w + 1) & _MASK64)


def combine64_array(h: np.ndarray | int, w: np.ndarray | int) -> np.ndarray:
    """Vectorized ``combine64``; broadcasts over either argument."""
    with np.errstate(over="ignore"):
        z = np.asarray(h, dtype=np.uint64) * _U64(_COMBINE_MUL) + np.asarray(
            w, dtype=np.uint64
        ) + _U64(1)
    return mix64_array(z)


def unit_from_bits(word: int) -> float:
    """Map a 64-bit word to a double in [0, 1) on the standard 2^53 grid."""
    return (word >> 11) * _UNIT_SCALE


def unit_from_bits_array(words: np.ndarray) -> np.ndarray:
    return (words >> _U64(11)) * _UNIT_SCALE


@dataclass(frozen=True)
class RandomSource:
    """A reproducible random stream addressed by ``(seed, path)``.

    ``path`` is a tuple of non-negative integers; ``child(i, j, ...)``
    appends indices, so streams form a tree rooted at the seed.  The numpy
    generator and the 64-bit hash key are derived from disjoint leaves of
    the same seed sequence and are created lazily.
    """

    seed: int
    path: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed", self.seed & _MASK64)
        if any(i < 0 for i in self.path):
            raise ValueError("stream path indices must be non-negative")

    def child(self, *indices: int) -> "RandomSource":
        return RandomSource(self.seed, self.path + indices)

    @cached_property
    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(
            self.seed, spawn_key=self.path + (_GENERATOR_LEAF,)
        )
        return np.random.Generator(np.random.PCG64(ss))

    @cached_property
    def key(self) -> int:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path + (_HASH_KEY_LEAF,))
        return int(ss.generate_state(1, dtype=np.uint64)[0])


def derive_stream(seed: int, indices: list[int] | tuple[int, ...]) -> RandomSource:
    """Stream for an index path under ``seed``; injective in ``(seed, path)``."""
    return RandomSource(seed, tuple(indices))


def as_random_source(seed_or_source: "int | RandomSource") -> RandomSource:
    if isinstance(seed_or_source, RandomSource):
        return seed_or_source
    return RandomSource(seed_or_source)
