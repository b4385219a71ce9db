"""Deterministic seeding utilities shared by the partitioning ensemble.

All randomness in the pipeline flows from a single 64-bit master seed through
``hash64``, so results are reproducible bit-for-bit across platforms and
independent of execution order.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit value."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def hash64(*parts: int) -> int:
    """Combine integers into one well-mixed 64-bit seed.

    Used to derive per-run seeds as ``hash64(master_seed, month, run)``.
    """
    state = _GAMMA
    for p in parts:
        state = mix64((state + (p & _MASK) + _GAMMA) & _MASK)
    return state


class SplitMix64:
    """Tiny deterministic uint64 stream, mirror of the kernel-side generator."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return mix64(self._state)

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return self.next_u64() % n
