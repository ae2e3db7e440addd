"""Portable seeded shuffling used for corpus splits and random-draw balancing.

The generator is SplitMix64 (Steele, Lea & Flood 2014) and shuffles are a
descending Fisher-Yates pass drawing ``j = below(i + 1)`` for ``i = n-1 .. 1``.
``below(n)`` draws 64-bit words and rejects those at or above the largest
multiple of ``n``, then returns ``word % n``. Any implementation following
these three rules reproduces the same permutations for the same seed.
"""

from __future__ import annotations

from typing import MutableSequence

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def shuffle(self, items: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def permutation(n: int, seed: int) -> list[int]:
    order = list(range(n))
    SplitMix64(seed).shuffle(order)
    return order
