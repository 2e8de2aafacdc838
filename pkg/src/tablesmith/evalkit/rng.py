"""Explicit-state pseudo-random generator for reproducible fixture trees.

xorshift64* with the canonical constants (shifts 12/25/27, multiplier
2685821657736338717 = 0x2545F4914F6CDD1D). Platform-independent by
construction: no reliance on any runtime's default RNG stream, so a seed
produces the same corpus everywhere.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_MULTIPLIER = 0x2545F4914F6CDD1D
_SEED_MIX = 0x9E3779B97F4A7C15  # keeps state nonzero and spreads small seeds


class Rng:
    def __init__(self, seed: int):
        self.state = (seed ^ _SEED_MIX) & _MASK64 or _SEED_MIX

    def next_u64(self) -> int:
        s = self.state
        s ^= (s >> 12)
        s = (s ^ (s << 25)) & _MASK64
        s ^= (s >> 27)
        self.state = s
        return (s * _MULTIPLIER) & _MASK64

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            value = self.next_u64()
            if value <= limit:
                return value % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], inclusive."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.below(hi - lo + 1)

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def chance(self, p: float) -> bool:
        if p <= 0.0:
            return False
        if p >= 1.0:
            return True
        return self.uniform() < p

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
