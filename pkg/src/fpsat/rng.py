"""splitmix64 and xoshiro256+ pseudo-random number generators.

Both follow the published reference algorithms bit for bit (verified
against a C oracle in the test suite). splitmix64 seeds and derives
decorrelated streams; xoshiro256+ drives all stochastic search.
"""

from __future__ import annotations

__all__ = ["splitmix64_next", "derive_seed", "Xoshiro256Plus"]

_M64 = (1 << 64) - 1
_INV_2_53 = 2.0**-53


def splitmix64_next(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (output, new_state)."""
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31), state


def derive_seed(seed: int, index: int) -> int:
    """Decorrelated 64-bit sub-seed for instance `index` of a global seed."""
    state = seed & _M64
    out = 0
    for _ in range(index + 1):
        out, state = splitmix64_next(state)
    return out


class Xoshiro256Plus:
    """xoshiro256+ with a 256-bit state, seeded via splitmix64 expansion."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        state = seed & _M64
        self.s0, state = splitmix64_next(state)
        self.s1, state = splitmix64_next(state)
        self.s2, state = splitmix64_next(state)
        self.s3, state = splitmix64_next(state)
        if self.s0 == self.s1 == self.s2 == self.s3 == 0:
            # all-zero state is invalid; cannot happen via splitmix64
            # expansion of any seed, but guard the invariant anyway
            self.s0 = 1

    def next_u64(self) -> int:
        result = (self.s0 + self.s3) & _M64
        t = (self.s1 << 17) & _M64
        self.s2 ^= self.s0
        self.s3 ^= self.s1
        self.s1 ^= self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        s3 = self.s3
        self.s3 = ((s3 << 45) | (s3 >> 19)) & _M64
        return result

    def next_double(self) -> float:
        """Uniform binary64 in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + self.next_double() * (hi - lo)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.next_double() * n)

    def state(self) -> tuple[int, int, int, int]:
        return (self.s0, self.s1, self.s2, self.s3)
