"""Deterministic 64-bit PRNG used for all reproducible weight generation.

The generator is SplitMix64, fixed here bit-for-bit so that sweeps produce
identical weights on any platform or Python build:

    state   = (state + 0x9E3779B97F4A7C15) mod 2^64
    z       = state
    z       = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z       = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output  = z ^ (z >> 31)

``uniform01`` maps the top 53 output bits onto [0, 1).  Per-modulus streams
for sweeps are derived via :func:`derive_seed`.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """Sequential SplitMix64 stream seeded with a 64-bit integer."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform01(self) -> float:
        # top 53 bits -> dyadic rational in [0, 1)
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def sign(self) -> int:
        """+1 or -1 from the top output bit."""
        return 1 if self.next_u64() >> 63 == 0 else -1


def derive_seed(seed: int, salt: int) -> int:
    """Per-instance seed for sweeps: first output of SplitMix64 seeded with
    ``seed XOR ((salt * 0x9E3779B97F4A7C15) mod 2^64)``."""
    return SplitMix64((seed ^ ((salt * _GAMMA) & _MASK64)) & _MASK64).next_u64()
