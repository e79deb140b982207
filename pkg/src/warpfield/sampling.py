"""Deterministic sampling primitives.

Every randomized quantity in the tool (sample points, test vectors,
synthetic field coefficients) is drawn from the shift-based generator
below, so identical inputs always produce identical reports, on any
platform.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1

# splitmix-style update constants
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def subseed(seed: int, *labels: str) -> int:
    """Derive a stream seed from a base seed and string labels (FNV-1a)."""
    h = (_FNV_OFFSET ^ (seed & _MASK)) * _FNV_PRIME & _MASK
    for label in labels:
        for byte in label.encode("utf-8"):
            h = ((h ^ byte) * _FNV_PRIME) & _MASK
    return h


class SplitMix:
    """64-bit shift-based generator with a fixed update sequence."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform draw in [lo, hi) with 53 bits of resolution."""
        u = (self.next_u64() >> 11) * (2.0 ** -53)
        return lo + (hi - lo) * u

    def symmetric(self, scale: float = 1.0) -> float:
        """Uniform draw in [-scale, scale)."""
        return self.uniform(-scale, scale)

    def vector(self, n: int, scale: float = 1.0) -> list[float]:
        return [self.symmetric(scale) for _ in range(n)]


DEFAULT_SEED = 24181
DEFAULT_SAMPLES = 64
