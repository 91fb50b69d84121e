"""Counter-based SplitMix64.

SplitMix64 (Steele, Lea & Flood, 2014) advances its state by a fixed odd
constant and scrambles it with a fixed finaliser, so the n-th output is a
pure function of (seed, n). That makes it usable as a counter-based
generator: draw ``i`` of a run is ``mix(seed + (i + 1) * GAMMA)`` no matter
which worker computes it or in what order.
"""
from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


class CounterRNG:
    """Stateless stream of 64-bit words addressed by index."""

    def __init__(self, seed: int):
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
        self.seed = seed

    def word(self, index: int) -> int:
        return mix64(self.seed + (index + 1) * GAMMA)

    def words(self, start: int, stop: int) -> np.ndarray:
        idx = np.arange(start + 1, stop + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + idx * np.uint64(GAMMA)
            return _mix64_array(z)

    def uniforms(self, start: int, stop: int) -> np.ndarray:
        """Doubles in [0, 1) built from the top 53 bits of each word."""
        return (self.words(start, stop) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def split(self, stream: int) -> CounterRNG:
        """Independent child generator for sub-stream ``stream``."""
        return CounterRNG(mix64(self.seed ^ mix64(stream + GAMMA)))
