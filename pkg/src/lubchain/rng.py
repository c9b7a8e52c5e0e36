"""Deterministic pseudo-random numbers for the seeded test suites.

Scalar draws come from xorshift64*, array draws from splitmix64 run in
counter mode off a scalar draw. Both algorithms are fixed by name so a
seeded run produces the same stream on any platform or implementation,
which `random.Random` does not guarantee across versions.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64_step(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


class XorShift64Star:
    """xorshift64* stream; 53 random bits per uniform double."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        state, z = _splitmix64_step(self.seed)
        while z == 0:  # xorshift state must never be zero
            state, z = _splitmix64_step(state)
        self._state = z

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] by rejection-free modulo of 64 bits."""
        span = hi - lo + 1
        return lo + self.next_u64() % span

    def uniform_array(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        """Vectorized uniforms from a splitmix64 counter stream.

        The stream key is one scalar draw, so interleaving scalar and array
        requests stays reproducible.
        """
        key = np.uint64(self.next_u64())
        idx = np.arange(1, n + 1, dtype=np.uint64)
        z = key + idx * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
        u = (z >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return lo + (hi - lo) * u

    def spawn(self) -> "XorShift64Star":
        """Independent child stream (used to give each trial its own seed)."""
        return XorShift64Star(self.next_u64())
