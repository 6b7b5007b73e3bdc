"""Deterministic, cross-platform random number generation.

The scalar stream is xoshiro256** seeded through splitmix64, matching the
published reference implementations bit for bit (see tests for frozen
reference outputs).  Bulk array generation derives a fresh splitmix64
counter sequence from the next scalar draw, so large uniform/normal blocks
are produced with vectorized numpy ops while remaining a pure function of
the seed.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MUL1 = 0xBF58476D1CE4E5B9
_SM_MUL2 = 0x94D049BB133111EB


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (output, next_state)."""
    state = (state + _SM_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _SM_MUL1) & _MASK64
    z = ((z ^ (z >> 27)) * _SM_MUL2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64, state


def _splitmix64_block(seed: int, n: int) -> np.ndarray:
    """n splitmix64 outputs from `seed` as a uint64 array, fully vectorized."""
    with np.errstate(over="ignore"):
        idx = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(seed) + idx * np.uint64(_SM_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_SM_MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_SM_MUL2)
        return z ^ (z >> np.uint64(31))


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Rng:
    """xoshiro256** stream with splitmix64 seeding and bulk array draws.

    Identical seeds produce identical streams on every platform: the state
    transition uses only 64-bit integer arithmetic, and uint64 -> float64
    conversion is exact scaling by 2**-53.
    """

    def __init__(self, seed: int):
        self._seed = int(seed) & _MASK64
        s = self._seed
        state = []
        for _ in range(4):
            out, s = splitmix64(s)
            state.append(out)
        self._s = state

    @property
    def seed(self) -> int:
        return self._seed

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """One float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] via rejection on the top range."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + (x % span)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]

    def spawn(self) -> "Rng":
        """Independent child generator seeded from this stream."""
        return Rng(self.next_u64())

    # -- bulk draws (vectorized; one scalar draw consumed per call) --

    def uniform_array(self, shape) -> np.ndarray:
        """Array of floats in [0, 1), row-major fill order."""
        n = int(np.prod(shape)) if np.iterable(shape) else int(shape)
        block = _splitmix64_block(self.next_u64(), max(n, 1))[:n]
        out = (block >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return out.reshape(shape)

    def normal_array(self, shape, std: float = 1.0) -> np.ndarray:
        """Array of N(0, std^2) draws via Box-Muller on bulk uniforms."""
        n = int(np.prod(shape)) if np.iterable(shape) else int(shape)
        m = max((n + 1) // 2, 1)
        block = _splitmix64_block(self.next_u64(), 2 * m)
        # u1 in (0, 1] so the log is finite
        u1 = ((block[:m] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u2 = (block[m:] >> np.uint64(11)).astype(np.float64) * 2.0**-53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * math.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        return (std * z).reshape(shape)
