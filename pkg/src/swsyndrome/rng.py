"""Portable pseudo-random streams.

The generator is xoshiro256** seeded through splitmix64, written out in full so
that streams are reproducible from the algorithm alone:

* ``splitmix64(z)``: ``z += 0x9E3779B97F4A7C15``;
  ``z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9``;
  ``z = (z ^ (z >> 27)) * 0x94D049BB133111EB``; return ``z ^ (z >> 31)``
  (all arithmetic mod 2**64; the incremented ``z`` is the new splitmix state).
* A stream for ``(seed, index)`` starts from the splitmix state
  ``seed ^ (index * 0xD1B54A32D192ED03 mod 2**64)`` and takes its four
  xoshiro words from four successive splitmix64 outputs.
* ``random()`` returns ``(next_u64() >> 11) * 2**-53``.
* ``below(n)`` returns ``(next_u64() * n) >> 64`` (multiply-shift, no rejection).
"""

from __future__ import annotations

import numpy as np

__all__ = ["Stream", "splitmix64", "trial_stream"]

MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INDEX_MIX = 0xD1B54A32D192ED03


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step; returns ``(new_state, output)``."""
    state = (state + _GOLDEN) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


class Stream:
    """xoshiro256** generator."""

    def __init__(self, seed: int):
        sm = int(seed) & MASK
        words = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            words.append(out)
        if not any(words):
            words[0] = 1
        self._s = words
        self.seed = int(seed) & MASK

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randoms(self, count: int) -> np.ndarray:
        return np.array([self.random() for _ in range(count)], dtype=np.float64)

    def below(self, n: int) -> int:
        return (self.next_u64() * int(n)) >> 64

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def choice(self, options):
        return options[self.below(len(options))]

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of ``0..n-1``."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return np.array(perm, dtype=np.int64)


def trial_stream(seed: int, index: int) -> Stream:
    """The stream owned by trial ``index`` under master ``seed``."""
    return Stream((int(seed) ^ ((int(index) * _INDEX_MIX) & MASK)) & MASK)
