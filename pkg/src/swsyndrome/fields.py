"""Prime-field arithmetic and tuple <-> index packing.

Tuples of length ``m`` over GF(q) are packed into integers in ``[0, q**m)``
with position 0 as the least-significant base-q digit, so ``(1, 0, 1)`` over
GF(2) packs to ``5``.  Every file format in this package uses that order.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Field", "pack", "unpack"]


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


class Field:
    """The prime field GF(q), ``2 <= q <= 251``.

    Elements are plain Python ints in ``0..q-1``.
    """

    def __init__(self, q: int):
        q = int(q)
        if not 2 <= q <= 251 or not _is_prime(q):
            raise ValueError(f"GF(q) requires a prime 2 <= q <= 251, got {q}")
        self.q = q
        self._tables = {}

    def __repr__(self):
        return f"Field({self.q})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.q == self.q

    def __hash__(self):
        return hash(("Field", self.q))

    def add(self, a, b):
        return (a + b) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def mul(self, a, b):
        return (a * b) % self.q

    def neg(self, a):
        return (-a) % self.q

    def inv(self, a):
        if a % self.q == 0:
            raise ZeroDivisionError("0 has no inverse in GF(q)")
        return pow(int(a), self.q - 2, self.q)

    def arith(self, a, b, op):
        """Dispatch ``add``/``sub``/``mul``/``neg`` by name (``b`` ignored for neg)."""
        if op == "neg":
            return self.neg(a)
        if op not in ("add", "sub", "mul"):
            raise ValueError(f"unknown operation {op!r}")
        return getattr(self, op)(a, b)

    # tuple-level tables, cached per width
    def size(self, m: int) -> int:
        return self.q**m

    def tuple_add_table(self, m: int) -> np.ndarray:
        return self._tuple_tables(m)[0]

    def tuple_sub_table(self, m: int) -> np.ndarray:
        return self._tuple_tables(m)[1]

    def _tuple_tables(self, m):
        try:
            return self._tables[m]
        except KeyError:
            pass
        digits = unpack(np.arange(self.q**m), self.q, m)
        add = pack((digits[:, None, :] + digits[None, :, :]) % self.q, self.q)
        sub = pack((digits[:, None, :] - digits[None, :, :]) % self.q, self.q)
        add.setflags(write=False)
        sub.setflags(write=False)
        self._tables[m] = (add, sub)
        return add, sub


def pack(digits, q: int, m: int | None = None):
    """Pack tuples (last axis) into base-q indices, least-significant digit first.

    Accepts a single tuple (returns an int) or an array of shape ``(..., m)``.
    """
    arr = np.asarray(digits, dtype=np.int64)
    if m is not None and arr.shape[-1:] != (m,):
        raise ValueError(f"expected tuples of length {m}, got shape {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= q):
        raise ValueError(f"tuple digits must lie in [0, {q})")
    weights = q ** np.arange(arr.shape[-1], dtype=np.int64)
    out = arr @ weights
    if np.ndim(out) == 0:
        return int(out)
    return out


def unpack(index, q: int, m: int):
    """Inverse of :func:`pack`; returns an int array with a trailing axis of length m."""
    idx = np.asarray(index, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= q**m):
        raise ValueError(f"tuple index out of range [0, {q}**{m})")
    weights = q ** np.arange(m, dtype=np.int64)
    out = (idx[..., None] // weights) % q
    if np.ndim(index) == 0:
        return tuple(int(v) for v in out)
    return out
