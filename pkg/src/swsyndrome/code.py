"""Parity realizations, trellis sections, encoders and syndrome formers.

A convolutional code is described by the state machine realizing its parity
transfer matrix ``P(D)``: ``k`` input symbols per step, ``n - k`` parity
symbols out.  Sequences are numpy integer arrays with one row per time step,
e.g. a systematic sequence has shape ``(N, k)``.

Source sequences are laid out as ``x_i = [xs_i | xp_i]`` (shape ``(N, n)``);
the packed index of ``x_i`` is ``pack(xs_i) + q**k * pack(xp_i)``, consistent
with the least-significant-first digit order of :mod:`swsyndrome.fields`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .fields import Field, pack, unpack

__all__ = [
    "ParityRealization",
    "TrellisSection",
    "ExpandedSection",
    "TurboCode",
    "build_trellis",
    "build_expanded",
    "systematic_encode",
    "syndrome_form",
    "coset_representative",
    "turbo_encode",
    "turbo_syndrome_form",
    "interleave",
    "deinterleave",
]


def _strip(coeffs, q):
    c = [int(v) % q for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return c


class ParityRealization:
    """State machine realizing a k-in (n-k)-out parity transfer matrix over GF(q).

    Parameters
    ----------
    field : Field
    k, n_minus_k : int
        Input and output tuple widths.
    next_state, output : array_like, shape (num_states, q**k)
        ``next_state[s, u]`` is the successor of state ``s`` on input tuple
        index ``u``; ``output[s, u]`` the packed parity tuple emitted.

    States are relabeled in breadth-first order from state 0 and states not
    reachable from 0 are dropped, so every realization is canonical.
    """

    def __init__(self, field, k, n_minus_k, next_state, output):
        if not isinstance(field, Field):
            field = Field(field)
        k, n_minus_k = int(k), int(n_minus_k)
        if k < 1 or n_minus_k < 1:
            raise ValueError("k and n - k must both be at least 1")
        nxt = np.asarray(next_state, dtype=np.int64)
        out = np.asarray(output, dtype=np.int64)
        n_in = field.q**k
        if nxt.ndim != 2 or nxt.shape[1] != n_in or out.shape != nxt.shape:
            raise ValueError(f"state tables must have shape (num_states, {n_in})")
        if nxt.min() < 0 or nxt.max() >= nxt.shape[0]:
            raise ValueError("next_state refers to a nonexistent state")
        if out.min() < 0 or out.max() >= field.q**n_minus_k:
            raise ValueError("output index out of range")
        nxt, out = _canonical(nxt, out)
        nxt.setflags(write=False)
        out.setflags(write=False)
        self.field = field
        self.k = k
        self.n_minus_k = n_minus_k
        self.next_state = nxt
        self.output = out

    @classmethod
    def from_polynomials(cls, field, taps, feedback=None):
        """Realize ``p_l(D) = x(D) g_l(D) / f(D)`` for a single input (k = 1).

        ``taps`` holds one coefficient list per parity output and ``feedback``
        the optional denominator ``f(D)``, all in ascending powers of D.
        ``f_0`` must be nonzero.  The state is the last ``m`` values of the
        feedback register ``w_i = (x_i - sum_{j>=1} f_j w_{i-j}) / f_0``.
        """
        if not isinstance(field, Field):
            field = Field(field)
        q = field.q
        taps = [_strip(t, q) for t in taps]
        if not taps:
            raise ValueError("at least one parity output is required")
        fb = _strip(feedback, q) if feedback is not None else [1]
        if not fb or fb[0] == 0:
            raise ValueError("feedback polynomial needs a nonzero constant term")
        m = max([len(t) - 1 for t in taps] + [len(fb) - 1, 0])
        taps = [t + [0] * (m + 1 - len(t)) for t in taps]
        fb = fb + [0] * (m + 1 - len(fb))
        f0_inv = field.inv(fb[0])
        num_states = q**m
        nxt = np.zeros((num_states, q), dtype=np.int64)
        out = np.zeros((num_states, q), dtype=np.int64)
        for s in range(num_states):
            # reg[j] = w_{i-1-j}
            reg = unpack(s, q, m) if m else ()
            for u in range(q):
                acc = u - sum(fb[j] * reg[j - 1] for j in range(1, m + 1))
                w = (acc * f0_inv) % q
                hist = (w,) + tuple(reg)
                parity = [sum(t[j] * hist[j] for j in range(m + 1)) % q for t in taps]
                out[s, u] = pack(parity, q)
                nxt[s, u] = pack(hist[:m], q) if m else 0
        return cls(field, 1, len(taps), nxt, out)

    @property
    def q(self):
        return self.field.q

    @property
    def n(self):
        return self.k + self.n_minus_k

    @property
    def num_states(self):
        return self.next_state.shape[0]

    @property
    def num_inputs(self):
        return self.field.q**self.k

    @property
    def num_parities(self):
        return self.field.q**self.n_minus_k

    def __repr__(self):
        return (
            f"ParityRealization(q={self.q}, k={self.k}, n-k={self.n_minus_k}, "
            f"states={self.num_states})"
        )

    @cached_property
    def trellis(self):
        return build_trellis(self)

    @cached_property
    def expanded(self):
        return build_expanded(self.trellis)


def _canonical(nxt, out):
    order = [0]
    label = {0: 0}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        for t in nxt[s]:
            t = int(t)
            if t not in label:
                label[t] = len(order)
                order.append(t)
                queue.append(t)
    relabel = np.full(nxt.shape[0], -1, dtype=np.int64)
    for old, new in label.items():
        relabel[old] = new
    return relabel[nxt[order]], out[order].copy()


@dataclass(frozen=True, eq=False)
class TrellisSection:
    """Transition set of the code trellis; one row per branch.

    The indicator ``chi(prev, next, xs, xp)`` is 1 exactly on the listed
    branches.  Exactly ``q**k`` branches leave every state.
    """

    field: Field
    k: int
    n_minus_k: int
    prev: np.ndarray
    xs: np.ndarray
    xp: np.ndarray
    next: np.ndarray
    num_states: int

    @property
    def num_inputs(self):
        return self.field.q**self.k

    @property
    def num_parities(self):
        return self.field.q**self.n_minus_k

    def __len__(self):
        return len(self.prev)

    def transitions(self):
        return set(zip(*(a.tolist() for a in (self.prev, self.xs, self.xp, self.next))))


@dataclass(frozen=True, eq=False)
class ExpandedSection:
    """Source-coding trellis: branches labeled by a source n-tuple and a syndrome.

    Each code branch with parity label ``pbar`` becomes ``q**(n-k)`` parallel
    branches, one per ``xp``, carrying the syndrome label ``s = xp - pbar``.
    ``x`` is the packed n-tuple ``xs + q**k * xp``.
    """

    field: Field
    k: int
    n_minus_k: int
    prev: np.ndarray
    x: np.ndarray
    s: np.ndarray
    next: np.ndarray
    num_states: int

    @property
    def num_inputs(self):
        return self.field.q**self.k

    @property
    def num_parities(self):
        return self.field.q**self.n_minus_k

    @property
    def xs(self):
        return self.x % self.num_inputs

    @property
    def xp(self):
        return self.x // self.num_inputs

    def __len__(self):
        return len(self.prev)

    def transitions(self):
        return set(zip(*(a.tolist() for a in (self.prev, self.x, self.s, self.next))))


def _frozen(*arrays):
    for a in arrays:
        a.setflags(write=False)


def build_trellis(r: ParityRealization) -> TrellisSection:
    S, U = r.next_state.shape
    prev = np.repeat(np.arange(S), U)
    xs = np.tile(np.arange(U), S)
    xp = r.output.reshape(-1).copy()
    nxt = r.next_state.reshape(-1).copy()
    _frozen(prev, xs, xp, nxt)
    return TrellisSection(r.field, r.k, r.n_minus_k, prev, xs, xp, nxt, S)


def build_expanded(t: TrellisSection) -> ExpandedSection:
    Qp = t.num_parities
    prev = np.repeat(t.prev, Qp)
    nxt = np.repeat(t.next, Qp)
    pbar = np.repeat(t.xp, Qp)
    xp = np.tile(np.arange(Qp), len(t))
    x = np.repeat(t.xs, Qp) + t.num_inputs * xp
    s = t.field.tuple_sub_table(t.n_minus_k)[xp, pbar]
    _frozen(prev, x, s, nxt)
    return ExpandedSection(t.field, t.k, t.n_minus_k, prev, x, s, nxt, t.num_states)


def _as_tuples(seq, width, q, what):
    arr = np.asarray(seq, dtype=np.int64)
    if arr.ndim == 1 and width == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != width:
        raise ValueError(f"{what} must have shape (N, {width}), got {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= q):
        raise ValueError(f"{what} symbols must lie in [0, {q})")
    return arr


def systematic_encode(r: ParityRealization, xs) -> np.ndarray:
    """Parity sequence of ``xs`` (shape ``(N, k)``), encoder started in state 0."""
    q = r.q
    xs = _as_tuples(xs, r.k, q, "systematic sequence")
    u = pack(xs, q) if len(xs) else np.zeros(0, dtype=np.int64)
    p = np.empty(len(u), dtype=np.int64)
    state = 0
    for i, ui in enumerate(u.tolist()):
        p[i] = r.output[state, ui]
        state = r.next_state[state, ui]
    return unpack(p, q, r.n_minus_k)


def syndrome_form(r: ParityRealization, x) -> np.ndarray:
    """Systematic syndrome ``s_i = xp_i - p_i`` of a source sequence of shape ``(N, n)``."""
    x = _as_tuples(x, r.n, r.q, "source sequence")
    p = systematic_encode(r, x[:, : r.k])
    return (x[:, r.k :] - p) % r.q


def coset_representative(r: ParityRealization, s) -> np.ndarray:
    """The coset member ``c_i = [0 | s_i]``."""
    s = _as_tuples(s, r.n_minus_k, r.q, "syndrome")
    return np.concatenate([np.zeros((len(s), r.k), dtype=np.int64), s], axis=1)


def _check_perm(perm):
    perm = np.array(perm, dtype=np.int64)
    if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(len(perm))):
        raise ValueError("interleaver must be a permutation of 0..N-1")
    return perm


def interleave(perm, seq):
    """``out[i] = seq[perm[i]]`` along the first axis."""
    return np.asarray(seq)[np.asarray(perm)]


def deinterleave(perm, seq):
    seq = np.asarray(seq)
    out = np.empty_like(seq)
    out[np.asarray(perm)] = seq
    return out


class TurboCode:
    """Parallel concatenation of two parity realizations sharing q and k.

    The systematic k-tuples are permuted by ``perm`` before entering
    constituent 1.  Sources are laid out ``[xs | x0 | x1]`` where ``xs`` has
    ``N`` k-tuples and ``xj`` has ``N`` (n_j - k)-tuples; see
    :meth:`split` and :meth:`join`.
    """

    def __init__(self, c0: ParityRealization, c1: ParityRealization, perm):
        if c0.field != c1.field or c0.k != c1.k:
            raise ValueError("turbo constituents must share the field and k")
        self.constituents = (c0, c1)
        self.perm = _check_perm(perm)
        self.perm.setflags(write=False)

    @property
    def field(self):
        return self.constituents[0].field

    @property
    def q(self):
        return self.field.q

    @property
    def k(self):
        return self.constituents[0].k

    @property
    def N(self):
        return len(self.perm)

    @property
    def widths(self):
        """Per-time tuple widths ``(k, n0 - k, n1 - k)``."""
        c0, c1 = self.constituents
        return (self.k, c0.n_minus_k, c1.n_minus_k)

    @property
    def length(self):
        return self.N * sum(self.widths)

    def split(self, flat):
        """Cut a flat symbol vector in layout ``[xs | x0 | x1]`` into three (N, w) arrays."""
        flat = np.asarray(flat, dtype=np.int64).reshape(-1)
        if len(flat) != self.length:
            raise ValueError(f"turbo source needs {self.length} symbols, got {len(flat)}")
        parts, start = [], 0
        for w in self.widths:
            parts.append(flat[start : start + self.N * w].reshape(self.N, w))
            start += self.N * w
        return tuple(parts)

    def join(self, xs, x0, x1):
        return np.concatenate([np.asarray(a).reshape(-1) for a in (xs, x0, x1)])


def turbo_encode(tc: TurboCode, xs):
    c0, c1 = tc.constituents
    xs = _as_tuples(xs, tc.k, tc.q, "systematic sequence")
    if len(xs) != tc.N:
        raise ValueError(f"turbo block length is {tc.N}, got {len(xs)}")
    return systematic_encode(c0, xs), systematic_encode(c1, interleave(tc.perm, xs))


def turbo_syndrome_form(tc: TurboCode, x):
    """Syndromes ``(s0, s1)`` of a source given flat or as ``(xs, x0, x1)``."""
    xs, x0, x1 = tc.split(x) if not isinstance(x, tuple) else x
    p0, p1 = turbo_encode(tc, xs)
    x0 = _as_tuples(x0, tc.widths[1], tc.q, "x0")
    x1 = _as_tuples(x1, tc.widths[2], tc.q, "x1")
    if len(x0) != tc.N or len(x1) != tc.N:
        raise ValueError("parity portions must have N tuples each")
    return (x0 - p0) % tc.q, (x1 - p1) % tc.q
