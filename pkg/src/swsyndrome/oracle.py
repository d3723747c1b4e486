"""Exhaustive-enumeration ground truth for small instances.

Nothing here touches the trellis or the BCJR engine: parities are obtained by
walking the realization's state tables for all candidate sequences at once,
and posteriors are plain weighted sums over the enumerated sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bcjr import hard_decision
from .channels import SourcePrior, SymbolChannel, SyndromeChannel
from .errors import EnumerationBudgetExceeded
from .fields import pack, unpack

__all__ = ["OracleResult", "enumerate_coset", "exact_marginals", "BUDGET"]

BUDGET = 2**20


@dataclass(eq=False)
class OracleResult:
    post_s: np.ndarray
    post_p: np.ndarray
    hard_s: np.ndarray
    hard_p: np.ndarray
    sequences: np.ndarray
    weights: np.ndarray

    @property
    def hard(self):
        return np.concatenate([self.hard_s, self.hard_p], axis=1)


def _all_index_sequences(alphabet, N):
    if alphabet**N > BUDGET:
        raise EnumerationBudgetExceeded(f"{alphabet}**{N} sequences exceed the budget of {BUDGET}")
    return unpack(np.arange(alphabet**N), alphabet, N).reshape(alphabet**N, N)


def _batch_parity(code, xs_idx):
    """Parity tuple indices for many systematic sequences (rows), from state 0."""
    count, N = xs_idx.shape
    state = np.zeros(count, dtype=np.int64)
    out = np.empty_like(xs_idx)
    for t in range(N):
        out[:, t] = code.output[state, xs_idx[:, t]]
        state = code.next_state[state, xs_idx[:, t]]
    return out


def enumerate_coset(code, s, N=None):
    """All sequences with syndrome ``s`` as an array of shape (q**(k N), N, n).

    Generated from the free systematic part: ``xp = P(xs) + s``.
    """
    q = code.q
    s = np.asarray(s, dtype=np.int64).reshape(-1, code.n_minus_k)
    N = len(s) if N is None else N
    if len(s) != N:
        raise ValueError("syndrome length does not match N")
    xs_idx = _all_index_sequences(code.num_inputs, N)
    p = unpack(_batch_parity(code, xs_idx), q, code.n_minus_k)
    xs = unpack(xs_idx, q, code.k)
    xp = (p + s[None]) % q
    return np.concatenate([xs, xp], axis=2)


def _symbol_weights(prior, ch, y, x):
    """prod over symbols of p(x | y), for candidate sequences x (count, N, n)."""
    lik = prior.pmf[x] * ch.W[x, y[None]]
    norm = (prior.pmf[:, None] * ch.W).sum(axis=0)[y]
    return np.prod((lik / norm[None]).reshape(len(x), -1), axis=1)


def exact_marginals(code, y, prior: SourcePrior, ch: SymbolChannel, s=None, r=None,
                    sc: SyndromeChannel | None = None) -> OracleResult:
    """Exact symbol posteriors ``p(x_i | y, s)`` or ``p(x_i | y, r)`` by enumeration.

    With an exact syndrome only the coset is enumerated; with a received
    syndrome every source sequence is weighted by ``prod_i p(r_i | s(x)_i)``.
    """
    q, k, nk = code.q, code.k, code.n_minus_k
    y = np.asarray(y, dtype=np.int64).reshape(-1, code.n)
    N = len(y)
    if s is not None:
        x = enumerate_coset(code, s, N)
        w = _symbol_weights(prior, ch, y, x)
    else:
        if r is None or sc is None:
            raise ValueError("give the exact syndrome s, or r together with sc")
        if q ** (code.n * N) > BUDGET:
            raise EnumerationBudgetExceeded(f"{q}**{code.n * N} sequences exceed the budget of {BUDGET}")
        flat = _all_index_sequences(q, code.n * N)
        x = flat.reshape(-1, N, code.n)
        w = _symbol_weights(prior, ch, y, x)
        xs_idx = pack(x[:, :, :k], q)
        p = unpack(_batch_parity(code, xs_idx), q, nk)
        syn = pack((x[:, :, k:] - p) % q, q)
        r_idx = pack(np.asarray(r, dtype=np.int64).reshape(N, nk), q)
        w = w * np.prod(sc.Wr[syn, r_idx[None]], axis=1)
    total = w.sum()
    if not total > 0:
        raise ValueError("evidence has zero probability")
    xs_idx = pack(x[:, :, :k], q)
    xp_idx = pack(x[:, :, k:], q)
    post_s = np.zeros((N, code.num_inputs))
    post_p = np.zeros((N, code.num_parities))
    for t in range(N):
        post_s[t] = np.bincount(xs_idx[:, t], weights=w, minlength=code.num_inputs)
        post_p[t] = np.bincount(xp_idx[:, t], weights=w, minlength=code.num_parities)
    post_s /= total
    post_p /= total
    return OracleResult(
        post_s=post_s,
        post_p=post_p,
        hard_s=unpack(hard_decision(post_s), q, k).reshape(N, k),
        hard_p=unpack(hard_decision(post_p), q, nk).reshape(N, nk),
        sequences=x,
        weights=w / total,
    )
