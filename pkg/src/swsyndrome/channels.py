"""Source prior, correlation channel, syndrome channel and belief messages.

The correlation channel acts independently on every GF(q) symbol, so the
belief about a tuple is the product of per-symbol beliefs.  Messages are
numpy vectors normalized to sum to one.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateEvidence

__all__ = [
    "SymbolChannel",
    "SourcePrior",
    "SyndromeChannel",
    "qsc",
    "posterior_message",
    "posterior_messages",
    "tuple_messages",
    "translated_prior",
    "sample_pair",
    "sample_pairs",
    "syndrome_message",
    "syndrome_messages",
    "sample_syndrome",
]

ROW_ATOL = 1e-12


def _stochastic(W, what):
    W = np.array(W, dtype=np.float64)
    if W.ndim != 2 or W.size == 0:
        raise ValueError(f"{what} must be a nonempty 2-D matrix")
    if (W < 0).any() or not np.isfinite(W).all():
        raise ValueError(f"{what} entries must be finite and nonnegative")
    if np.abs(W.sum(axis=1) - 1).max() > ROW_ATOL:
        raise ValueError(f"{what} rows must sum to 1")
    W.setflags(write=False)
    return W


class SymbolChannel:
    """Discrete memoryless channel ``W[x, y] = p(y | x)`` from GF(q) to M outputs."""

    def __init__(self, W):
        self.W = _stochastic(W, "channel matrix")

    @property
    def q_in(self):
        return self.W.shape[0]

    @property
    def M(self):
        return self.W.shape[1]

    @property
    def additive(self):
        """True when ``y = x + e`` with noise independent of x (circulant W)."""
        if self.M != self.q_in:
            return False
        q = self.q_in
        ref = self.W[0]
        return all(np.allclose(self.W[x], np.roll(ref, x), rtol=0, atol=1e-15) for x in range(q))

    def __repr__(self):
        return f"SymbolChannel(q_in={self.q_in}, M={self.M})"


def qsc(q: int, eps: float) -> SymbolChannel:
    """q-ary symmetric channel with total crossover probability ``eps``."""
    if not 0 <= eps <= (q - 1) / q:
        raise ValueError(f"qsc crossover must lie in [0, {q - 1}/{q}], got {eps}")
    W = np.full((q, q), eps / (q - 1))
    np.fill_diagonal(W, 1.0 - eps)
    return SymbolChannel(W)


class SourcePrior:
    """i.i.d. pmf of the source symbols over GF(q)."""

    def __init__(self, pmf):
        pmf = np.array(pmf, dtype=np.float64)
        if pmf.ndim != 1 or (pmf < 0).any() or abs(pmf.sum() - 1) > ROW_ATOL:
            raise ValueError("prior must be a nonnegative vector summing to 1")
        pmf.setflags(write=False)
        self.pmf = pmf

    @classmethod
    def uniform(cls, q):
        return cls(np.full(q, 1.0 / q))

    @property
    def q(self):
        return len(self.pmf)

    def __repr__(self):
        return f"SourcePrior({self.pmf.tolist()})"


class SyndromeChannel:
    """Channel over packed syndrome tuples: ``Wr[s, r] = p(r | s)``."""

    def __init__(self, Wr):
        Wr = _stochastic(Wr, "syndrome channel matrix")
        if Wr.shape[0] != Wr.shape[1]:
            raise ValueError("syndrome channel must map the tuple alphabet onto itself")
        self.Wr = Wr

    @classmethod
    def error_free(cls, size):
        return cls(np.eye(size))

    @classmethod
    def symmetric(cls, size, eps):
        """Symmetric channel over the ``size`` packed tuple values."""
        return cls(qsc_matrix(size, eps))

    @property
    def size(self):
        return self.Wr.shape[0]

    @property
    def is_error_free(self):
        return bool(np.array_equal(self.Wr, np.eye(self.size)))

    def __repr__(self):
        return f"SyndromeChannel(size={self.size}, error_free={self.is_error_free})"


def qsc_matrix(size, eps):
    if not 0 <= eps <= (size - 1) / size:
        raise ValueError(f"crossover must lie in [0, {size - 1}/{size}], got {eps}")
    W = np.full((size, size), eps / (size - 1))
    np.fill_diagonal(W, 1.0 - eps)
    return W


def _normalize_rows(joint, what):
    total = joint.sum(axis=-1, keepdims=True)
    if (total <= 0).any():
        raise DegenerateEvidence(f"{what} has zero probability under every hypothesis")
    return joint / total


def posterior_message(prior: SourcePrior, ch: SymbolChannel, y: int) -> np.ndarray:
    """``mu(x) ∝ prior(x) W[x, y]`` normalized."""
    if not 0 <= y < ch.M:
        raise ValueError(f"observation {y} outside the output alphabet of size {ch.M}")
    return _normalize_rows(prior.pmf * ch.W[:, y], f"observation y={y}")


def posterior_messages(prior: SourcePrior, ch: SymbolChannel, y) -> np.ndarray:
    """Vectorized :func:`posterior_message`; appends an axis of length q."""
    y = np.asarray(y, dtype=np.int64)
    if y.size and (y.min() < 0 or y.max() >= ch.M):
        raise ValueError(f"observations must lie in [0, {ch.M})")
    return _normalize_rows(prior.pmf * np.moveaxis(ch.W[:, y], 0, -1), "observation")


def tuple_messages(per_symbol: np.ndarray) -> np.ndarray:
    """Combine per-symbol messages of shape (N, m, q) into tuple messages (N, q**m).

    Symbol 0 is the least-significant digit of the packed tuple index.
    """
    N, m, q = per_symbol.shape
    out = per_symbol[:, 0, :]
    for j in range(1, m):
        out = (per_symbol[:, j, :, None] * out[:, None, :]).reshape(N, -1)
    return out / out.sum(axis=1, keepdims=True)


def translated_prior(prior: SourcePrior, shift: int) -> SourcePrior:
    """Prior seen from a shifted origin: ``p'(v) = p(v + shift)``."""
    q = prior.q
    return SourcePrior(prior.pmf[(np.arange(q) + shift) % q])


def _inverse_cdf(rows, u):
    cdf = np.cumsum(rows, axis=-1)
    idx = (u[..., None] >= cdf).sum(axis=-1)
    # guard against cdf[-1] rounding below 1
    return np.minimum(idx, rows.shape[-1] - 1)


def sample_pair(prior: SourcePrior, ch: SymbolChannel, rng) -> tuple[int, int]:
    """Draw ``x ~ prior`` then ``y ~ W[x, :]``, consuming two uniforms."""
    x, y = sample_pairs(prior, ch, rng, 1)
    return int(x[0]), int(y[0])


def sample_pairs(prior: SourcePrior, ch: SymbolChannel, rng, count: int):
    """``count`` independent (x, y) draws; same stream usage as repeated :func:`sample_pair`."""
    u = rng.randoms(2 * count)
    x = _inverse_cdf(prior.pmf, u[0::2])
    y = _inverse_cdf(ch.W[x], u[1::2])
    return x, y


def sample_syndrome(sc: SyndromeChannel, s, rng) -> np.ndarray:
    """Pass packed syndrome tuples through the syndrome channel."""
    s = np.asarray(s, dtype=np.int64)
    u = rng.randoms(s.size).reshape(s.shape)
    return _inverse_cdf(sc.Wr[s], u)


def syndrome_message(sc: SyndromeChannel, r: int) -> np.ndarray:
    """``mu(s') ∝ p(r | s')`` over packed syndrome tuples."""
    if not 0 <= r < sc.size:
        raise ValueError(f"received syndrome {r} out of range")
    return _normalize_rows(sc.Wr[:, r], f"received syndrome r={r}")


def syndrome_messages(sc: SyndromeChannel, r) -> np.ndarray:
    r = np.asarray(r, dtype=np.int64)
    if r.size and (r.min() < 0 or r.max() >= sc.size):
        raise ValueError("received syndrome out of range")
    return _normalize_rows(sc.Wr[:, r].T, "received syndrome")
