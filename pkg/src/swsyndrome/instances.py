"""Random problem instances for audits and tests.

Everything is drawn from a :class:`~swsyndrome.rng.Stream`, so an instance is
fully determined by the stream seed (its replay seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    SourcePrior,
    SymbolChannel,
    SyndromeChannel,
    qsc,
    sample_pairs,
    sample_syndrome,
)
from .code import ParityRealization, TurboCode, syndrome_form, turbo_syndrome_form
from .fields import pack, unpack
from .rng import Stream

__all__ = [
    "Instance",
    "TurboInstance",
    "random_polynomial_code",
    "random_prior",
    "random_instance",
    "random_turbo_instance",
]


@dataclass(eq=False)
class Instance:
    code: ParityRealization
    prior: SourcePrior
    ch: SymbolChannel
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    sc: SyndromeChannel
    r: np.ndarray
    seed: int = 0


@dataclass(eq=False)
class TurboInstance:
    tc: TurboCode
    prior: SourcePrior
    ch: SymbolChannel
    x: tuple
    y: tuple
    s: tuple
    seed: int = 0


def _poly(rng, q, degree, monic_top=True):
    c = [rng.below(q) for _ in range(degree + 1)]
    if monic_top and degree > 0:
        c[degree] = 1 + rng.below(q - 1)
    return c


def random_polynomial_code(rng: Stream, q: int, memory: int, n_minus_k: int = 1,
                           recursive: bool | None = None) -> ParityRealization:
    """A k = 1 realization with ``n_minus_k`` outputs and exactly ``memory`` delays."""
    if recursive is None:
        recursive = rng.below(2) == 1
    taps = [_poly(rng, q, memory, monic_top=False) for _ in range(n_minus_k)]
    feedback = None
    if recursive and memory > 0:
        feedback = _poly(rng, q, memory)
        feedback[0] = 1 + rng.below(q - 1)
    elif memory > 0:
        # force the register length to equal ``memory``
        taps[0][memory] = 1 + rng.below(q - 1)
    return ParityRealization.from_polynomials(q, taps, feedback)


def random_prior(rng: Stream, q: int, uniform: bool = False) -> SourcePrior:
    if uniform:
        return SourcePrior.uniform(q)
    w = np.array([0.05 + rng.random() for _ in range(q)])
    return SourcePrior(w / w.sum())


def random_eps(rng: Stream, q: int) -> float:
    """Crossover drawn from the open interval (0, (q-1)/q)."""
    while True:
        e = rng.random() * (q - 1) / q
        if e > 0:
            return e


def random_instance(seed: int, q_choices=(2, 3), max_memory=3, N_range=(8, 128),
                    n_minus_k_choices=(1, 2), noisy_syndrome=False, eps=None,
                    uniform_prior=False, channel=None) -> Instance:
    """Draw a code, prior, qsc correlation channel and a (x, y, s) realization."""
    rng = Stream(seed)
    q = rng.choice(list(q_choices))
    memory = 1 + rng.below(max_memory) if max_memory > 0 else 0
    nk = rng.choice(list(n_minus_k_choices))
    code = random_polynomial_code(rng, q, memory, nk)
    N = N_range[0] + rng.below(N_range[1] - N_range[0] + 1)
    prior = random_prior(rng, q, uniform_prior)
    if channel is None:
        ch = qsc(q, random_eps(rng, q) if eps is None else eps)
    else:
        ch = channel(rng, q)
    xf, yf = sample_pairs(prior, ch, rng, N * code.n)
    x = xf.reshape(N, code.n)
    y = yf.reshape(N, code.n)
    s = syndrome_form(code, x)
    if noisy_syndrome:
        sc = SyndromeChannel.symmetric(code.num_parities, random_eps(rng, code.num_parities))
    else:
        sc = SyndromeChannel.error_free(code.num_parities)
    r_idx = sample_syndrome(sc, np.atleast_1d(pack(s, q)), rng)
    r = unpack(r_idx, q, nk).reshape(N, nk)
    return Instance(code, prior, ch, x, y, s, sc, r, seed)


def random_turbo_instance(seed: int, q_choices=(2,), memory=2, N_range=(8, 64),
                          eps=None, uniform_prior=False) -> TurboInstance:
    """Two recursive constituents of the given memory and a random interleaver."""
    rng = Stream(seed)
    q = rng.choice(list(q_choices))
    c0 = random_polynomial_code(rng, q, memory, 1, recursive=True)
    c1 = random_polynomial_code(rng, q, memory, 1, recursive=True)
    N = N_range[0] + rng.below(N_range[1] - N_range[0] + 1)
    tc = TurboCode(c0, c1, rng.permutation(N))
    prior = random_prior(rng, q, uniform_prior)
    ch = qsc(q, random_eps(rng, q) if eps is None else eps)
    xf, yf = sample_pairs(prior, ch, rng, tc.length)
    x = tc.split(xf)
    y = tc.split(yf)
    s = turbo_syndrome_form(tc, x)
    return TurboInstance(tc, prior, ch, x, y, s, seed)


def random_channel(rng: Stream, q: int, M: int | None = None) -> SymbolChannel:
    """A generic (non-additive) stochastic matrix with ``M`` outputs."""
    M = q + 1 if M is None else M
    W = np.array([[0.05 + rng.random() for _ in range(M)] for _ in range(q)])
    return SymbolChannel(W / W.sum(axis=1, keepdims=True))
