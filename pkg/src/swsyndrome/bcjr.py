"""Forward-backward (BCJR) message passing over time-varying trellis sections.

A :class:`Section` lists branches ``prev -> next``; every branch carries one
label per input factor (for instance the systematic tuple and the parity
tuple).  The weight of a branch at time ``t`` is the product of the factor
messages evaluated at its labels.  Arithmetic stays in the probability domain
with every metric renormalized per step.

Metrics are indexed so that ``alpha[t]`` and ``beta[t]`` refer to the state
before symbol ``t``; ``alpha[0]`` is a delta at state 0 and ``beta[N]`` is
uniform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DecodingInconsistency

__all__ = [
    "Section",
    "BcjrOutput",
    "DecodeResult",
    "forward_pass",
    "backward_pass",
    "app_output",
    "bcjr_decode",
    "hard_decision",
    "normalize",
    "TIE_RTOL",
]

# values within this relative distance of the maximum count as tied
TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Section:
    prev: np.ndarray
    next: np.ndarray
    labels: tuple
    num_states: int

    def __len__(self):
        return len(self.prev)


@dataclass(frozen=True, eq=False)
class BcjrOutput:
    alpha: np.ndarray
    beta: np.ndarray
    extrinsic: tuple
    posterior: tuple


@dataclass(eq=False)
class DecodeResult:
    """Hard decisions and per-symbol posteriors produced by a decoder.

    ``hard_s``/``hard_p`` are symbol arrays of shape (N, k) and (N, n-k);
    ``post_s``/``post_p`` are normalized messages over the packed tuples.
    ``ext_s`` is the output message on the systematic tuples excluding their
    own input message (what a turbo constituent hands to the other one).
    """

    hard_s: np.ndarray
    hard_p: np.ndarray
    post_s: np.ndarray
    post_p: np.ndarray
    ext_s: np.ndarray | None = None
    history: list = field(default_factory=list)

    @property
    def hard(self):
        return np.concatenate([self.hard_s, self.hard_p], axis=1)


def normalize(m, axis=-1):
    total = m.sum(axis=axis, keepdims=True)
    if (total <= 0).any() or not np.isfinite(total).all():
        raise DecodingInconsistency("message with no positive mass")
    return m / total


def hard_decision(post: np.ndarray) -> np.ndarray:
    """Argmax along the last axis, ties resolved toward the smallest index."""
    top = post.max(axis=-1, keepdims=True)
    return np.argmax(post >= top * (1.0 - TIE_RTOL), axis=-1)


def _gammas(sections, inputs):
    out = []
    for t, sec in enumerate(sections):
        g = inputs[0][t][sec.labels[0]]
        for msg, lab in zip(inputs[1:], sec.labels[1:]):
            g = g * msg[t][lab]
        out.append(g)
    return out


def _check(sections, inputs):
    if len(inputs) == 0:
        raise ValueError("at least one input factor is required")
    N = len(sections)
    for msg, lab in zip(inputs, sections[0].labels if N else ()):
        if len(msg) != N:
            raise ValueError("every input factor needs one message per section")
    if N and any(len(s.labels) != len(inputs) for s in sections):
        raise ValueError("sections and inputs disagree on the number of factors")
    if N and len({s.num_states for s in sections}) != 1:
        raise ValueError("all sections must share one state space")


def forward_pass(sections, inputs, gammas=None) -> np.ndarray:
    """Normalized forward metrics, shape (N + 1, num_states)."""
    _check(sections, inputs)
    gammas = _gammas(sections, inputs) if gammas is None else gammas
    S = sections[0].num_states if sections else 1
    alpha = np.zeros((len(sections) + 1, S))
    alpha[0, 0] = 1.0
    for t, (sec, g) in enumerate(zip(sections, gammas)):
        a = np.bincount(sec.next, weights=alpha[t][sec.prev] * g, minlength=S)
        total = a.sum()
        if not total > 0:
            raise DecodingInconsistency(f"forward metric vanished at time {t}", time=t)
        alpha[t + 1] = a / total
    return alpha


def backward_pass(sections, inputs, gammas=None) -> np.ndarray:
    """Normalized backward metrics, shape (N + 1, num_states)."""
    _check(sections, inputs)
    gammas = _gammas(sections, inputs) if gammas is None else gammas
    N = len(sections)
    S = sections[0].num_states if sections else 1
    beta = np.zeros((N + 1, S))
    beta[N] = 1.0 / S
    for t in range(N - 1, -1, -1):
        sec = sections[t]
        b = np.bincount(sec.prev, weights=beta[t + 1][sec.next] * gammas[t], minlength=S)
        total = b.sum()
        if not total > 0:
            raise DecodingInconsistency(f"backward metric vanished at time {t}", time=t)
        beta[t] = b / total
    return beta


def app_output(sections, alpha, beta, inputs) -> tuple:
    """Output messages for every factor.

    The message on factor ``j`` at time ``t`` sums, over branches carrying a
    given label, ``alpha[t](prev) * beta[t+1](next)`` times the messages of
    all *other* factors.  Each message is normalized.
    """
    _check(sections, inputs)
    N = len(sections)
    outs = [np.zeros((N, m.shape[1])) for m in inputs]
    for t, sec in enumerate(sections):
        base = alpha[t][sec.prev] * beta[t + 1][sec.next]
        vals = [m[t][lab] for m, lab in zip(inputs, sec.labels)]
        for j, lab in enumerate(sec.labels):
            w = base
            for l, v in enumerate(vals):
                if l != j:
                    w = w * v
            outs[j][t] = np.bincount(lab, weights=w, minlength=outs[j].shape[1])
    try:
        return tuple(normalize(o) for o in outs)
    except DecodingInconsistency:
        raise DecodingInconsistency("output message vanished") from None


def bcjr_decode(sections, inputs) -> BcjrOutput:
    """Run both recursions and return output messages and posteriors ``mu * lambda``."""
    inputs = tuple(np.asarray(m, dtype=np.float64) for m in inputs)
    gammas = _gammas(sections, inputs)
    alpha = forward_pass(sections, inputs, gammas)
    beta = backward_pass(sections, inputs, gammas)
    ext = app_output(sections, alpha, beta, inputs)
    post = tuple(normalize(m * e) for m, e in zip(inputs, ext))
    return BcjrOutput(alpha, beta, ext, post)
