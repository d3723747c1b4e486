"""Syndrome decoders for convolutional and turbo Slepian-Wolf codes.

Five strategies recover the source ``x`` from side information ``y`` and the
systematic syndrome ``s`` (or a noisy copy ``r`` of it):

``complementary``
    Run BCJR on the code trellis whose parity labels are shifted by ``s_i``
    at every step (principal trellis where ``s_i = 0``, one of the
    complementary trellises otherwise).
``isf``
    Inverse syndrome former: subtract the coset member ``c_i = [0 | s_i]``
    from the side information, decode a codeword on the unmodified trellis
    and add ``c`` back.  Needs an additive correlation channel.
``parity_perspective``
    Treat the syndrome as the parity of the generator ``[I_n | H^T]`` and
    decode on the expanded (source-coding) trellis, with syndrome evidence
    ``p(r_i | s'_i)``.
``syndrome_trellis``
    At each step keep only the expanded-trellis branches whose syndrome label
    equals the received ``s_i``.
``map``
    Marginalize the full posterior on the code trellis: the parity branch
    label ``p_i`` receives ``sum_xp p(xp | y) p(r | xp - p_i)`` and the parity
    posterior is rebuilt from the output message on ``p_i``.

All strategies return a :class:`~swsyndrome.bcjr.DecodeResult`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bcjr import DecodeResult, Section, bcjr_decode, hard_decision, normalize
from .channels import (
    SourcePrior,
    SymbolChannel,
    SyndromeChannel,
    posterior_messages,
    syndrome_messages,
    tuple_messages,
)
from .code import (
    ParityRealization,
    TurboCode,
    deinterleave,
    interleave,
    systematic_encode,
)
from .errors import UnsupportedConfiguration
from .fields import pack, unpack

__all__ = [
    "STRATEGIES",
    "EXACT_SYNDROME_STRATEGIES",
    "decode",
    "decode_complementary",
    "decode_isf",
    "decode_parity_perspective",
    "decode_syndrome_trellis",
    "decode_map",
    "turbo_syndrome_decode",
    "TurboDecodeResult",
]

STRATEGIES = ("complementary", "isf", "parity_perspective", "syndrome_trellis", "map")
# strategies that key their trellis off the syndrome value itself
EXACT_SYNDROME_STRATEGIES = ("complementary", "isf", "syndrome_trellis")
PARITY_MODES = ("map", "reencode")


# --------------------------------------------------------------------------
# section caches


def _cache(r: ParityRealization, key, build):
    store = r.__dict__.setdefault("_section_cache", {})
    if key not in store:
        store[key] = build()
    return store[key]


def _principal(r):
    def build():
        t = r.trellis
        return Section(t.prev, t.next, (t.xs, t.xp), t.num_states)

    return _cache(r, "principal", build)


def _complementary(r):
    """One section per syndrome value; value 0 is the principal trellis."""

    def build():
        t = r.trellis
        add = r.field.tuple_add_table(r.n_minus_k)
        return [
            Section(t.prev, t.next, (t.xs, add[t.xp, v]), t.num_states)
            for v in range(r.num_parities)
        ]

    return _cache(r, "complementary", build)


def _expanded(r):
    def build():
        e = r.expanded
        return Section(e.prev, e.next, (e.x, e.s), e.num_states)

    return _cache(r, "expanded", build)


def _syndrome_sections(r):
    def build():
        e = r.expanded
        out = []
        for v in range(r.num_parities):
            keep = e.s == v
            out.append(Section(e.prev[keep], e.next[keep], (e.x[keep],), e.num_states))
        return out

    return _cache(r, "syndrome", build)


# --------------------------------------------------------------------------
# message plumbing


def _check_channels(r, prior, ch):
    if prior.q != r.q or ch.q_in != r.q:
        raise ValueError(f"prior and channel must be defined over GF({r.q})")


def _symbols(a, width, N=None, what="sequence"):
    a = np.asarray(a, dtype=np.int64)
    if a.ndim == 1 and width == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[1] != width or (N is not None and len(a) != N):
        want = f"({N if N is not None else 'N'}, {width})"
        raise ValueError(f"{what} must have shape {want}, got {a.shape}")
    return a


def _messages(prior, ch, y):
    """Tuple messages ``p(x_i | y_i)`` for observation tuples of shape (N, m)."""
    if y.shape[1] == 0:
        return np.ones((len(y), 1))
    return tuple_messages(posterior_messages(prior, ch, y))


def _isf_parity_messages(r, prior, ch, yp, s):
    """Messages on the parity of ``c0`` given the translated side information ``yp - s``.

    The source prior is re-centred on the coset representative, i.e. the
    prior of ``c0`` is ``p(v + s)``; for an additive channel this makes the
    message equal to ``p(xp = v + s | yp)``.
    """
    if not ch.additive:
        raise UnsupportedConfiguration(
            "inverse syndrome forming needs an additive correlation channel "
            "over the source alphabet"
        )
    q = r.q
    y_shift = (yp - s) % q
    v = np.arange(q)
    pri = prior.pmf[(v[None, None, :] + s[:, :, None]) % q]
    lik = np.moveaxis(ch.W[:, y_shift], 0, -1)
    return tuple_messages(normalize(pri * lik))


def _joint(mu_s, mu_p):
    """Messages on packed n-tuples ``x = xs + q**k * xp``."""
    N = len(mu_s)
    return (mu_p[:, :, None] * mu_s[:, None, :]).reshape(N, -1)


def _split_joint(post_x, Qk, Qp):
    cube = post_x.reshape(len(post_x), Qp, Qk)
    return normalize(cube.sum(axis=1)), normalize(cube.sum(axis=2))


def _result(r, post_s, post_p, ext_s, hard_s=None, hard_p=None):
    hs = hard_decision(post_s) if hard_s is None else hard_s
    hp = hard_decision(post_p) if hard_p is None else hard_p
    return DecodeResult(
        hard_s=unpack(hs, r.q, r.k).reshape(-1, r.k),
        hard_p=unpack(hp, r.q, r.n_minus_k).reshape(-1, r.n_minus_k),
        post_s=post_s,
        post_p=post_p,
        ext_s=ext_s,
    )


# --------------------------------------------------------------------------
# strategy cores: work on prepared messages, shared by single-code and turbo


def _core_complementary(r, mu_s, mu_p, s_idx):
    comp = _complementary(r)
    out = bcjr_decode([comp[v] for v in s_idx.tolist()], (mu_s, mu_p))
    return _result(r, out.posterior[0], out.posterior[1], out.extrinsic[0])


def _core_isf(r, mu_s, mu_c0p, s_idx, parity_mode):
    sec = _principal(r)
    out = bcjr_decode([sec] * len(s_idx), (mu_s, mu_c0p))
    post_s, post_c0p = out.posterior
    # translate back: x_p = c0_p + s
    sub = r.field.tuple_sub_table(r.n_minus_k)
    post_p = np.take_along_axis(post_c0p, sub[np.arange(r.num_parities)[None, :], s_idx[:, None]], axis=1)
    hard_p = None
    if parity_mode == "reencode":
        hs = unpack(hard_decision(post_s), r.q, r.k).reshape(-1, r.k)
        s = unpack(s_idx, r.q, r.n_minus_k).reshape(-1, r.n_minus_k)
        hard_p = pack((systematic_encode(r, hs) + s) % r.q, r.q)
    return _result(r, post_s, post_p, out.extrinsic[0], hard_p=hard_p)


def _core_parity_perspective(r, mu_s, mu_p, mu_r):
    sec = _expanded(r)
    out = bcjr_decode([sec] * len(mu_s), (_joint(mu_s, mu_p), mu_r))
    post_s, post_p = _split_joint(out.posterior[0], r.num_inputs, r.num_parities)
    ext_x = out.extrinsic[0].reshape(len(mu_s), r.num_parities, r.num_inputs)
    ext_s = normalize((ext_x * mu_p[:, :, None]).sum(axis=1))
    return _result(r, post_s, post_p, ext_s)


def _core_syndrome_trellis(r, mu_s, mu_p, s_idx):
    secs = _syndrome_sections(r)
    out = bcjr_decode([secs[v] for v in s_idx.tolist()], (_joint(mu_s, mu_p),))
    post_s, post_p = _split_joint(out.posterior[0], r.num_inputs, r.num_parities)
    ext_x = out.extrinsic[0].reshape(len(mu_s), r.num_parities, r.num_inputs)
    ext_s = normalize((ext_x * mu_p[:, :, None]).sum(axis=1))
    return _result(r, post_s, post_p, ext_s)


def _core_map(r, mu_s, mu_p, mu_r):
    sub = r.field.tuple_sub_table(r.n_minus_k)
    # A[t, p, xp] = p(r_t | s' = xp - p)
    A = mu_r[:, sub.T]
    mu_hat = np.einsum("tpx,tx->tp", A, mu_p)
    out = bcjr_decode([_principal(r)] * len(mu_s), (mu_s, mu_hat))
    lam_s, lam_hat = out.extrinsic
    post_p = normalize(mu_p * np.einsum("tp,tpx->tx", lam_hat, A))
    return _result(r, out.posterior[0], post_p, lam_s)


def _run(strategy, r, mu_s, yp, prior, ch, s_idx=None, mu_r=None, parity_mode="map"):
    """Dispatch one strategy on prepared systematic messages and raw parity side information."""
    if strategy == "isf":
        if parity_mode not in PARITY_MODES:
            raise ValueError(f"parity_mode must be one of {PARITY_MODES}")
        s = unpack(s_idx, r.q, r.n_minus_k).reshape(-1, r.n_minus_k)
        return _core_isf(r, mu_s, _isf_parity_messages(r, prior, ch, yp, s), s_idx, parity_mode)
    mu_p = _messages(prior, ch, yp)
    if strategy == "complementary":
        return _core_complementary(r, mu_s, mu_p, s_idx)
    if strategy == "syndrome_trellis":
        return _core_syndrome_trellis(r, mu_s, mu_p, s_idx)
    if strategy == "parity_perspective":
        return _core_parity_perspective(r, mu_s, mu_p, mu_r)
    if strategy == "map":
        return _core_map(r, mu_s, mu_p, mu_r)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def _syndrome_evidence(r, N, s, rcv, sc):
    """Resolve (s | r, sc) into packed exact syndromes and syndrome-evidence messages."""
    if s is None and rcv is None:
        raise ValueError("either the syndrome s or the received syndrome r is required")
    if sc is None:
        sc = SyndromeChannel.error_free(r.num_parities)
    if sc.size != r.num_parities:
        raise ValueError(f"syndrome channel must act on {r.num_parities} tuple values")
    src = s if s is not None else rcv
    idx = pack(_symbols(src, r.n_minus_k, N, "syndrome"), r.q)
    idx = np.atleast_1d(idx)
    return idx, syndrome_messages(sc, idx)


def decode(strategy, code: ParityRealization, y, prior: SourcePrior, ch: SymbolChannel,
           s=None, r=None, sc: SyndromeChannel | None = None, parity_mode="map") -> DecodeResult:
    """Decode one convolutional block with the named strategy.

    ``y`` has shape (N, n).  Give either the exact syndrome ``s`` or the
    received ``r`` together with its channel ``sc``.  Strategies that index
    trellises by the syndrome value use ``r`` as if it were exact.
    """
    _check_channels(code, prior, ch)
    y = _symbols(y, code.n, what="side information")
    N = len(y)
    s_idx, mu_r = _syndrome_evidence(code, N, s, r, sc)
    mu_s = _messages(prior, ch, y[:, : code.k])
    return _run(strategy, code, mu_s, y[:, code.k :], prior, ch, s_idx, mu_r, parity_mode)


def decode_complementary(code, s, y, prior, ch):
    return decode("complementary", code, y, prior, ch, s=s)


def decode_isf(code, s, y, prior, ch, parity_mode="map"):
    """Inverse-syndrome-former decoding.

    ``parity_mode="map"`` maximizes the translated parity posterior;
    ``"reencode"`` re-encodes the systematic decision and adds ``s``, so the
    output always lies in the signalled coset (the parity posterior is still
    the MAP one and need not agree with the re-encoded hard decision).
    """
    if ch.M != code.q:
        raise UnsupportedConfiguration("inverse syndrome forming needs side information over GF(q)")
    return decode("isf", code, y, prior, ch, s=s, parity_mode=parity_mode)


def decode_parity_perspective(code, r, y, prior, ch, sc=None):
    return decode("parity_perspective", code, y, prior, ch, r=r, sc=sc)


def decode_syndrome_trellis(code, s, y, prior, ch):
    return decode("syndrome_trellis", code, y, prior, ch, s=s)


def decode_map(code, r, y, prior, ch, sc=None):
    return decode("map", code, y, prior, ch, r=r, sc=sc)


# --------------------------------------------------------------------------
# turbo


@dataclass(eq=False)
class TurboDecodeResult:
    """Decisions for the layout ``[xs | x0 | x1]`` plus the exchanged messages.

    ``history`` holds, for every half-iteration in order, the output message
    on the systematic tuples produced by the constituent just decoded, in
    natural (deinterleaved) order.
    """

    hard_s: np.ndarray
    hard_p0: np.ndarray
    hard_p1: np.ndarray
    post_s: np.ndarray
    post_p0: np.ndarray
    post_p1: np.ndarray
    history: list = field(default_factory=list)

    @property
    def hard(self):
        return np.concatenate([self.hard_s.ravel(), self.hard_p0.ravel(), self.hard_p1.ravel()])


def turbo_syndrome_decode(tc: TurboCode, y, prior: SourcePrior, ch: SymbolChannel,
                          strategy="map", iterations=5, s=None, r=None, sc=None,
                          parity_mode="map") -> TurboDecodeResult:
    """Iterative decoding of a turbo syndrome ``(s0, s1)`` (or received ``(r0, r1)``).

    Constituents are decoded alternately 0, 1, 0, 1, ...; one iteration is
    two half-iterations.  Constituent ``j`` takes as systematic input
    ``p(xs | ys) * lambda_{1-j}(xs)`` where ``lambda`` is the other
    constituent's latest output message (uniform before its first decode).
    ``sc`` may be a single channel shared by both syndromes or a pair.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    c0, c1 = tc.constituents
    _check_channels(c0, prior, ch)
    ys, y0, y1 = tc.split(y) if not isinstance(y, tuple) else y
    ys = _symbols(ys, tc.k, tc.N, "systematic side information")
    ys_parity = (
        _symbols(y0, c0.n_minus_k, tc.N, "side information y0"),
        _symbols(y1, c1.n_minus_k, tc.N, "side information y1"),
    )
    pair = s if s is not None else r
    if pair is None or len(pair) != 2:
        raise ValueError("turbo decoding needs a syndrome pair (s0, s1) or (r0, r1)")
    scs = sc if isinstance(sc, (tuple, list)) else (sc, sc)
    evidence = []
    for c, part, chan in zip((c0, c1), pair, scs):
        if s is not None:
            evidence.append(_syndrome_evidence(c, tc.N, part, None, chan))
        else:
            evidence.append(_syndrome_evidence(c, tc.N, None, part, chan))

    mu_ch = _messages(prior, ch, ys)
    lam = [np.full_like(mu_ch, 1.0 / mu_ch.shape[1]) for _ in range(2)]
    latest = [None, None]
    history = []
    for _ in range(iterations):
        for j, c in enumerate((c0, c1)):
            mu = normalize(mu_ch * lam[1 - j])
            if j == 1:
                mu = interleave(tc.perm, mu)
            s_idx, mu_r = evidence[j]
            res = _run(strategy, c, mu, ys_parity[j], prior, ch, s_idx, mu_r, parity_mode)
            ext = res.ext_s if j == 0 else deinterleave(tc.perm, res.ext_s)
            lam[j] = ext
            latest[j] = res
            history.append(ext)

    post_s = normalize(mu_ch * lam[0] * lam[1])
    hard_s = unpack(hard_decision(post_s), tc.q, tc.k).reshape(-1, tc.k)
    return TurboDecodeResult(
        hard_s=hard_s,
        hard_p0=latest[0].hard_p,
        hard_p1=latest[1].hard_p,
        post_s=post_s,
        post_p0=latest[0].post_p,
        post_p1=latest[1].post_p,
        history=history,
    )
