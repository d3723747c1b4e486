"""Reading and writing code-description files.

Grammar (one ``key = value`` per line, ``#`` starts a comment, values are
whitespace-separated integers)::

    q = 2                 # field size, prime; first
    k = 1                 # input width, default 1

    # polynomial form (k = 1), one ``taps`` line per parity output,
    # coefficients in ascending powers of D
    taps = 1 1 0 1
    taps = 1 0 1 1
    feedback = 1 0 0 1 1  # optional denominator, nonzero constant term

    # table form (any k): explicit state machine, row-major over
    # (state, packed input tuple)
    n_minus_k = 1
    states = 4
    next = 0 1 2 3 ...
    output = 0 1 1 0 ...

A turbo code has two ``[constituent]`` blocks, each holding one realization
(polynomial or table form), plus ``N`` and ``permutation`` (a permutation of
``0..N-1``) at top level::

    q = 2
    N = 4
    permutation = 2 0 3 1
    [constituent]
    taps = 1 1
    [constituent]
    taps = 1
    feedback = 1 1
"""

from __future__ import annotations

import numpy as np

from .code import ParityRealization, TurboCode
from .errors import ConfigError
from .fields import Field

__all__ = ["parse_code", "load_code", "format_code", "describe"]

_SCALAR = {"q", "k", "N", "n_minus_k", "states"}
_REPEATABLE = {"taps"}
_TOP = {"q", "k", "N", "permutation"}
_REALIZATION = {"taps", "feedback", "n_minus_k", "states", "next", "output"}


def _ints(text, key, line):
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise ConfigError(f"expected integers, got {text!r}", field=key, line=line) from None


def _realization(block, field, k, where):
    lines = block.get("_lines", {})
    if "taps" in block:
        if k != 1:
            raise ConfigError("polynomial form requires k = 1; use the table form", field="taps",
                              line=lines.get("taps"))
        if any(key in block for key in ("next", "output", "states", "n_minus_k")):
            raise ConfigError(f"{where} mixes polynomial and table forms", line=lines.get("taps"))
        try:
            return ParityRealization.from_polynomials(field, block["taps"], block.get("feedback"))
        except ValueError as exc:
            raise ConfigError(str(exc), field="taps", line=lines.get("taps")) from None
    missing = [key for key in ("n_minus_k", "states", "next", "output") if key not in block]
    if missing:
        raise ConfigError(f"{where} needs either taps or {', '.join(missing)}", field=missing[0])
    S = block["states"]
    shape = (S, field.q**k)
    try:
        nxt = np.array(block["next"]).reshape(shape)
        out = np.array(block["output"]).reshape(shape)
        return ParityRealization(field, k, block["n_minus_k"], nxt, out)
    except ValueError as exc:
        raise ConfigError(str(exc), field="next", line=lines.get("next")) from None


def parse_code(text: str, source: str = "<string>"):
    """Parse a code description into a :class:`ParityRealization` or :class:`TurboCode`."""
    top: dict = {"_lines": {}}
    blocks: list[dict] = []
    current = top
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[constituent]":
            current = {"_lines": {}}
            blocks.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"{source}: expected 'key = values', got {raw.strip()!r}", line=lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        allowed = _REALIZATION | (_TOP if current is top else set())
        if key not in allowed:
            raise ConfigError(f"{source}: unknown or misplaced key", field=key, line=lineno)
        vals = _ints(value, key, lineno)
        if key in _SCALAR:
            if len(vals) != 1:
                raise ConfigError(f"{source}: expects a single integer", field=key, line=lineno)
            vals = vals[0]
        if key in _REPEATABLE:
            current.setdefault(key, []).append(vals)
        elif key in current:
            raise ConfigError(f"{source}: duplicate key", field=key, line=lineno)
        else:
            current[key] = vals
        current["_lines"].setdefault(key, lineno)

    if "q" not in top:
        raise ConfigError(f"{source}: missing field size", field="q")
    try:
        field = Field(top["q"])
    except ValueError as exc:
        raise ConfigError(str(exc), field="q", line=top["_lines"]["q"]) from None
    k = top.get("k", 1)
    if not blocks:
        if "N" in top or "permutation" in top:
            raise ConfigError(f"{source}: N/permutation only apply to turbo codes", field="N")
        return _realization(top, field, k, source)
    if len(blocks) != 2:
        raise ConfigError(f"{source}: a turbo code needs exactly two [constituent] blocks")
    if any(key in top for key in _REALIZATION):
        raise ConfigError(f"{source}: realization keys must sit inside [constituent] blocks")
    for key in ("N", "permutation"):
        if key not in top:
            raise ConfigError(f"{source}: turbo code is missing {key}", field=key)
    perm = top["permutation"]
    if len(perm) != top["N"]:
        raise ConfigError(f"{source}: permutation length differs from N", field="permutation",
                          line=top["_lines"]["permutation"])
    c0 = _realization(blocks[0], field, k, f"{source} constituent 0")
    c1 = _realization(blocks[1], field, k, f"{source} constituent 1")
    try:
        return TurboCode(c0, c1, perm)
    except ValueError as exc:
        raise ConfigError(str(exc), field="permutation", line=top["_lines"]["permutation"]) from None


def load_code(path):
    with open(path) as fh:
        return parse_code(fh.read(), source=str(path))


def _table_lines(r: ParityRealization):
    return [
        f"n_minus_k = {r.n_minus_k}",
        f"states = {r.num_states}",
        "next = " + " ".join(map(str, r.next_state.ravel().tolist())),
        "output = " + " ".join(map(str, r.output.ravel().tolist())),
    ]


def format_code(code) -> str:
    """Serialize in table form; ``parse_code(format_code(c))`` rebuilds the same machine."""
    if isinstance(code, TurboCode):
        c0, c1 = code.constituents
        lines = [f"q = {code.q}", f"k = {code.k}", f"N = {code.N}",
                 "permutation = " + " ".join(map(str, code.perm.tolist()))]
        for c in (c0, c1):
            lines.append("[constituent]")
            lines.extend(_table_lines(c))
        return "\n".join(lines) + "\n"
    return "\n".join([f"q = {code.q}", f"k = {code.k}"] + _table_lines(code)) + "\n"


def describe(code) -> str:
    """One-line human summary used in reports."""
    if isinstance(code, TurboCode):
        c0, c1 = code.constituents
        return f"turbo GF({code.q}) k={code.k} N={code.N} states=({c0.num_states},{c1.num_states})"
    return f"convolutional GF({code.q}) ({code.n},{code.k}) states={code.num_states}"
