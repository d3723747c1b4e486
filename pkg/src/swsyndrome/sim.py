"""Experiment configuration, Monte Carlo trials, equivalence audits and result files.

Configuration is JSON::

    {
      "code": "codes/rsc_m4.txt",        # code-description file, relative to the config
      "N": 4096,                         # block length (turbo: taken from the code file)
      "prior": "uniform",                # or a pmf over GF(q)
      "correlation": {"kind": "qsc", "eps": 0.05},   # or {"kind": "matrix", "W": [[...]]}
      "syndrome_channel": "error_free",  # or {"kind": "qsc", "eps": ...} / {"kind": "matrix", ...}
      "strategies": ["map", "complementary"],
      "parity_mode": "map",              # ISF parity estimate: "map" or "reencode"
      "iterations": 5,                   # turbo only
      "eps_sweep": [0.11, 0.05, 0.01],   # optional, qsc correlation only
      "trials": 25,
      "seed": 1,
      "out": "results/run",              # writes results/run.csv and results/run.json
      "audit": {...}                     # optional, see :func:`equivalence_audit`
    }

Per-trial records go to CSV with the columns of :data:`CSV_FIELDS`; the
summary goes to a JSON sidecar.  Trial ``t`` draws all of its randomness
from ``trial_stream(seed, t)``; the same stream is reused at every sweep
point, so sweep points see common source and noise draws.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import binomtest

from .channels import (
    SourcePrior,
    SymbolChannel,
    SyndromeChannel,
    qsc,
    sample_pairs,
    sample_syndrome,
)
from .code import TurboCode, syndrome_form, turbo_syndrome_form
from .codefile import describe, load_code
from .decoders import STRATEGIES, decode, turbo_syndrome_decode
from .errors import ConfigError, DecodingInconsistency, UnsupportedConfiguration
from .fields import pack, unpack
from .instances import Instance, TurboInstance, random_instance, random_turbo_instance
from .oracle import exact_marginals
from .rng import trial_stream

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "CSV_FIELDS",
    "parse_config",
    "config_from_dict",
    "run_trials",
    "emit_results",
    "parse_summary",
    "equivalence_audit",
    "audit_instance",
    "audit_turbo_instance",
    "verify_oracle",
    "compression_rate",
    "max_relative_discrepancy",
]

CSV_FIELDS = (
    "trial_id",
    "trial",
    "eps",
    "strategy",
    "sys_errors",
    "par_errors",
    "sys_symbols",
    "par_symbols",
    "erased",
)

EQUIVALENCE_TOL = 1e-8
TURBO_TOL = 1e-7
ORACLE_TOL = 1e-10


# --------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    code: object = None
    code_path: str | None = None
    N: int | None = None
    prior: SourcePrior | None = None
    correlation: dict = field(default_factory=lambda: {"kind": "qsc", "eps": 0.1})
    syndrome_channel: object = "error_free"
    strategies: tuple = ("map",)
    parity_mode: str = "map"
    iterations: int = 5
    eps_sweep: tuple = ()
    trials: int = 1
    seed: int = 0
    out: str | None = None
    audit: dict | None = None

    @property
    def is_turbo(self):
        return isinstance(self.code, TurboCode)

    @property
    def q(self):
        return self.code.q if self.code is not None else None

    def points(self):
        """Sweep points as ``(eps, channel)``; eps is None for matrix channels."""
        if self.correlation["kind"] == "qsc":
            eps_list = self.eps_sweep or (self.correlation["eps"],)
            return [(float(e), qsc(self.q, float(e))) for e in eps_list]
        return [(None, SymbolChannel(self.correlation["W"]))]

    def syndrome_channels(self):
        """One syndrome channel per constituent (a single one for convolutional codes)."""
        codes = self.code.constituents if self.is_turbo else (self.code,)
        return tuple(_syndrome_channel(self.syndrome_channel, c.num_parities) for c in codes)


def _syndrome_channel(spec, size):
    if spec == "error_free":
        return SyndromeChannel.error_free(size)
    if spec["kind"] == "qsc":
        return SyndromeChannel.symmetric(size, spec["eps"])
    return SyndromeChannel(spec["W"])


def _want(cond, message, fld):
    if not cond:
        raise ConfigError(message, field=fld)


def _channel_spec(spec, fld, allow_error_free=False):
    if allow_error_free and spec == "error_free":
        return spec
    _want(isinstance(spec, dict) and "kind" in spec, "expected an object with a 'kind'", fld)
    if spec["kind"] == "qsc":
        _want(isinstance(spec.get("eps"), (int, float)), "qsc needs a numeric 'eps'", f"{fld}.eps")
        return {"kind": "qsc", "eps": float(spec["eps"])}
    if spec["kind"] == "matrix":
        _want(isinstance(spec.get("W"), list), "matrix channel needs 'W'", f"{fld}.W")
        return {"kind": "matrix", "W": spec["W"]}
    raise ConfigError(f"unknown channel kind {spec['kind']!r}", field=f"{fld}.kind")


_KNOWN = {
    "code", "N", "prior", "correlation", "syndrome_channel", "strategies", "parity_mode",
    "iterations", "eps_sweep", "trials", "seed", "out", "audit",
}


def config_from_dict(raw: dict, base_dir: str = ".") -> ExperimentConfig:
    """Validate a decoded JSON object; raises :class:`ConfigError` naming the field."""
    _want(isinstance(raw, dict), "configuration must be a JSON object", "<root>")
    unknown = sorted(set(raw) - _KNOWN)
    if unknown:
        raise ConfigError("unknown configuration key", field=unknown[0])
    cfg = ExperimentConfig()
    if "code" in raw:
        _want(isinstance(raw["code"], str), "expected a path", "code")
        path = raw["code"] if os.path.isabs(raw["code"]) else os.path.join(base_dir, raw["code"])
        try:
            cfg.code = load_code(path)
        except OSError as exc:
            raise ConfigError(f"cannot read code file: {exc}", field="code") from None
        cfg.code_path = raw["code"]
    else:
        _want("audit" in raw, "a code file is required unless an audit block is given", "code")

    if cfg.code is not None:
        if cfg.is_turbo:
            if "N" in raw:
                _want(raw["N"] == cfg.code.N, f"turbo code file fixes N = {cfg.code.N}", "N")
            cfg.N = cfg.code.N
        elif "N" in raw:
            _want(isinstance(raw["N"], int) and raw["N"] >= 1, "N must be a positive integer", "N")
            cfg.N = raw["N"]

    prior = raw.get("prior", "uniform")
    if cfg.code is not None:
        try:
            cfg.prior = SourcePrior.uniform(cfg.q) if prior == "uniform" else SourcePrior(prior)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc), field="prior") from None
        _want(cfg.prior.q == cfg.q, f"prior must have {cfg.q} entries", "prior")

    if "correlation" in raw:
        cfg.correlation = _channel_spec(raw["correlation"], "correlation")
    cfg.syndrome_channel = _channel_spec(raw.get("syndrome_channel", "error_free"),
                                         "syndrome_channel", allow_error_free=True)

    strategies = raw.get("strategies", ["map"])
    _want(isinstance(strategies, list) and strategies, "strategies must be a nonempty list",
          "strategies")
    for name in strategies:
        _want(name in STRATEGIES, f"unknown strategy {name!r}; choose from {STRATEGIES}",
              "strategies")
    cfg.strategies = tuple(strategies)
    cfg.parity_mode = raw.get("parity_mode", "map")
    _want(cfg.parity_mode in ("map", "reencode"), "must be 'map' or 'reencode'", "parity_mode")
    cfg.iterations = raw.get("iterations", 5)
    _want(isinstance(cfg.iterations, int) and cfg.iterations >= 1, "must be >= 1", "iterations")
    sweep = raw.get("eps_sweep", [])
    _want(isinstance(sweep, list) and all(isinstance(e, (int, float)) for e in sweep),
          "must be a list of numbers", "eps_sweep")
    if sweep:
        _want(cfg.correlation["kind"] == "qsc", "a sweep needs a qsc correlation channel",
              "eps_sweep")
    cfg.eps_sweep = tuple(float(e) for e in sweep)
    cfg.trials = raw.get("trials", 1)
    _want(isinstance(cfg.trials, int) and cfg.trials >= 1, "trials must be >= 1", "trials")
    cfg.seed = raw.get("seed", 0)
    _want(isinstance(cfg.seed, int) and 0 <= cfg.seed < 2**64, "seed must be a u64", "seed")
    cfg.out = raw.get("out")
    if cfg.out is not None and not os.path.isabs(cfg.out):
        cfg.out = os.path.join(base_dir, cfg.out)
    if "audit" in raw:
        cfg.audit = _audit_spec(raw["audit"])

    if cfg.code is not None:
        try:
            for _eps, ch in cfg.points():
                _want(ch.q_in == cfg.q, f"channel input alphabet must be GF({cfg.q})",
                      "correlation")
            cfg.syndrome_channels()
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc), field="correlation") from None
    return cfg


_AUDIT_DEFAULTS = {
    "convolutional": {"instances": 500, "q": [2, 3], "max_memory": 3, "N": [8, 128],
                      "n_minus_k": [1, 2], "noisy_syndrome": False, "tolerance": EQUIVALENCE_TOL},
    "turbo": {"instances": 50, "q": [2], "memory": 2, "N": [8, 64], "iterations": 5,
              "tolerance": TURBO_TOL},
}


def _audit_spec(raw):
    _want(isinstance(raw, dict), "audit must be an object", "audit")
    family = raw.get("family", "convolutional")
    _want(family in _AUDIT_DEFAULTS, "family must be 'convolutional' or 'turbo'", "audit.family")
    spec = {"family": family, **_AUDIT_DEFAULTS[family]}
    for key, val in raw.items():
        if key == "family":
            continue
        _want(key in spec, "unknown audit key", f"audit.{key}")
        spec[key] = val
    return spec


def parse_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return config_from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))


# --------------------------------------------------------------------------
# Monte Carlo trials


@dataclass
class TrialRecord:
    trial_id: str
    trial: int
    eps: float | None
    strategy: str
    sys_errors: int
    par_errors: int
    sys_symbols: int
    par_symbols: int
    erased: int
    elapsed_s: float | None = None


def compression_rate(code) -> Fraction:
    """Syndrome symbols per source symbol."""
    if isinstance(code, TurboCode):
        k, a, b = code.widths
        return Fraction(a + b, k + a + b)
    return Fraction(code.n_minus_k, code.n)


def _draw_block(cfg, ch, rng):
    """Source, side information and (possibly corrupted) syndrome for one trial."""
    code = cfg.code
    q = cfg.q
    scs = cfg.syndrome_channels()
    if cfg.is_turbo:
        xf, yf = sample_pairs(cfg.prior, ch, rng, code.length)
        x, y = code.split(xf), code.split(yf)
        s = turbo_syndrome_form(code, x)
        r = []
        for c, sj, sc in zip(code.constituents, s, scs):
            ridx = sample_syndrome(sc, np.atleast_1d(pack(sj, q)), rng)
            r.append(unpack(ridx, q, c.n_minus_k).reshape(code.N, c.n_minus_k))
        return x, y, s, tuple(r), scs
    xf, yf = sample_pairs(cfg.prior, ch, rng, cfg.N * code.n)
    x, y = xf.reshape(cfg.N, code.n), yf.reshape(cfg.N, code.n)
    s = syndrome_form(code, x)
    ridx = sample_syndrome(scs[0], np.atleast_1d(pack(s, q)), rng)
    return x, y, s, unpack(ridx, q, code.n_minus_k).reshape(cfg.N, code.n_minus_k), scs[0]


def _decode_block(cfg, strategy, ch, y, r, sc):
    if cfg.is_turbo:
        return turbo_syndrome_decode(cfg.code, y, cfg.prior, ch, strategy=strategy,
                                     iterations=cfg.iterations, r=r, sc=sc,
                                     parity_mode=cfg.parity_mode)
    return decode(strategy, cfg.code, y, cfg.prior, ch, r=r, sc=sc, parity_mode=cfg.parity_mode)


def _symbol_counts(cfg, x):
    if cfg.is_turbo:
        xs, x0, x1 = x
        return xs.size, x0.size + x1.size
    k = cfg.code.k
    return x[:, :k].size, x[:, k:].size


def _count_errors(cfg, x, res):
    if cfg.is_turbo:
        xs, x0, x1 = x
        return int((res.hard_s != xs).sum()), int((res.hard_p0 != x0).sum() + (res.hard_p1 != x1).sum())
    k = cfg.code.k
    return int((res.hard_s != x[:, :k]).sum()), int((res.hard_p != x[:, k:]).sum())


def _run_one(cfg, eps, ch, trial, timing):
    rng = trial_stream(cfg.seed, trial)
    trial_id = f"{rng.seed:016x}"
    x, y, s, r, sc = _draw_block(cfg, ch, rng)
    ns, np_ = _symbol_counts(cfg, x)
    records = []
    for strategy in cfg.strategies:
        start = time.perf_counter()
        try:
            res = _decode_block(cfg, strategy, ch, y, r, sc)
            se, pe = _count_errors(cfg, x, res)
            erased = 0
        except DecodingInconsistency:
            # whole block counted as wrong
            se, pe, erased = ns, np_, 1
        elapsed = time.perf_counter() - start if timing else None
        records.append(TrialRecord(trial_id, trial, eps, strategy, se, pe, ns, np_, erased, elapsed))
    return records


def run_trials(cfg: ExperimentConfig, threads: int = 1, timing: bool = False):
    """Run every (sweep point, trial, strategy) combination.

    Returns ``(records, summary)``.  Record order is fixed (point, trial,
    strategy) regardless of ``threads``.
    """
    if cfg.code is None:
        raise ConfigError("simulation needs a code file", field="code")
    if cfg.N is None:
        raise ConfigError("simulation needs a block length", field="N")
    if "isf" in cfg.strategies:
        for _eps, ch in cfg.points():
            if not ch.additive:
                raise ConfigError("strategy 'isf' needs an additive correlation channel",
                                  field="strategies")
    jobs = [(eps, ch, t) for eps, ch in cfg.points() for t in range(cfg.trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda j: _run_one(cfg, *j, timing), jobs))
    else:
        chunks = [_run_one(cfg, *j, timing) for j in jobs]
    records = [rec for chunk in chunks for rec in chunk]
    return records, summarize(cfg, records)


def _ci(errors, total):
    if total == 0:
        return [0.0, 1.0]
    ci = binomtest(errors, total).proportion_ci(confidence_level=0.95, method="exact")
    return [float(ci.low), float(ci.high)]


def summarize(cfg, records):
    groups = {}
    for rec in records:
        g = groups.setdefault((rec.eps, rec.strategy), {
            "eps": rec.eps, "strategy": rec.strategy, "trials": 0, "sys_errors": 0,
            "sys_symbols": 0, "par_errors": 0, "par_symbols": 0, "erasures": 0,
        })
        g["trials"] += 1
        g["sys_errors"] += rec.sys_errors
        g["sys_symbols"] += rec.sys_symbols
        g["par_errors"] += rec.par_errors
        g["par_symbols"] += rec.par_symbols
        g["erasures"] += rec.erased
    points = []
    for g in groups.values():
        g["sys_ser"] = g["sys_errors"] / g["sys_symbols"] if g["sys_symbols"] else 0.0
        g["par_ser"] = g["par_errors"] / g["par_symbols"] if g["par_symbols"] else 0.0
        g["sys_ci95"] = _ci(g["sys_errors"], g["sys_symbols"])
        g["par_ci95"] = _ci(g["par_errors"], g["par_symbols"])
        points.append(g)
    rate = compression_rate(cfg.code)
    return {
        "code": describe(cfg.code),
        "rate": float(rate),
        "rate_fraction": f"{rate.numerator}/{rate.denominator}",
        "seed": cfg.seed,
        "trials": cfg.trials,
        "N": cfg.N,
        "strategies": list(cfg.strategies),
        "points": points,
    }


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_csv(records, timing=False) -> str:
    fields = CSV_FIELDS + (("elapsed_s",) if timing else ())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for rec in records:
        row = asdict(rec)
        writer.writerow([_fmt(row[f]) for f in fields])
    return buf.getvalue()


def emit_results(records, summary, out_prefix, timing=False):
    """Write ``<out>.csv`` (one row per trial and strategy) and ``<out>.json``."""
    folder = os.path.dirname(out_prefix)
    if folder:
        os.makedirs(folder, exist_ok=True)
    csv_path, json_path = out_prefix + ".csv", out_prefix + ".json"
    with open(csv_path, "w", newline="") as fh:
        fh.write(format_csv(records, timing))
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def parse_summary(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def read_records(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# --------------------------------------------------------------------------
# equivalence audit


def max_relative_discrepancy(a, b) -> float:
    """Largest ``|a - b| / max(|a|, |b|)`` over all entries (0 where both vanish)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(a), np.abs(b))
    diff = np.abs(a - b)
    rel = np.divide(diff, scale, out=np.zeros_like(diff), where=scale > 0)
    return float(rel.max()) if rel.size else 0.0


def _compare(results, tol, fields):
    names = list(results)
    ref = results[names[0]]
    worst = 0.0
    problems = []
    for name in names[1:]:
        res = results[name]
        if not np.array_equal(res.hard, ref.hard):
            problems.append({"strategies": [names[0], name], "reason": "hard decisions differ"})
        for f in fields:
            a, b = getattr(ref, f), getattr(res, f)
            if isinstance(a, list):
                d = max((max_relative_discrepancy(u, v) for u, v in zip(a, b)), default=0.0)
            else:
                d = max_relative_discrepancy(a, b)
            worst = max(worst, d)
            if d > tol:
                problems.append({"strategies": [names[0], name], "reason": f"{f} differs",
                                 "discrepancy": d})
    return worst, problems


def audit_instance(inst, strategies=STRATEGIES, tol=EQUIVALENCE_TOL, noisy=False, hook=None):
    """Decode one instance with every strategy and compare.

    Error-free syndromes: all listed strategies are compared (ISF only for an
    additive channel).  Noisy syndromes: ``map`` against
    ``parity_perspective``.  ``hook(name, result)`` may rewrite a result
    before comparison (used by harness self-checks).
    """
    if noisy:
        chosen = [s for s in ("map", "parity_perspective") if s in strategies]
    else:
        chosen = [s for s in strategies if s != "isf" or inst.ch.additive]
    results = {}
    for name in chosen:
        if noisy:
            res = decode(name, inst.code, inst.y, inst.prior, inst.ch, r=inst.r, sc=inst.sc)
        else:
            res = decode(name, inst.code, inst.y, inst.prior, inst.ch, s=inst.s)
        results[name] = hook(name, res) if hook else res
    if len(results) < 2:
        return 0.0, [], results
    worst, problems = _compare(results, tol, ("post_s", "post_p"))
    return worst, problems, results


def audit_turbo_instance(inst, strategies=STRATEGIES, iterations=5, tol=TURBO_TOL, hook=None):
    chosen = [s for s in strategies if s != "isf" or inst.ch.additive]
    results = {}
    for name in chosen:
        res = turbo_syndrome_decode(inst.tc, inst.y, inst.prior, inst.ch, strategy=name,
                                    iterations=iterations, s=inst.s)
        results[name] = hook(name, res) if hook else res
    if len(results) < 2:
        return 0.0, [], results
    worst, problems = _compare(results, tol, ("history", "post_s"))
    return worst, problems, results


@dataclass
class AuditReport:
    family: str
    instances: int
    tolerance: float
    max_discrepancy: float = 0.0
    violations: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations and not self.errors

    def to_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _audit_random(cfg, spec, index=None, replay=None, hook=None):
    seed = replay if replay is not None else trial_stream(cfg.seed, index).seed
    strategies = cfg.strategies
    if spec["family"] == "turbo":
        inst = random_turbo_instance(seed, q_choices=tuple(spec["q"]), memory=spec["memory"],
                                     N_range=tuple(spec["N"]))
        worst, problems, _ = audit_turbo_instance(inst, strategies, spec["iterations"],
                                                  spec["tolerance"], hook)
    else:
        inst = random_instance(seed, q_choices=tuple(spec["q"]), max_memory=spec["max_memory"],
                               N_range=tuple(spec["N"]), n_minus_k_choices=tuple(spec["n_minus_k"]),
                               noisy_syndrome=spec["noisy_syndrome"])
        worst, problems, _ = audit_instance(inst, strategies, spec["tolerance"],
                                            spec["noisy_syndrome"], hook)
    return seed, worst, problems


def _audit_config_trial(cfg, eps, ch, trial, hook=None):
    """Audit on the configured code: one random block per (point, trial)."""
    rng = trial_stream(cfg.seed, trial)
    x, y, s, r, sc = _draw_block(cfg, ch, rng)
    noisy = not cfg.is_turbo and not sc.is_error_free
    if cfg.is_turbo:
        inst = TurboInstance(cfg.code, cfg.prior, ch, x, y, s, rng.seed)
        worst, problems, _ = audit_turbo_instance(inst, cfg.strategies, cfg.iterations,
                                                  TURBO_TOL, hook)
    else:
        inst = Instance(cfg.code, cfg.prior, ch, x, y, s, sc, r, rng.seed)
        worst, problems, _ = audit_instance(inst, cfg.strategies, EQUIVALENCE_TOL, noisy, hook)
    return rng.seed, worst, problems


def equivalence_audit(cfg: ExperimentConfig, threads: int = 1, replay: int | None = None,
                      hook=None) -> AuditReport:
    """Check that the configured strategies agree on every audited instance.

    With an ``audit`` block, instances are drawn at random (codes, priors and
    channels included) from ``trial_stream(seed, i)``; otherwise the
    configured code is audited on ``trials`` blocks per sweep point.  Each
    violation records the instance's replay seed.
    """
    spec = cfg.audit
    if spec is not None:
        jobs = [None] if replay is not None else list(range(spec["instances"]))
        work = lambda i: _audit_random(cfg, spec, index=i, replay=replay, hook=hook)  # noqa: E731
        report = AuditReport(spec["family"], len(jobs), spec["tolerance"])
    else:
        if cfg.code is None:
            raise ConfigError("audit needs a code file or an audit block", field="code")
        jobs = [(eps, ch, t) for eps, ch in cfg.points() for t in range(cfg.trials)]
        work = lambda j: _audit_config_trial(cfg, *j, hook=hook)  # noqa: E731
        fam = "turbo" if cfg.is_turbo else "convolutional"
        report = AuditReport(fam, len(jobs), TURBO_TOL if cfg.is_turbo else EQUIVALENCE_TOL)

    def guarded(job):
        try:
            return work(job), None
        except (DecodingInconsistency, UnsupportedConfiguration) as exc:
            return None, str(exc)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(guarded, jobs))
    else:
        outcomes = [guarded(j) for j in jobs]
    for idx, (out, err) in enumerate(outcomes):
        if err is not None:
            report.errors.append({"instance": idx, "error": err})
            continue
        seed, worst, problems = out
        report.max_discrepancy = max(report.max_discrepancy, worst)
        for p in problems:
            report.violations.append({"instance": idx, "replay_seed": seed, **p})
    return report


# --------------------------------------------------------------------------
# oracle cross-check


def verify_oracle(cfg: ExperimentConfig, tol=ORACLE_TOL) -> dict:
    """Compare every configured strategy with exhaustive marginals on ``trials`` blocks."""
    if cfg.code is None or cfg.is_turbo:
        raise ConfigError("verify supports convolutional codes only", field="code")
    if cfg.N is None:
        raise ConfigError("verify needs a block length", field="N")
    worst = 0.0
    mismatches = []
    for eps, ch in cfg.points():
        for t in range(cfg.trials):
            rng = trial_stream(cfg.seed, t)
            x, y, s, r, sc = _draw_block(cfg, ch, rng)
            noisy = not sc.is_error_free
            if noisy:
                oracle = exact_marginals(cfg.code, y, cfg.prior, ch, r=r, sc=sc)
                names = [n for n in cfg.strategies if n in ("map", "parity_perspective")]
            else:
                oracle = exact_marginals(cfg.code, y, cfg.prior, ch, s=s)
                names = [n for n in cfg.strategies if n != "isf" or ch.additive]
            for name in names:
                res = decode(name, cfg.code, y, cfg.prior, ch, r=r, sc=sc,
                             parity_mode="map")
                d = max(max_relative_discrepancy(res.post_s, oracle.post_s),
                        max_relative_discrepancy(res.post_p, oracle.post_p))
                worst = max(worst, d)
                if d > tol or not np.array_equal(res.hard, oracle.hard):
                    mismatches.append({"eps": eps, "trial": t, "strategy": name,
                                       "discrepancy": d, "replay_seed": rng.seed})
    return {"max_discrepancy": worst, "tolerance": tol, "mismatches": mismatches,
            "passed": not mismatches}
