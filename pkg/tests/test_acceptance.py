"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line; the lines are printed at the end of the
pytest run (see ``conftest.py``) and by ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import filecmp
import json
import os
import sys
from pathlib import Path

import numpy as np

from swsyndrome.channels import SourcePrior, SyndromeChannel, qsc
from swsyndrome.cli import main as cli_main
from swsyndrome.code import ParityRealization, syndrome_form
from swsyndrome.decoders import STRATEGIES, decode, decode_isf
from swsyndrome.instances import random_instance
from swsyndrome.oracle import exact_marginals
from swsyndrome.rng import trial_stream
from swsyndrome.sim import (
    equivalence_audit,
    max_relative_discrepancy,
    parse_config,
    run_trials,
)

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"
RESULTS: dict[int, str] = {}


def record(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})"
    RESULTS[number] = line
    print(line)
    return passed


def discrepancy(a, b):
    return max(max_relative_discrepancy(a.post_s, b.post_s),
               max_relative_discrepancy(a.post_p, b.post_p))


# 1 ---------------------------------------------------------------------------


def test_criterion_1_decoder_equivalence():
    cfg = parse_config(CONFIGS / "audit_conv.json")
    spec = cfg.audit
    assert spec["instances"] == 500 and spec["q"] == [2, 3] and spec["max_memory"] == 3
    assert spec["N"] == [8, 128] and not spec["noisy_syndrome"]
    assert set(cfg.strategies) == set(STRATEGIES) and cfg.parity_mode == "map"
    report = equivalence_audit(cfg)
    ok = report.passed and report.instances == 500 and report.max_discrepancy <= 1e-8
    assert record(1, "five-strategy equivalence on 500 convolutional instances", ok,
                  f"max rel. discrepancy {report.max_discrepancy:.2e} <= 1e-8, "
                  f"{len(report.violations)} violations")


# 2 ---------------------------------------------------------------------------


def small_instances(count, base_seed, **kw):
    """Random instances with q**(n N) <= 2**16, skipping oversize draws."""
    out, idx = [], 0
    while len(out) < count:
        seed = trial_stream(base_seed, idx).seed
        idx += 1
        inst = random_instance(seed, N_range=(2, 8), **kw)
        if inst.code.q ** (inst.code.n * len(inst.y)) <= 2**16:
            out.append(inst)
    return out


def worked_example_ok():
    code = ParityRealization.from_polynomials(2, [[1, 1]])
    prior, ch = SourcePrior.uniform(2), qsc(2, 0.1)
    y, s = np.zeros((2, 2), dtype=int), np.array([[1], [0]])
    ref = exact_marginals(code, y, prior, ch, s=s)
    expected = {((0, 1), (0, 0)): 0.0729, ((0, 1), (1, 1)): 0.0009,
                ((1, 0), (0, 1)): 0.0081, ((1, 0), (1, 0)): 0.0081}
    total = sum(expected.values())
    weights_ok = all(
        abs(w - expected[tuple(map(tuple, m.tolist()))] / total) <= 1e-12
        for m, w in zip(ref.sequences, ref.weights)
    )
    xhat = np.array([[0, 1], [0, 0]])
    decisions_ok = np.array_equal(ref.hard, xhat) and all(
        np.array_equal(decode(n, code, y, prior, ch, s=s).hard, xhat) for n in STRATEGIES
    )
    return weights_ok and decisions_ok


def test_criterion_2_oracle_agreement():
    worst, bad = 0.0, 0
    insts = small_instances(200, 0x0AC1E)
    for inst in insts:
        ref = exact_marginals(inst.code, inst.y, inst.prior, inst.ch, s=inst.s)
        for name in STRATEGIES:
            res = decode(name, inst.code, inst.y, inst.prior, inst.ch, s=inst.s)
            d = discrepancy(res, ref)
            worst = max(worst, d)
            bad += d > 1e-10 or not np.array_equal(res.hard, ref.hard)
    worked = worked_example_ok()
    ok = bad == 0 and worked and len(insts) == 200
    assert record(2, "oracle agreement on 200 instances with q^(nN) <= 2^16", ok,
                  f"max rel. discrepancy {worst:.2e} <= 1e-10, {bad} mismatches, "
                  f"worked example {'reproduced' if worked else 'WRONG'}")


# 3 ---------------------------------------------------------------------------


def test_criterion_3_noisy_syndrome_equivalence():
    worst_noisy, worst_ident, bad = 0.0, 0.0, 0
    for i in range(100):
        inst = random_instance(trial_stream(0x5C, i).seed, noisy_syndrome=True)
        assert not inst.sc.is_error_free
        a = decode("map", inst.code, inst.y, inst.prior, inst.ch, r=inst.r, sc=inst.sc)
        b = decode("parity_perspective", inst.code, inst.y, inst.prior, inst.ch, r=inst.r, sc=inst.sc)
        d = discrepancy(a, b)
        worst_noisy = max(worst_noisy, d)
        bad += d > 1e-8 or not np.array_equal(a.hard, b.hard)
        # identity syndrome channel on the exact syndrome: same as the error-free decoders
        ident = SyndromeChannel.error_free(inst.code.num_parities)
        ref = decode("complementary", inst.code, inst.y, inst.prior, inst.ch, s=inst.s)
        for name in ("map", "parity_perspective"):
            c = decode(name, inst.code, inst.y, inst.prior, inst.ch, r=inst.s, sc=ident)
            d = discrepancy(c, ref)
            worst_ident = max(worst_ident, d)
            bad += d > 1e-8 or not np.array_equal(c.hard, ref.hard)
    ok = bad == 0
    assert record(3, "map == parity_perspective under a noisy syndrome channel (100 instances)", ok,
                  f"noisy max {worst_noisy:.2e}, identity-channel max {worst_ident:.2e} <= 1e-8, "
                  f"{bad} mismatches")


# 4 ---------------------------------------------------------------------------


def test_criterion_4_turbo_equivalence():
    cfg = parse_config(CONFIGS / "audit_turbo.json")
    spec = cfg.audit
    assert spec["instances"] == 50 and spec["memory"] == 2 and spec["iterations"] == 5
    assert spec["N"][1] <= 64 and set(cfg.strategies) == set(STRATEGIES)
    report = equivalence_audit(cfg)
    ok = report.passed and report.max_discrepancy <= 1e-7
    assert record(4, "turbo per-half-iteration equivalence (50 instances, 5 iterations)", ok,
                  f"max rel. discrepancy {report.max_discrepancy:.2e} <= 1e-7, "
                  f"{len(report.violations)} violations")


# 5 ---------------------------------------------------------------------------


def test_criterion_5_coset_soundness_and_zero_noise():
    outside = 0
    for i in range(10_000):
        inst = random_instance(trial_stream(0xC05E7, i).seed, N_range=(8, 64))
        res = decode_isf(inst.code, inst.s, inst.y, inst.prior, inst.ch, parity_mode="reencode")
        outside += not np.array_equal(syndrome_form(inst.code, res.hard), inst.s)
    wrong = 0
    for i in range(100):
        inst = random_instance(trial_stream(0xE0, i).seed, eps=0.0)
        for name in STRATEGIES:
            wrong += not np.array_equal(decode(name, inst.code, inst.y, inst.prior, inst.ch,
                                               s=inst.s).hard, inst.x)
            wrong += not np.array_equal(decode("isf", inst.code, inst.y, inst.prior, inst.ch,
                                               s=inst.s, parity_mode="reencode").hard, inst.x)
    ok = outside == 0 and wrong == 0
    assert record(5, "ISF re-encode stays in the coset; exact recovery at eps = 0", ok,
                  f"{outside}/10000 outside the coset, {wrong} failed recoveries over 100 "
                  "instances x all strategies")


# 6 ---------------------------------------------------------------------------


def monotone_within_ci(points):
    """Each step to a smaller eps must not raise the SER beyond CI overlap."""
    for hi_eps, lo_eps in zip(points, points[1:]):
        if lo_eps["sys_ser"] > hi_eps["sys_ser"] and lo_eps["sys_ci95"][0] > hi_eps["sys_ci95"][1]:
            return False
    return True


def test_criterion_6_monte_carlo(tmp_path):
    cfg = parse_config(CONFIGS / "mc_rsc_m4.json")
    assert cfg.code.q == 2 and cfg.code.num_states == 16 and cfg.N == 4096
    assert list(cfg.eps_sweep) == [0.11, 0.08, 0.05, 0.02, 0.01]
    _, summary = run_trials(cfg)
    pts = sorted(summary["points"], key=lambda p: -p["eps"])
    last = pts[-1]
    monotone = monotone_within_ci(pts)
    ok = (monotone and last["sys_ser"] < 1e-3 and last["sys_symbols"] >= 100_000
          and summary["rate_fraction"] == "1/2")
    sers = ", ".join(f"{p['eps']:g}:{p['sys_ser']:.2e}" for p in pts)
    assert record(6, "Monte Carlo SER sanity, memory-4 rate-1/2, N = 4096", ok,
                  f"SER by eps [{sers}], {last['sys_symbols']} symbols at eps=0.01, "
                  f"rate {summary['rate_fraction']}, monotone={monotone}")


# 7 ---------------------------------------------------------------------------


def test_criterion_7_determinism(tmp_path):
    cfg = str(CONFIGS / "quick.json")
    runs = [("a", "1"), ("b", "1"), ("c", "4")]
    for name, threads in runs:
        assert cli_main(["simulate", "--config", cfg, "--threads", threads,
                         "--out", str(tmp_path / name)]) == 0
    same = all(
        filecmp.cmp(tmp_path / f"a{ext}", tmp_path / f"{name}{ext}", shallow=False)
        for name, _ in runs[1:] for ext in (".csv", ".json")
    )
    rows = (tmp_path / "a.csv").read_text().count("\n") - 1
    assert record(7, "simulate output byte-identical across runs and thread counts", same,
                  f"3 runs (threads 1, 1, 4), {rows} CSV rows each")


if __name__ == "__main__":
    import tempfile

    os.chdir(ROOT)
    failures = 0
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for fn in tests:
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as tmp:
                    fn(Path(tmp))
            else:
                fn()
        except AssertionError:
            failures += 1
    print(json.dumps(RESULTS, indent=2))
    sys.exit(1 if failures else 0)
