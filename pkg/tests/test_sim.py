import json
from fractions import Fraction

import numpy as np
import pytest

from swsyndrome.bcjr import TIE_RTOL
from swsyndrome.code import ParityRealization, TurboCode
from swsyndrome.errors import ConfigError
from swsyndrome.fields import unpack
from swsyndrome.sim import (
    CSV_FIELDS,
    compression_rate,
    config_from_dict,
    emit_results,
    equivalence_audit,
    parse_config,
    parse_summary,
    read_records,
    run_trials,
    verify_oracle,
)


@pytest.fixture
def codes(tmp_path):
    (tmp_path / "acc.txt").write_text("q = 2\ntaps = 1 1\n")
    (tmp_path / "gf3.txt").write_text("q = 3\ntaps = 1 2 1\nfeedback = 1 0 2\n")
    (tmp_path / "turbo.txt").write_text(
        "q = 2\nN = 8\npermutation = 3 7 1 0 6 2 5 4\n"
        "[constituent]\ntaps = 1 0 1\nfeedback = 1 1 1\n"
        "[constituent]\ntaps = 1 0 1\nfeedback = 1 1 1\n"
    )
    return tmp_path


def cfg_of(codes, **raw):
    return config_from_dict(raw, base_dir=str(codes))


def test_minimal_config(codes):
    path = codes / "min.json"
    path.write_text(json.dumps({"code": "acc.txt", "N": 16, "correlation": {"kind": "qsc", "eps": 0.1},
                                "strategies": ["map"]}))
    cfg = parse_config(path)
    assert cfg.N == 16 and cfg.strategies == ("map",) and cfg.trials == 1
    assert np.allclose(cfg.prior.pmf, 0.5)


@pytest.mark.parametrize(
    "raw,field",
    [
        ({"code": "acc.txt", "strategies": ["viterbi"]}, "strategies"),
        ({"code": "acc.txt", "strategies": []}, "strategies"),
        ({"code": "acc.txt", "trials": 0}, "trials"),
        ({"code": "missing.txt"}, "code"),
        ({"code": "acc.txt", "prior": [0.2, 0.2, 0.6]}, "prior"),
        ({"code": "acc.txt", "correlation": {"kind": "qsc", "eps": 0.9}}, "correlation"),
        ({"code": "acc.txt", "correlation": {"kind": "laplace"}}, "correlation.kind"),
        ({"code": "acc.txt", "parity_mode": "best"}, "parity_mode"),
        ({"code": "acc.txt", "colour": "red"}, "colour"),
        ({"code": "acc.txt", "seed": -1}, "seed"),
        ({"code": "turbo.txt", "N": 9}, "N"),
        ({"audit": {"family": "ldpc"}}, "audit.family"),
    ],
)
def test_config_errors_name_field(codes, raw, field):
    with pytest.raises(ConfigError) as exc:
        cfg_of(codes, **raw)
    assert exc.value.field == field
    assert field in str(exc.value)


def test_invalid_json_reports_line(codes):
    path = codes / "bad.json"
    path.write_text('{\n  "code": "acc.txt",\n  "N": ,\n}')
    with pytest.raises(ConfigError) as exc:
        parse_config(path)
    assert exc.value.line == 3


def test_rate_accounting():
    acc = ParityRealization.from_polynomials(2, [[1, 1]])
    two = ParityRealization.from_polynomials(2, [[1, 1], [1, 0, 1]])
    assert compression_rate(acc) == Fraction(1, 2)
    assert compression_rate(two) == Fraction(2, 3)
    tc = TurboCode(acc, two, np.arange(5))
    # N (n0 + n1 - 2k) / (N (n0 + n1 - k)) with n0 = 2, n1 = 3, k = 1
    assert compression_rate(tc) == Fraction(3, 4)


def test_csv_and_summary(codes, tmp_path):
    cfg = cfg_of(codes, code="gf3.txt", N=20, prior=[0.5, 0.3, 0.2], eps_sweep=[0.2, 0.05],
                 strategies=["map", "complementary", "isf"], trials=3, seed=11)
    records, summary = run_trials(cfg)
    csv_path, json_path = emit_results(records, summary, str(tmp_path / "out" / "run"))
    rows = read_records(csv_path)
    assert len(rows) == 2 * 3 * 3
    assert tuple(rows[0]) == CSV_FIELDS
    assert {(r["eps"], r["trial"], r["strategy"]) for r in rows} == {
        (repr(e), str(t), s) for e in (0.2, 0.05) for t in range(3) for s in cfg.strategies
    }
    for r in rows:
        assert int(r["sys_errors"]) <= int(r["sys_symbols"]) == 20
        assert int(r["par_errors"]) <= int(r["par_symbols"]) == 20
    back = parse_summary(json_path)
    assert back == json.loads(json.dumps(summary))
    assert back["rate_fraction"] == "1/2"
    for p in back["points"]:
        assert p["sys_ser"] == p["sys_errors"] / p["sys_symbols"]
        lo, hi = p["sys_ci95"]
        assert lo <= p["sys_ser"] <= hi


def test_summary_numbers_roundtrip_exactly(codes, tmp_path):
    cfg = cfg_of(codes, code="acc.txt", N=33, eps_sweep=[0.1 / 3], trials=2, seed=5)
    records, summary = run_trials(cfg)
    _, json_path = emit_results(records, summary, str(tmp_path / "r"))
    back = parse_summary(json_path)
    for a, b in zip(summary["points"], back["points"]):
        for key, val in a.items():
            assert b[key] == val
    assert back["points"][0]["eps"] == 0.1 / 3


def test_zero_noise_point_has_no_errors(codes):
    cfg = cfg_of(codes, code="gf3.txt", N=40, eps_sweep=[0.0, 0.1], strategies=list(
        ["complementary", "isf", "parity_perspective", "syndrome_trellis", "map"]), trials=3)
    records, _ = run_trials(cfg)
    for rec in records:
        if rec.eps == 0.0:
            assert rec.sys_errors == rec.par_errors == 0


def test_deterministic_across_threads(codes):
    cfg = cfg_of(codes, code="gf3.txt", N=30, eps_sweep=[0.2, 0.1], strategies=["map", "isf"],
                 trials=6, seed=99)
    a, sa = run_trials(cfg, threads=1)
    b, sb = run_trials(cfg, threads=4)
    assert a == b and sa == sb


def test_trial_records_depend_only_on_seed_and_index(codes):
    cfg = cfg_of(codes, code="acc.txt", N=30, trials=4, seed=3)
    few = run_trials(cfg)[0]
    cfg.trials = 6
    more = run_trials(cfg)[0]
    assert more[:4] == few


def test_timing_column_optional(codes, tmp_path):
    cfg = cfg_of(codes, code="acc.txt", N=10, trials=1)
    records, summary = run_trials(cfg, timing=True)
    csv_path, _ = emit_results(records, summary, str(tmp_path / "t"), timing=True)
    assert "elapsed_s" in read_records(csv_path)[0]


def test_turbo_simulation(codes):
    cfg = cfg_of(codes, code="turbo.txt", strategies=["map", "syndrome_trellis"], trials=2,
                 correlation={"kind": "qsc", "eps": 0.05})
    records, summary = run_trials(cfg)
    assert len(records) == 4
    assert summary["rate_fraction"] == "2/3"
    assert all(r.sys_symbols == 8 and r.par_symbols == 16 for r in records)


def test_isf_needs_additive_channel(codes):
    W = [[0.8, 0.1, 0.1], [0.2, 0.7, 0.1]]
    cfg = cfg_of(codes, code="acc.txt", N=8, correlation={"kind": "matrix", "W": W},
                 strategies=["map", "isf"])
    with pytest.raises(ConfigError):
        run_trials(cfg)


def test_audit_random_instances_pass():
    cfg = config_from_dict({"strategies": ["complementary", "isf", "parity_perspective",
                                           "syndrome_trellis", "map"],
                            "audit": {"instances": 20, "N": [8, 32]}, "seed": 4})
    report = equivalence_audit(cfg, threads=2)
    assert report.passed and report.instances == 20
    assert report.max_discrepancy <= 1e-8


def test_audit_noisy_and_turbo():
    noisy = config_from_dict({"strategies": ["map", "parity_perspective"],
                              "audit": {"instances": 10, "noisy_syndrome": True}, "seed": 1})
    assert equivalence_audit(noisy).passed
    turbo = config_from_dict({"strategies": ["map", "complementary"],
                              "audit": {"family": "turbo", "instances": 3, "N": [8, 16]}})
    assert equivalence_audit(turbo).passed


def flipped_tie_rule(name, res):
    """Hook that decides ties toward the largest index for one strategy only."""
    if name != "map":
        return res
    post = res.post_s
    top = post.max(axis=-1, keepdims=True)
    tied = post >= top * (1.0 - TIE_RTOL)
    last = post.shape[-1] - 1 - np.argmax(tied[:, ::-1], axis=-1)
    res.hard_s = unpack(last, 2, 1).reshape(-1, 1)
    return res


def test_audit_negative_control_tie_rule(codes):
    # uniform prior and eps = (q-1)/q make every posterior an exact tie
    cfg = cfg_of(codes, code="acc.txt", N=12, correlation={"kind": "qsc", "eps": 0.5},
                 strategies=["complementary", "map"], trials=1, seed=8)
    assert equivalence_audit(cfg).passed
    report = equivalence_audit(cfg, hook=flipped_tie_rule)
    assert not report.passed
    v = report.violations[0]
    assert v["reason"] == "hard decisions differ"
    assert "replay_seed" in v


def test_audit_replay(codes):
    cfg = config_from_dict({"strategies": ["map", "complementary"], "audit": {"instances": 5},
                            "seed": 6})
    report = equivalence_audit(cfg, replay=123456789)
    assert report.instances == 1 and report.passed


def test_verify_oracle(codes):
    cfg = cfg_of(codes, code="acc.txt", N=6, trials=5,
                 strategies=["complementary", "isf", "parity_perspective", "syndrome_trellis", "map"])
    assert verify_oracle(cfg)["passed"]
    noisy = cfg_of(codes, code="acc.txt", N=6, trials=5, strategies=["map", "parity_perspective"],
                   syndrome_channel={"kind": "qsc", "eps": 0.1})
    assert verify_oracle(noisy)["passed"]
