"""Command-line interface.

Subcommands::

    swsyndrome encode   --config C --input X   [--out S]
    swsyndrome decode   --config C --side Y --syndrome S [--strategy NAME] [--out XHAT]
    swsyndrome simulate --config C [--seed U64] [--threads N] [--out PREFIX] [--timing]
    swsyndrome audit    --config C [--seed U64] [--threads N] [--replay SEED] [--out PATH]
    swsyndrome verify   --config C [--seed U64] [--strategy NAME]

Symbol files hold whitespace-separated integers (``#`` comments allowed) in
the flat layout: row-major ``[xs_i | xp_i]`` per time step for convolutional
codes, ``[xs | x0 | x1]`` for turbo codes; syndromes likewise (turbo:
``[s0 | s1]``).

Exit codes: 0 success, 2 configuration error, 3 audit or verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .code import TurboCode, syndrome_form, turbo_syndrome_form
from .decoders import STRATEGIES, decode, turbo_syndrome_decode
from .errors import ConfigError, DecodingInconsistency, DegenerateEvidence, UnsupportedConfiguration
from .sim import emit_results, equivalence_audit, parse_config, run_trials, verify_oracle

EXIT_OK, EXIT_CONFIG, EXIT_AUDIT = 0, 2, 3


def read_symbols(path) -> np.ndarray:
    tokens = []
    with open(path) as fh:
        for line in fh:
            tokens.extend(line.split("#", 1)[0].split())
    try:
        return np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError:
        raise ConfigError(f"{path}: symbol files hold integers only") from None


def write_symbols(path, symbols, width):
    arr = np.asarray(symbols).reshape(-1)
    rows = [" ".join(map(str, arr[i : i + width].tolist())) for i in range(0, len(arr), width)]
    text = "\n".join(rows) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _rows(flat, width, what):
    if len(flat) % width:
        raise ConfigError(f"{what} length {len(flat)} is not a multiple of {width}")
    return flat.reshape(-1, width)


def _load(args):
    cfg = parse_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "strategy", None):
        cfg.strategies = (args.strategy,)
    return cfg


def cmd_encode(args):
    cfg = _load(args)
    flat = read_symbols(args.input)
    code = cfg.code
    if isinstance(code, TurboCode):
        s0, s1 = turbo_syndrome_form(code, flat)
        write_symbols(args.out, np.concatenate([s0.ravel(), s1.ravel()]), code.widths[1])
    else:
        s = syndrome_form(code, _rows(flat, code.n, "source"))
        write_symbols(args.out, s, code.n_minus_k)
    return EXIT_OK


def cmd_decode(args):
    cfg = _load(args)
    strategy = cfg.strategies[0]
    y = read_symbols(args.side)
    syn = read_symbols(args.syndrome)
    code = cfg.code
    ch = cfg.points()[0][1]
    scs = cfg.syndrome_channels()
    if isinstance(code, TurboCode):
        c0, c1 = code.constituents
        n0 = code.N * c0.n_minus_k
        if len(syn) != n0 + code.N * c1.n_minus_k:
            raise ConfigError("turbo syndrome length does not match the code")
        r = (syn[:n0].reshape(code.N, -1), syn[n0:].reshape(code.N, -1))
        res = turbo_syndrome_decode(code, y, cfg.prior, ch, strategy=strategy,
                                    iterations=cfg.iterations, r=r, sc=scs,
                                    parity_mode=cfg.parity_mode)
        write_symbols(args.out, res.hard, code.k)
    else:
        yr = _rows(y, code.n, "side information")
        r = _rows(syn, code.n_minus_k, "syndrome")
        res = decode(strategy, code, yr, cfg.prior, ch, r=r, sc=scs[0],
                     parity_mode=cfg.parity_mode)
        write_symbols(args.out, res.hard, code.n)
    return EXIT_OK


def cmd_simulate(args):
    cfg = _load(args)
    out = args.out or cfg.out
    if out is None:
        raise ConfigError("no output path; set 'out' in the config or pass --out", field="out")
    records, summary = run_trials(cfg, threads=args.threads, timing=args.timing)
    csv_path, json_path = emit_results(records, summary, out, timing=args.timing)
    for p in summary["points"]:
        eps = "-" if p["eps"] is None else f"{p['eps']:g}"
        print(f"eps={eps:>8} {p['strategy']:<20} sys_ser={p['sys_ser']:.3e} "
              f"par_ser={p['par_ser']:.3e} erasures={p['erasures']}")
    print(f"rate={summary['rate_fraction']}  wrote {csv_path} {json_path}")
    return EXIT_OK


def cmd_audit(args):
    cfg = _load(args)
    report = equivalence_audit(cfg, threads=args.threads, replay=args.replay)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    if not report.passed:
        first = (report.violations or report.errors)[0]
        print(f"audit FAILED: {first}", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


def cmd_verify(args):
    cfg = _load(args)
    report = verify_oracle(cfg)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if report["passed"] else EXIT_AUDIT


def build_parser():
    parser = argparse.ArgumentParser(
        prog="swsyndrome",
        description="Syndrome-based Slepian-Wolf coding with convolutional and turbo codes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True, strategy=True, threads=False):
        p.add_argument("--config", required=True, metavar="PATH", help="experiment JSON file")
        if seed:
            p.add_argument("--seed", type=int, default=None, metavar="U64",
                           help="override the master seed")
        if strategy:
            p.add_argument("--strategy", choices=STRATEGIES, default=None,
                           help="decode with this strategy only")
        if threads:
            p.add_argument("--threads", type=int, default=1, metavar="N")

    p = sub.add_parser("encode", help="form the syndrome of a source file")
    common(p, seed=False, strategy=False)
    p.add_argument("--input", required=True, metavar="PATH", help="source symbols")
    p.add_argument("--out", default=None, metavar="PATH")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="reconstruct the source from side information and syndrome")
    common(p, seed=False)
    p.add_argument("--side", required=True, metavar="PATH", help="side-information symbols")
    p.add_argument("--syndrome", required=True, metavar="PATH",
                   help="syndrome symbols (received syndrome for noisy channels)")
    p.add_argument("--out", default=None, metavar="PATH")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo symbol-error-rate simulation")
    common(p, threads=True)
    p.add_argument("--out", default=None, metavar="PATH", help="output prefix (.csv/.json)")
    p.add_argument("--timing", action="store_true",
                   help="add an elapsed_s column (output is then not reproducible)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit", help="check that the decoding strategies agree")
    common(p, threads=True)
    p.add_argument("--replay", type=int, default=None, metavar="SEED",
                   help="re-run the single instance with this replay seed")
    p.add_argument("--out", default=None, metavar="PATH", help="write the JSON report here")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("verify", help="compare decoders with exhaustive enumeration")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UnsupportedConfiguration) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DecodingInconsistency, DegenerateEvidence) as exc:
        print(f"decoding failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
