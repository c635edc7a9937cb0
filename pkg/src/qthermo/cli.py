"""Command-line interface: scan, diff, scaling, bound, selftest."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__, selftest
from .channel import BathSpec
from .errors import ConfigError, ContractError, DomainError, NumericError
from .metrology import m1_m2
from .scan import (
    load_toml,
    parse_diff_config,
    parse_scaling_config,
    parse_scan_config,
    run_difference_scan,
    run_n_scaling,
    run_time_scan,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qthermo",
        description="Nonequilibrium qubit-ensemble thermometry scans",
    )
    parser.add_argument("--version", action="version", version=f"qthermo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, doc in (
        ("scan", "time scan over a parameter grid, CSV output"),
        ("diff", "difference scan (peak vs asymptote, or correlated vs productized)"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="TOML config file")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--threads", type=int, default=1, help="worker threads (0 = auto)")
        p.add_argument("--beta", type=float, help="override: replace the beta grid")
        p.add_argument("--gamma", type=float, help="override: coupling rate")

    p = sub.add_parser("scaling", help="per-state linear fits of QFI versus qubit number")
    p.add_argument("--config", required=True, help="TOML config file")
    p.add_argument("--out", required=True, help="output JSON report path")
    p.add_argument("--csv", help="also write the per-N points as CSV")
    p.add_argument("--threads", type=int, default=1, help="worker threads (0 = auto)")
    p.add_argument("--beta", type=float, help="override: bath inverse temperature")
    p.add_argument("--gamma", type=float, help="override: coupling rate")
    p.add_argument("--n", type=int, help="override: largest ensemble size")

    p = sub.add_parser("bound", help="channel-information bound at one (beta, gamma, t, N)")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="number of probe qubits")
    p.add_argument("--out", help="write JSON here instead of stdout")

    sub.add_parser("selftest", help="run the built-in invariant corpus")
    return parser


def _override_bath(doc: dict, args) -> dict:
    if args.beta is not None:
        doc.setdefault("bath", {})["beta"] = args.beta
    if args.gamma is not None:
        doc.setdefault("bath", {})["gamma"] = args.gamma
    return doc


def _cmd_scan(args) -> int:
    cfg = parse_scan_config(_override_bath(load_toml(args.config), args))
    run_time_scan(cfg, threads=args.threads).write(args.out)
    return EXIT_OK


def _cmd_diff(args) -> int:
    cfg = parse_diff_config(_override_bath(load_toml(args.config), args))
    run_difference_scan(cfg, threads=args.threads).write(args.out)
    return EXIT_OK


def _cmd_scaling(args) -> int:
    doc = _override_bath(load_toml(args.config), args)
    if args.n is not None:
        doc.setdefault("scaling", {})["n_max"] = args.n
    report = run_n_scaling(parse_scaling_config(doc), threads=args.threads)
    report.write_json(args.out)
    if args.csv:
        report.points_table().write(args.csv)
    return EXIT_OK


def _cmd_bound(args) -> int:
    if args.n < 1:
        raise ConfigError(f"--n must be >= 1, got {args.n}")
    try:
        bath = BathSpec(args.beta, args.gamma)
    except DomainError as exc:
        raise ConfigError(str(exc))
    report = m1_m2(bath, args.t)
    doc = {
        "beta": args.beta,
        "gamma": args.gamma,
        "t": args.t,
        "n_qubits": args.n,
        "m1_norm": report.m1_norm,
        "m2_norm": report.m2_norm,
        "bound_value": report.bound_value(args.n),
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "scan":
            return _cmd_scan(args)
        if args.command == "diff":
            return _cmd_diff(args)
        if args.command == "scaling":
            return _cmd_scaling(args)
        if args.command == "bound":
            return _cmd_bound(args)
        failures = selftest.run()
        return EXIT_OK if failures == 0 else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ContractError, NumericError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
