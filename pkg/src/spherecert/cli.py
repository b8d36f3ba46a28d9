"""Command line entry point: ``spherecert certify | tables | selftest``."""

from __future__ import annotations

import argparse
import json
import sys
import time

from .config import ConfigError, JobConfig, load_config, parse_config
from .pipeline import run_certify
from .report import CertificateReport, dumps
from .selftest import run_selftest
from .tables import TABLE_KINDS, emit_tables

__all__ = ["main", "JobConfig", "CertificateReport", "run_certify", "emit_tables", "run_selftest",
           "parse_config", "load_config", "EXIT_CODES"]

EXIT_CODES = {"CERTIFIED": 0, "REJECTED": 1, "INCONCLUSIVE": 2}
EXIT_CONFIG = 64


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spherecert",
                                     description="Certify constant maximizers of the weighted "
                                                 "adjoint restriction inequality on spheres.")
    sub = parser.add_subparsers(dest="command", required=True)

    cert = sub.add_parser("certify", help="run a certification job")
    cert.add_argument("--config", required=True, help="path to the JSON job configuration")
    cert.add_argument("--out", help="write the report here instead of stdout")
    cert.add_argument("--timing", action="store_true",
                      help="add wall time to diagnostics (makes the report non-reproducible)")

    tab = sub.add_parser("tables", help="regenerate a published table")
    tab.add_argument("--which", required=True, choices=TABLE_KINDS)
    tab.add_argument("--R", type=float, help="continuation radius for table A")
    tab.add_argument("--d", type=int, choices=(3, 4, 5, 6, 7), help="restrict to one dimension")
    tab.add_argument("--lmax", type=int, help="largest ell for the lambda table (default 10)")
    tab.add_argument("--json", action="store_true", help="append a machine-readable block")

    st = sub.add_parser("selftest", help="run the property suites")
    st.add_argument("--seed", type=int, default=0)
    return parser


def _certify(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    start = time.perf_counter()
    report = run_certify(cfg)
    if args.timing:
        report.diagnostics["wall_time_s"] = time.perf_counter() - start
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"{report.verdict} (report written to {args.out})")
    else:
        sys.stdout.write(text)
    return EXIT_CODES[report.verdict]


def _tables(args) -> int:
    if args.R is not None and args.which != "A":
        print("--R only applies to table A", file=sys.stderr)
        return EXIT_CONFIG
    if args.R is not None and not args.R > 4:
        print("--R must exceed 4", file=sys.stderr)
        return EXIT_CONFIG
    table = emit_tables(args.which, R=args.R, d=args.d, lmax=args.lmax)
    print(table.to_text())
    if args.json:
        print(json.dumps(table.to_dict()))
    return 0


def _selftest(args) -> int:
    summary = run_selftest(args.seed)
    print(summary.to_text())
    return 0 if summary.ok else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"certify": _certify, "tables": _tables, "selftest": _selftest}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
