"""Command line entry point: ``carathedyn <task> --fixture NAME | --system FILE``."""
from __future__ import annotations

import argparse
import sys

from .config import ConfigError
from .harness import TASKS, RunConfig, list_fixtures, run, write_report

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected CHECK=VALUE")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="carathedyn",
                                description="Verify Carathéodory constructions of equilibrium measures "
                                            "on symbolic suspension flows.")
    p.add_argument("task", choices=TASKS + ("all", "list-fixtures"))
    src = p.add_mutually_exclusive_group()
    src.add_argument("--fixture", help="bundled fixture name")
    src.add_argument("--system", dest="system_file", help="TOML system file")
    p.add_argument("--cutoff", dest="cutoffs", type=float, action="append",
                   help="cutoff T; repeat for a schedule")
    p.add_argument("--depth-cap", type=int)
    p.add_argument("--alpha-tol", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="directory for report.json, summary.txt and CSV tables")
    p.add_argument("--tol", action="append", type=_tolerance, default=[],
                   help="per-check tolerance override, CHECK=VALUE")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.task == "list-fixtures":
            for row in list_fixtures():
                print(f"{row['name']:<7} P={row['pressure']:.9f}  {row['description']}")
            return EXIT_PASS
        cfg = RunConfig(args.task, args.fixture, args.system_file, args.cutoffs, args.depth_cap,
                        args.alpha_tol, args.seed, args.out, dict(args.tol))
        report = run(cfg)
        if args.out:
            write_report(report, args.out)
        print(report.summary())
    except ConfigError as exc:
        print(f"carathedyn: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
