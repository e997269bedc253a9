"""Command-line entry point: ``sqpattern <subcommand> --system FILE ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import ff, geometry, report, verify
from .counting import BoundSpec, PatternSpec
from .errors import CeilingExceeded, ParseError, SqpatternError
from .sysfile import load_system

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_CEILING = 0, 1, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", required=True, metavar="FILE", help="system file")
    common.add_argument("--workers", type=int, default=None, metavar="N", help="partition count for counting kernels")
    common.add_argument("--ceiling", type=int, default=None, metavar="M", help="enumeration ceiling (points)")
    common.add_argument("--seed", type=int, default=None, metavar="K", help="seed for witness sampling (default 0)")
    common.add_argument("--csv", metavar="PATH", help="write CSV here ('-' for stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    ext = argparse.ArgumentParser(add_help=False)
    ext.add_argument("--ext", type=int, default=1, metavar="E", help="work over F_{q^E}")

    tower = argparse.ArgumentParser(add_help=False)
    tower.add_argument("--tower", metavar="E1..E2", help="extension degrees to sweep")
    tower.add_argument("--constant", type=float, default=None, metavar="C", help="C_user in the explicit bound")
    tower.add_argument("--pattern", action="append", metavar="STR", help="restrict to this pattern (repeatable)")

    ap = argparse.ArgumentParser(prog="sqpattern", description="Square-pattern point counts over finite fields.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common, ext], help="count one pattern over F_{q^e}")
    p.add_argument("--pattern", required=True, metavar="STR", help="string over {+,-}, one sign per polynomial")
    p.add_argument("--constant", type=float, default=None, metavar="C", help="C_user in the explicit bound")

    p = sub.add_parser("verify", parents=[common, tower], help="compare fitted error exponents with a claimed one")
    p.add_argument("theorem", choices=verify.THEOREMS)
    p.add_argument("--max-level", type=int, default=2, help="tower depth for the singular-locus profile")

    sub.add_parser("sweep", parents=[common, tower], help="count every pattern across a tower")

    p = sub.add_parser("sigma", parents=[common], help="singular-locus dimension profile")
    p.add_argument("--max-level", type=int, default=2, help="largest extension degree to census")

    sub.add_parser("classify", parents=[common, ext], help="external/internal classification for one conic")

    p = sub.add_parser("witness", parents=[common], help="search for independence witnesses")
    p.add_argument("--max-level", type=int, default=2, help="largest extension degree to search")
    return ap


def _emit(path, rows, columns) -> None:
    if not path:
        return
    if path == "-":
        report.write_csv(rows, columns, sys.stdout)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        report.write_csv(rows, columns, fh)


def _patterns(args, sf):
    if getattr(args, "pattern", None):
        return [PatternSpec.parse(p) for p in args.pattern]
    return sf.patterns()


def _series_summary(series: dict) -> str:
    lines = []
    for key, s in series.items():
        for r, ok in zip(s.reports, s.bound_flags):
            lines.append(f"q={r.q} pattern {key}: N_S={r.N_S} main={r.main_term} |err|={float(r.abs_error):.6g} bound {'ok' if ok else 'VIOLATED'}")
        lines.append(f"  pattern {key}: fitted exponent {s.fit}, minimal C_user {s.min_constant:.6g}")
    return "\n".join(lines)


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    sf = load_system(args.system)
    ceiling = args.ceiling if args.ceiling is not None else sf.option("ceiling")
    if ceiling is not None:
        ff.set_ceiling(ceiling)
    workers = args.workers if args.workers is not None else sf.option("workers", 1)
    seed = args.seed if args.seed is not None else sf.option("seed", 0)
    C = getattr(args, "constant", None)
    bound = BoundSpec(C if C is not None else sf.option("C_user", BoundSpec().C_user))
    tower = verify.parse_tower(args.tower) if getattr(args, "tower", None) else None

    if args.command == "count":
        r = verify.cmd_count(sf, args.pattern, args.ext, workers, ceiling)
        ok = r.bound_satisfied(bound)
        print(f"{r.pattern} over F_{r.q}: N_S={r.N_S} main term {r.main_term} |error|={r.abs_error}")
        print(f"|error|/q^(n-1/2)={r.ratio_halfpow:.6g}; explicit bound with C={bound.C_user}: {'ok' if ok else 'VIOLATED'}")
        _emit(args.csv, [report.report_row(r, ok)], report.COUNT_COLUMNS)
        return EXIT_PASS

    if args.command == "sweep":
        series = verify.cmd_sweep(sf, tower or verify.default_tower(sf.system(), ceiling), workers, bound, ceiling, _patterns(args, sf))
        print(_series_summary(series))
        _emit(args.csv, [row for s in series.values() for row in report.count_rows(s)], report.COUNT_COLUMNS)
        return EXIT_PASS

    if args.command == "verify":
        verdict = verify.cmd_verify(
            args.theorem, sf, tower, workers, seed, bound, ceiling, args.max_level, _patterns(args, sf)
        )
        print(verdict.summary())
        _emit(args.csv, [row for s in verdict.series.values() for row in report.count_rows(s)], report.COUNT_COLUMNS)
        return EXIT_PASS if verdict.passed else EXIT_FAIL

    if args.command == "sigma":
        prof = geometry.sigma_profile(sf.system(), args.max_level, workers, ceiling)
        print(prof.summary())
        _emit(args.csv, report.profile_rows(prof), report.PROFILE_COLUMNS)
        return EXIT_PASS

    if args.command == "classify":
        table = verify.cmd_classify(sf, args.ext)
        on, ext_, int_ = table.totals
        print(f"conic over {table.field_name}: on={on} external={ext_} internal={int_} (calibrated constant {table.constant})")
        _emit(args.csv, report.classify_rows(table), report.CLASSIFY_COLUMNS)
        return EXIT_PASS

    if args.command == "witness":
        wit = geometry.check_condition_iii(sf.system(), args.max_level, seed=seed)
        for i in range(1, wit.m + 1):
            cert = wit.certificates.get(i)
            print(cert.describe() if cert else f"f{i}: no witness up to level {args.max_level}")
        print(f"status: {wit.status}")
        _emit(args.csv, report.witness_rows(wit), report.WITNESS_COLUMNS)
        return EXIT_PASS if wit.complete else EXIT_FAIL
    raise AssertionError(args.command)


def main(argv=None) -> int:
    saved = ff.get_ceiling()
    try:
        return run(argv)
    except CeilingExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CEILING
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SqpatternError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        ff.set_ceiling(saved)


if __name__ == "__main__":
    sys.exit(main())
