"""Command-line front end.

    emdk run <scenario.json> [--out PATH] [--seed N] [--strict] [--fd-step H] [--tol-classify T]
    emdk classify <scenario.json> [...]
    emdk selftest [--seed N] [--out PATH] [--flip-hodge]

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from .exterior import hodge, hodge_reversed
from .scenario import (
    RunOptions,
    ScenarioError,
    conventions,
    load_scenario,
    report_schema,
    run_scenario,
    selftest_report,
    validate_document,
)
from .selftest import run_selftest
from .variation import FD_STEP

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot emit non-finite number {x!r}")
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits; key order is preserved."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # numeric rows stay on one line
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [inner + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(report: dict, out: str | None):
    text = dumps(report) + "\n"
    # what is written must re-parse under the published schema
    validate_document(json.loads(text), report_schema())
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _positive(x: str) -> float:
    v = float(x)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return v


def _nonneg_int(x: str) -> int:
    v = int(x)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emdk", description="Electromagnetic media and stress-energy toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of standard output")
    common.add_argument("--seed", type=_nonneg_int, help="seed for random draws (overrides the scenario)")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("scenario", help="scenario JSON file")
    scen.add_argument("--strict", action="store_true", help="exit 3 when a residual exceeds its threshold")
    scen.add_argument("--fd-step", type=_positive, default=FD_STEP, help="finite-difference step")
    scen.add_argument("--tol-classify", type=_positive, default=1e-10,
                      help="relative residual below which a rest frame counts as found")

    sub.add_parser("run", parents=[common, scen], help="run every task in a scenario")
    sub.add_parser("classify", parents=[common, scen], help="run only the classify task")
    st = sub.add_parser("selftest", parents=[common], help="identity suite and round trips")
    st.add_argument("--flip-hodge", action="store_true",
                    help="debug: use the opposite orientation for the Hodge map (must fail)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK

    if args.command == "selftest":
        seed = 0 if args.seed is None else args.seed
        res = run_selftest(seed=seed, star=hodge_reversed if args.flip_hodge else hodge)
        report = {
            "conventions": conventions(1.0),
            "scenario": None,
            "seed": seed,
            "results": [selftest_report(res)],
            "status": "ok" if res.passed else "numerical_failure",
        }
        _emit(report, args.out)
        if not res.passed:
            print("selftest FAILED: " + ", ".join(res.failures), file=sys.stderr)
            return EXIT_NUMERICAL
        return EXIT_OK

    opts = RunOptions(seed=args.seed, fd_step=args.fd_step, tol_classify=args.tol_classify,
                      strict=args.strict, only=("classify",) if args.command == "classify" else None)
    try:
        doc = load_scenario(args.scenario)
        report, failed = run_scenario(doc, opts)
    except ScenarioError as exc:
        print(f"emdk: invalid scenario {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(report, args.out)
    if failed:
        bad = [r["task"] for r in report["results"]
               if r.get("verdict") == "UNDECIDED" or r.get("passed") is False]
        print("emdk: numerical failure in " + ", ".join(bad), file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
