"""Command-line front end: ``fracrules eval-ml | solve | verify``.

Exit codes: 0 success, 1 verification breach, 2 invalid input, 3 numerical
failure (non-convergence, quadrature or contour breakdown), 4 certificate
residual above ``--residual-tol``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path

import numpy as np

from fracrules.errors import (
    BoundaryLimitSingular,
    FracRulesError,
    PoleHit,
    SingularAtZero,
    ValidationError,
)
from fracrules.forcing import parse_forcing
from fracrules.frac_operators import GRID_CONTROL
from fracrules.solvers import (
    BagleyTorvikProblem,
    Sense,
    certify_solution,
    solve_bagley_torvik,
)
from fracrules.special_functions import (
    BivariateMLParams,
    MLParams,
    SeriesControl,
    bivariate_ml_univariate,
    ml2,
    ml3,
)
from fracrules.suites import SUITES, run_suite

EXIT_OK = 0
EXIT_BREACH = 1
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_CERTIFICATE = 4

_INVALID = (ValidationError, BoundaryLimitSingular, PoleHit, SingularAtZero)


def format_float(x: float) -> str:
    return "%.17g" % x


def csv_text(header: Sequence[str], columns: Sequence[np.ndarray]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([format_float(float(v)) for v in row])
    return buf.getvalue()


def json_text(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _check_writable(path: str | None) -> None:
    if path is None or path == "-":
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ValidationError(f"cannot write {path}: directory {parent} is not writable")


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _times(args: argparse.Namespace) -> np.ndarray:
    if args.t_range is not None:
        start, stop, count = args.t_range
        if int(count) != count or count < 1:
            raise ValidationError(f"t-range count must be a positive integer, got {count}")
        return np.linspace(start, stop, int(count))
    if not args.t:
        raise ValidationError("give --t or --t-range")
    return np.asarray(args.t, dtype=float)


def _table(args: argparse.Namespace, header: Sequence[str], columns, meta: dict) -> str:
    if args.format == "json":
        payload = dict(meta)
        for name, col in zip(header, columns):
            payload[name] = [float(v) for v in col]
        return json_text(payload)
    return csv_text(header, columns)


def cmd_eval_ml(args: argparse.Namespace) -> int:
    control = SeriesControl.from_env()
    _check_writable(args.output)
    t = _times(args)
    if args.bivariate:
        if args.gamma is None:
            raise ValidationError("--bivariate needs --gamma")
        params = BivariateMLParams(args.alpha, args.beta, args.gamma)
        values = [
            bivariate_ml_univariate(params, args.lam, args.mu, float(x), control) for x in t
        ]
        meta = {
            "function": "bivariate-kernel",
            "alpha": params.alpha,
            "beta": params.beta,
            "gamma": params.gamma,
            "lambda": args.lam,
            "mu": args.mu,
        }
    else:
        params = MLParams(args.alpha, args.beta, args.gamma_p)
        fn = ml2 if params.gamma_p == 1 else ml3
        values = [fn(params, float(x), control) for x in t]
        meta = {
            "function": "ml2" if fn is ml2 else "ml3",
            "alpha": params.alpha,
            "beta": params.beta,
            "gamma_p": params.gamma_p,
        }
    meta["rel_tol"] = control.rel_tol
    _emit(_table(args, ("t", "value"), (t, np.asarray(values)), meta), args.output)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    _check_writable(args.output)
    _check_writable(args.certificate)
    g = parse_forcing(args.g)
    p = BagleyTorvikProblem(
        args.alpha, args.beta, args.lam, args.mu, g, args.T, args.N, Sense(args.sense)
    )
    control = replace(GRID_CONTROL, rel_tol=SeriesControl.from_env().rel_tol)
    y = solve_bagley_torvik(p, control)
    meta = {
        "alpha": p.alpha,
        "beta": p.beta,
        "lambda": p.lam,
        "mu": p.mu,
        "g": g.to_text(),
        "T": p.T,
        "N": p.N,
        "sense": p.sense.value,
    }
    _emit(_table(args, ("t", "y"), (y.times, np.asarray(y.values)), meta), args.output)
    if not args.certify:
        return EXIT_OK
    cert = certify_solution(p, y)
    report = cert.to_dict()
    report["problem"] = meta
    report["residual_tol"] = args.residual_tol
    report["passed"] = cert.residual_max <= args.residual_tol
    text = json_text(report)
    if args.certificate is None:
        sys.stderr.write(text)
    else:
        _emit(text, args.certificate)
    return EXIT_OK if report["passed"] else EXIT_CERTIFICATE


def cmd_verify(args: argparse.Namespace) -> int:
    path = args.report or f"fracrules-verify-{args.suite}.json"
    _check_writable(path)
    result = run_suite(args.suite)
    _emit(json_text(result.to_dict()), path)
    status = "PASS" if result.passed else "FAIL"
    print(
        f"{result.name}: {len(result.cases)} cases, {len(result.failures)} failed, "
        f"max value {format_float(result.max_value)} -> {status}"
    )
    for case in result.failures:
        print(f"  breach: {case.label} value={format_float(case.value)} tol={case.tolerance}")
    return EXIT_OK if result.passed else EXIT_BREACH


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracrules",
        description="Fractional Leibniz rules, Mittag-Leffler kernels and two-term solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval-ml", help="tabulate a Mittag-Leffler function")
    ev.add_argument("--alpha", type=_finite_float, required=True)
    ev.add_argument("--beta", type=_finite_float, required=True)
    ev.add_argument("--gamma-p", type=_finite_float, default=1.0, help="Prabhakar exponent")
    ev.add_argument(
        "--bivariate",
        action="store_true",
        help="tabulate t^(gamma-1) E_{alpha,beta,gamma}(lambda t^alpha, mu t^beta)",
    )
    ev.add_argument("--gamma", type=_finite_float)
    ev.add_argument("--lambda", dest="lam", type=_finite_float, default=0.0)
    ev.add_argument("--mu", type=_finite_float, default=0.0)
    ev.add_argument("--t", type=_finite_float, nargs="+")
    ev.add_argument("--t-range", type=_finite_float, nargs=3, metavar=("START", "STOP", "COUNT"))
    ev.add_argument("--format", choices=("csv", "json"), default="csv")
    ev.add_argument("--output", "-o", help="output file (default stdout)")
    ev.set_defaults(func=cmd_eval_ml)

    so = sub.add_parser("solve", help="solve D^a y - mu D^b y - lambda y = g with zero data")
    so.add_argument("--alpha", type=_finite_float, default=1.5)
    so.add_argument("--beta", type=_finite_float, default=0.5)
    so.add_argument("--lambda", dest="lam", type=_finite_float, default=0.0)
    so.add_argument("--mu", type=_finite_float, default=0.0)
    so.add_argument("--g", default="const:1", help="const:c, poly:c0,c1,... or exp:a")
    so.add_argument("--T", type=_finite_float, default=5.0)
    so.add_argument("--N", type=int, default=1024)
    so.add_argument("--sense", choices=[s.value for s in Sense], default="caputo")
    so.add_argument("--format", choices=("csv", "json"), default="csv")
    so.add_argument("--output", "-o", help="solution file (default stdout)")
    so.add_argument("--certify", action="store_true", help="substitute the solution back")
    so.add_argument("--certificate", help="certificate JSON file (default stderr)")
    so.add_argument("--residual-tol", type=_finite_float, default=5e-2)
    so.set_defaults(func=cmd_solve)

    ve = sub.add_parser("verify", help="run a fixed verification suite")
    ve.add_argument("suite", choices=list(SUITES))
    ve.add_argument("--report", help="report JSON file (default fracrules-verify-SUITE.json)")
    ve.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FracRulesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
