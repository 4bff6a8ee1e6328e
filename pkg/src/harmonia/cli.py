"""Command-line front end.

Every subcommand prints one report.  Exit status: 0 when every verdict in
the report holds, 1 when one fails, 2 on usage, parse or domain errors.

    harmonia hh --fn "x^2" --a 1 --b 2 --format json
    harmonia constants --a 1 --b 2 --q 2
    harmonia sweep jobs.txt --format csv --workers 4
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Iterable

from . import __version__
from .convexity import DEFAULT_TOL as CONVEXITY_TOL
from .convexity import (
    DEFAULT_SAMPLES,
    Verdict,
    check_harmonic_convexity,
    check_via_reciprocal_transform,
)
from .expr import ExprError, parse
from .hh import (
    hh_triple,
    hoelder_bound_check,
    lambda_constants,
    lemma_identity_check,
    mu_constants,
    powermean_bound_check,
)
from .means import (
    PROPOSITIONS,
    compute_means,
    default_p_grid,
    lp_monotonicity_check,
    proposition_check,
)
from .quad import DEFAULT_TOL, Interval, QuadratureError

__all__ = ["main", "run", "format_report", "run_sweep_job", "parse_job_line", "SWEEP_HEADER"]

DEFAULT_SEED = 42
DEFAULT_GAP_TOL = 1e-8
PROPOSITION_3_3_P = (-0.5, 0.5, 1.0, 2.0)

SWEEP_HEADER = (
    "fn", "a", "b", "q",
    "left", "middle", "right", "hh_holds",
    "identity_gap", "identity_holds",
    "powermean_lhs", "powermean_rhs", "powermean_holds",
    "hoelder_rhs", "hoelder_holds",
    "holds", "error",
)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Serialisation


def _num(value: float) -> str:
    if not math.isfinite(value):
        return "null"
    text = format(value, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def _json(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _num(value)
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in value) + "]"
    return json.dumps(str(value))


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g") if math.isfinite(value) else ""
    return str(value)


def _csv(rows: list[dict], header: Iterable[str] | None = None) -> str:
    header = list(header) if header is not None else list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(k)) for k in header])
    return buf.getvalue()


def _human(report: dict, indent: str = "") -> str:
    lines = []
    width = max((len(k) for k in report), default=0)
    for key, value in report.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}:")
            for item in value:
                lines.append(_human(item, indent + "  "))
                lines.append("")
            continue
        shown = repr(value) if isinstance(value, float) else _cell(value) or "-"
        lines.append(f"{indent}{key:<{width}}  {shown}")
    return "\n".join(lines).rstrip("\n")


def format_report(report: dict, fmt: str, rows: list[dict] | None = None, header=None) -> str:
    if fmt == "json":
        return _json(report) + "\n"
    if fmt == "csv":
        return _csv(rows if rows is not None else [report], header)
    return _human(report) + "\n"


# ---------------------------------------------------------------------------
# Subcommands.  Each returns (report, rows-for-csv or None).


def _interval(args) -> Interval:
    return Interval(args.a, args.b)


def cmd_convexity(args):
    fs = parse(args.fn)
    iv = _interval(args)
    direct = check_harmonic_convexity(fs, iv, args.samples, args.tol, args.seed)
    transformed = check_via_reciprocal_transform(fs, iv, args.samples, args.tol, args.seed)

    def compatible(u: Verdict, v: Verdict) -> bool:
        return {u, v} != {Verdict.HOLDS, Verdict.FAILS}

    agree = compatible(direct.harmonically_convex, transformed.harmonically_convex) and compatible(
        direct.harmonically_concave, transformed.harmonically_concave
    )
    target = direct.harmonically_concave if args.concave else direct.harmonically_convex
    witness = direct.concave_witness if args.concave else direct.convex_witness
    report = {
        "command": "convexity",
        "fn": args.fn,
        "a": iv.a,
        "b": iv.b,
        "direction": "concave" if args.concave else "convex",
        "samples": args.samples,
        "seed": args.seed,
        "tol": args.tol,
        "harmonically_convex": str(direct.harmonically_convex),
        "harmonically_concave": str(direct.harmonically_concave),
        "transform_convex": str(transformed.harmonically_convex),
        "transform_concave": str(transformed.harmonically_concave),
        "checkers_agree": agree,
        "witness_x": witness.x if witness else None,
        "witness_y": witness.y if witness else None,
        "witness_t": witness.t if witness else None,
        "witness_violation": witness.violation if witness else None,
        "holds": agree and target is not Verdict.FAILS,
    }
    return report, None


def cmd_hh(args):
    fs = parse(args.fn)
    r = hh_triple(fs, _interval(args), args.tol, concave=args.concave)
    report = {
        "command": "hh",
        "fn": args.fn,
        "a": args.a,
        "b": args.b,
        "concave": args.concave,
        "tol": args.tol,
        "left": r.left,
        "middle": r.middle,
        "right": r.right,
        "middle_error": r.middle_error,
        "verdict_left": r.verdict_left,
        "verdict_right": r.verdict_right,
        "holds": r.holds,
    }
    return report, None


def cmd_identity(args):
    fs = parse(args.fn)
    r = lemma_identity_check(fs, _interval(args), args.tol)
    report = {
        "command": "identity",
        "fn": args.fn,
        "a": args.a,
        "b": args.b,
        "tol": args.tol,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "gap": r.gap,
        "gap_tol": args.gap_tol,
        "scale": r.scale,
        "lhs_error": r.lhs_error,
        "rhs_error": r.rhs_error,
        "holds": r.holds(args.gap_tol),
    }
    return report, None


def _bound_report(name: str, args, r) -> dict:
    report = {
        "command": name,
        "fn": args.fn,
        "a": args.a,
        "b": args.b,
        "q": r.params.q,
        "p": r.params.p,
        "tol": args.tol,
        "lhs_abs": r.lhs_abs,
        "rhs": r.rhs,
        "slack": r.slack,
        "tightness": r.tightness,
    }
    report.update(r.constants)
    report["hypothesis_checked"] = r.hypothesis_checked
    report["hypothesis"] = str(r.hypothesis) if r.hypothesis is not None else None
    report["holds"] = r.verdict
    return report


def cmd_bound_powermean(args):
    r = powermean_bound_check(
        parse(args.fn), _interval(args), args.q, args.tol, args.check_hypothesis, args.seed
    )
    return _bound_report("bound-powermean", args, r), None


def cmd_bound_hoelder(args):
    r = hoelder_bound_check(
        parse(args.fn), _interval(args), args.q, args.tol, args.check_hypothesis, args.seed
    )
    return _bound_report("bound-hoelder", args, r), None


def cmd_constants(args):
    iv = _interval(args)
    lc = lambda_constants(iv)
    report = {
        "command": "constants",
        "a": iv.a,
        "b": iv.b,
        "lambda1": lc.lambda1,
        "lambda2": lc.lambda2,
        "lambda3": lc.lambda3,
        "lambda1_minus_lambda2": lc.lambda1 - lc.lambda2,
        "q": args.q,
        "mu1": None,
        "mu2": None,
    }
    if args.q is not None:
        mc = mu_constants(iv, args.q)
        report["mu1"], report["mu2"] = mc.mu1, mc.mu2
    report["holds"] = min(lc.lambda1, lc.lambda2, lc.lambda3) >= 0.0
    return report, None


def cmd_means(args):
    m = compute_means(args.a, args.b, args.p)
    monotone = lp_monotonicity_check(args.a, args.b, default_p_grid())
    chain = m.chain_holds()
    report = {
        "command": "means",
        "a": args.a,
        "b": args.b,
        "A": m.A,
        "G": m.G,
        "H": m.H,
        "L": m.L,
        "I": m.I,
        "p": m.Lp[0] if m.Lp else None,
        "Lp": m.Lp[1] if m.Lp else None,
        "chain_holds": chain,
        "lp_monotone": monotone,
        "holds": chain and monotone,
    }
    return report, None


def cmd_props(args):
    which = [args.which] if args.which else list(PROPOSITIONS)
    cells = []
    for w in which:
        if w == "3.3":
            ps = [args.p] if args.p is not None else list(PROPOSITION_3_3_P)
        else:
            ps = [None]
        for p in ps:
            r = proposition_check(w, args.a, args.b, p, args.tol)
            cells.append(
                {
                    "proposition": r.which,
                    "a": r.a,
                    "b": r.b,
                    "p": r.p,
                    "lhs": r.lhs,
                    "mid": r.mid,
                    "rhs": r.rhs,
                    "hh_lhs": r.hh_lhs,
                    "hh_mid": r.hh_mid,
                    "hh_rhs": r.hh_rhs,
                    "agreement": r.agreement,
                    "agrees": r.agrees,
                    "holds": r.holds and r.agrees,
                }
            )
    report = {
        "command": "props",
        "a": args.a,
        "b": args.b,
        "propositions": cells,
        "holds": all(c["holds"] for c in cells),
    }
    return report, cells


# ---------------------------------------------------------------------------
# Sweep


def parse_job_line(line: str) -> dict | None:
    """Parse ``fn=... a=... b=... [q=...]``; blank and ``#`` lines give None."""
    try:
        tokens = shlex.split(line, comments=True)
    except ValueError as exc:
        raise UsageError(f"bad job line {line.strip()!r}: {exc}") from None
    if not tokens:
        return None
    job: dict[str, Any] = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or key not in ("fn", "a", "b", "q"):
            raise UsageError(f"bad job field {token!r}; expected fn=, a=, b=, q=")
        job[key] = value
    missing = {"fn", "a", "b"} - job.keys()
    if missing:
        raise UsageError(f"job line missing {sorted(missing)}: {line.strip()!r}")
    try:
        job["a"], job["b"] = float(job["a"]), float(job["b"])
        job["q"] = float(job["q"]) if "q" in job else None
    except ValueError as exc:
        raise UsageError(f"bad number in job line {line.strip()!r}: {exc}") from None
    return job


def run_sweep_job(job: dict, tol: float = DEFAULT_TOL, gap_tol: float = DEFAULT_GAP_TOL) -> dict:
    """Evaluate one sweep cell; errors are recorded in the ``error`` column."""
    row: dict[str, Any] = {k: None for k in SWEEP_HEADER}
    row.update(fn=job["fn"], a=job["a"], b=job["b"], q=job["q"])
    try:
        fs = parse(job["fn"])
        iv = Interval(job["a"], job["b"])
        hh = hh_triple(fs, iv, tol)
        row.update(left=hh.left, middle=hh.middle, right=hh.right, hh_holds=hh.holds)
        verdicts = [hh.holds]
        if iv.positive:
            lemma = lemma_identity_check(fs, iv, tol)
            row.update(identity_gap=lemma.gap, identity_holds=lemma.holds(gap_tol))
            verdicts.append(lemma.holds(gap_tol))
            q = job["q"]
            if q is not None:
                pm = powermean_bound_check(fs, iv, q, tol)
                row.update(powermean_lhs=pm.lhs_abs, powermean_rhs=pm.rhs, powermean_holds=pm.verdict)
                verdicts.append(pm.verdict)
                if q > 1.0:
                    ho = hoelder_bound_check(fs, iv, q, tol)
                    row.update(hoelder_rhs=ho.rhs, hoelder_holds=ho.verdict)
                    verdicts.append(ho.verdict)
        row["holds"] = all(verdicts)
    except (ExprError, QuadratureError, ValueError) as exc:
        row["holds"] = False
        row["error"] = str(exc)
    return row


def _sweep_cell(args: tuple[dict, float, float]) -> dict:
    return run_sweep_job(*args)


def cmd_sweep(args):
    try:
        with open(args.jobs, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read job file: {exc}") from None
    jobs = [job for job in map(parse_job_line, lines) if job is not None]
    work = [(job, args.tol, args.gap_tol) for job in jobs]
    if args.workers > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_cell, work))
    else:
        rows = [_sweep_cell(w) for w in work]
    errors = sum(1 for r in rows if r["error"])
    report = {
        "command": "sweep",
        "jobs": args.jobs,
        "cells": rows,
        "errors": errors,
        "holds": all(r["holds"] for r in rows),
    }
    return report, rows


# ---------------------------------------------------------------------------
# Argument parsing


def _seed_default() -> int:
    env = os.environ.get("HARMONIA_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"HARMONIA_SEED must be an integer, got {env!r}") from None


def build_parser(seed_default: int = DEFAULT_SEED) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "human"), default="human")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument(
        "--tol", type=float, default=None,
        help=f"quadrature / verdict tolerance (default {DEFAULT_TOL:g}; convexity {CONVEXITY_TOL:g})",
    )
    common.add_argument("--seed", type=int, default=seed_default)

    def fn_interval(p, fn=True):
        if fn:
            p.add_argument("--fn", required=True, help='function of x, e.g. "x^2*ln(x)"')
        p.add_argument("--a", type=float, required=True)
        p.add_argument("--b", type=float, required=True)

    parser = argparse.ArgumentParser(
        prog="harmonia",
        description="Numerical checks for harmonically convex functions and related means.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("convexity", parents=[common], help="sample the harmonic convexity definition")
    fn_interval(p)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--concave", action="store_true", help="verify the concave direction instead")
    p.set_defaults(handler=cmd_convexity)

    p = sub.add_parser("hh", parents=[common], help="harmonic Hermite-Hadamard triple")
    fn_interval(p)
    p.add_argument("--concave", action="store_true", help="check the reversed chain")
    p.set_defaults(handler=cmd_hh)

    p = sub.add_parser("identity", parents=[common], help="compare both sides of the derivative identity")
    fn_interval(p)
    p.add_argument("--gap-tol", type=float, default=DEFAULT_GAP_TOL)
    p.set_defaults(handler=cmd_identity)

    for name, handler in (("bound-powermean", cmd_bound_powermean), ("bound-hoelder", cmd_bound_hoelder)):
        p = sub.add_parser(name, parents=[common], help=f"{name.split('-')[1]} upper bound")
        fn_interval(p)
        p.add_argument("--q", type=float, required=True)
        p.add_argument("--check-hypothesis", action="store_true", help="sample |f'|^q for harmonic convexity")
        p.set_defaults(handler=handler)

    p = sub.add_parser("constants", parents=[common], help="lambda and mu constants")
    fn_interval(p, fn=False)
    p.add_argument("--q", type=float)
    p.set_defaults(handler=cmd_constants)

    p = sub.add_parser("means", parents=[common], help="special means and their chain")
    fn_interval(p, fn=False)
    p.add_argument("--p", type=float)
    p.set_defaults(handler=cmd_means)

    p = sub.add_parser("props", parents=[common], help="mean inequalities from the Hermite-Hadamard chain")
    fn_interval(p, fn=False)
    p.add_argument("--which", choices=PROPOSITIONS)
    p.add_argument("--p", type=float, help="parameter of 3.3 (default: -0.5, 0.5, 1, 2)")
    p.set_defaults(handler=cmd_props)

    p = sub.add_parser("sweep", parents=[common], help="batch run from a job file")
    p.add_argument("jobs", help="job file, one 'fn=... a=... b=... [q=...]' per line")
    p.add_argument("--gap-tol", type=float, default=DEFAULT_GAP_TOL)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_sweep)
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        parser = build_parser(_seed_default())
    except UsageError as exc:
        print(f"harmonia: {exc}", file=stderr)
        return 2
    try:
        # argparse writes usage and --help text to the process streams
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.tol is None:
        args.tol = CONVEXITY_TOL if args.command == "convexity" else DEFAULT_TOL
    try:
        report, rows = args.handler(args)
    except (UsageError, ExprError, QuadratureError, ValueError) as exc:
        print(f"harmonia {args.command}: {exc}", file=stderr)
        return 2

    header = SWEEP_HEADER if args.command == "sweep" else None
    text = format_report(report, args.format, rows, header)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)

    if args.command == "sweep" and report["errors"]:
        for row in rows:
            if row["error"]:
                print(f"harmonia sweep: {row['fn']} on [{row['a']}, {row['b']}]: {row['error']}", file=stderr)
        return 2
    if not report["holds"]:
        if report.get("witness_x") is not None:
            print(
                "witness: x={witness_x!r} y={witness_y!r} t={witness_t!r} "
                "violation={witness_violation!r}".format(**report),
                file=stderr,
            )
        return 1
    return 0


def main() -> None:
    sys.exit(run())
