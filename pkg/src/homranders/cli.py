"""Command-line front end.

Exit codes: 0 success, 2 usage / parse / validation failure, 3 internal
consistency failure (the algebraic tests disagree with each other or with
the numeric oracle).
"""
from __future__ import annotations

import argparse
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .catalog import catalog_entries, catalog_entry, random_admissible_u
from .chart import CHART_RADIUS, SECOND_ORDER_STEP, metric_at, metric_field
from .criteria import DEFAULT_TOL, equivalence_check
from .derivatives import DEFAULT_STEP
from .errors import ChartDomainError, HomRandersError, InputFormatError, InternalConsistencyError, NumericalAccuracyWarning
from .fileio import dump_report, export_input, load_input
from .finsler import (
    DEFECT_GUARD,
    DEFECT_THRESHOLD,
    SAMPLE_COUNT,
    berwald_defect,
    defect_verdict,
    ricci_defect,
    sample_pairs,
)
from .liealg import validate_datum

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INCONSISTENT = 3
DEFAULT_SEED = 7
DEFAULT_COUNT = 25

VERDICT_NAMES = {True: "quadratic", False: "not quadratic", None: "inconclusive"}


class _Fail(Exception):
    def __init__(self, code: int, message: str, report: dict | None = None):
        super().__init__(message)
        self.code = code
        self.report = report


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _point(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# command bodies (pure: return a report dict, raise _Fail)


def _load(path):
    try:
        return load_input(path)
    except FileNotFoundError:
        raise _Fail(EXIT_INVALID, f"{path}: no such file") from None
    except InputFormatError as exc:
        raise _Fail(EXIT_INVALID, f"{path}: {exc}") from None
    except HomRandersError as exc:
        raise _Fail(EXIT_INVALID, f"{path}: {exc}") from None


def _validated(parsed, tol):
    report = validate_datum(parsed.datum, tol)
    if not report.passed:
        raise _Fail(
            EXIT_INVALID,
            "validation failed: " + "; ".join(f"{v.invariant} at {v.index} ({v.residual:.3e})" for v in report.violations[:5]),
            {"input": parsed.echo, "validation": report.as_dict()},
        )
    return report


def _criteria(datum, tol) -> dict:
    try:
        return equivalence_check(datum, tol).as_dict()
    except InternalConsistencyError as exc:
        raise _Fail(EXIT_INCONSISTENT, f"{type(exc).__name__}: {exc}") from None


def run_check(path, tol: float | None = None) -> dict:
    t0 = time.perf_counter()
    parsed = _load(path)
    ctol = parsed.tolerances["criteria"] if tol is None else tol
    val = _validated(parsed, parsed.tolerances["validation"])
    crit = _criteria(parsed.datum, ctol)
    return {
        "command": "check",
        "input": parsed.echo,
        "validation": val.as_dict(),
        "criteria": crit,
        "equivalence": {"berwald": crit["berwald"], "ricci_quadratic": crit["ricci_quadratic"], "agree": crit["berwald"] == crit["ricci_quadratic"]},
        "timings": {"total_s": time.perf_counter() - t0},
    }


def oracle_section(datum, samples: int, step: float, curvature_step: float, threshold: float, guard: float, radius: float = CHART_RADIUS) -> dict:
    field = metric_field(datum, radius)
    pairs = sample_pairs(datum.n, samples)
    x = np.zeros(datum.n)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericalAccuracyWarning)
        bd = berwald_defect(field, x, pairs, step)
        rd = ricci_defect(field, x, pairs, curvature_step)
    acc = sum(1 for w in caught if issubclass(w.category, NumericalAccuracyWarning))
    bv = defect_verdict(bd, threshold, guard)
    rv = defect_verdict(rd, threshold, guard)
    return {
        "berwald_defect": bd,
        "ricci_defect": rd,
        "berwald_verdict": VERDICT_NAMES[bv],
        "ricci_verdict": VERDICT_NAMES[rv],
        "samples": len(pairs),
        "step": step,
        "curvature_step": curvature_step,
        "threshold": threshold,
        "guard": guard,
        "accuracy_warnings": acc,
        "_verdicts": (bv, rv),
    }


def _agreement(berwald: bool, verdicts) -> bool | None:
    if None in verdicts:
        return None
    return verdicts[0] == berwald and verdicts[1] == berwald


def run_oracle(path, samples: int = SAMPLE_COUNT, step: float = DEFAULT_STEP, curvature_step: float = SECOND_ORDER_STEP,
               threshold: float = DEFECT_THRESHOLD, guard: float = DEFECT_GUARD) -> dict:
    t0 = time.perf_counter()
    parsed = _load(path)
    _validated(parsed, parsed.tolerances["validation"])
    crit = _criteria(parsed.datum, parsed.tolerances["criteria"])
    t1 = time.perf_counter()
    try:
        ora = oracle_section(parsed.datum, samples, step, curvature_step, threshold, guard, parsed.chart_radius)
    except ChartDomainError as exc:
        raise _Fail(EXIT_INVALID, f"chart domain: {exc}") from None
    verdicts = ora.pop("_verdicts")
    agree = _agreement(crit["berwald"], verdicts)
    report = {
        "command": "oracle",
        "input": parsed.echo,
        "criteria": {"berwald": crit["berwald"], "ricci_quadratic": crit["ricci_quadratic"]},
        "oracle": ora,
        "agreement": agree,
        "timings": {"criteria_s": t1 - t0, "oracle_s": time.perf_counter() - t1},
    }
    if agree is False:
        raise _Fail(EXIT_INCONSISTENT, "numeric oracle disagrees with the algebraic classification", report)
    return report


def _sweep_case(args) -> dict:
    name, index, u, tol, with_oracle, oracle_kw = args
    entry = catalog_entry(name)
    datum = entry.datum(u)
    case = {"entry": name, "index": index, "u": [float(v) for v in u], "c": datum.c}
    val = validate_datum(datum)
    case["valid"] = val.passed
    try:
        rep = equivalence_check(datum, tol)
        case.update(berwald=rep.berwald, ricci_quadratic=rep.ricci_quadratic, parallel_form=rep.parallel_form, agree=True)
    except InternalConsistencyError as exc:
        case.update(berwald=None, ricci_quadratic=None, parallel_form=None, agree=False, error=str(exc))
    case["expected"] = entry.expected(np.asarray(u))
    case["matches_expected"] = case["berwald"] == case["expected"]
    if with_oracle:
        ora = oracle_section(datum, **oracle_kw)
        verdicts = ora.pop("_verdicts")
        case["oracle"] = ora
        case["oracle_agree"] = None if case["berwald"] is None else _agreement(case["berwald"], verdicts)
    return case


def run_sweep(seed: int = DEFAULT_SEED, count: int = DEFAULT_COUNT, with_oracle: bool = False, jobs: int = 1,
              tol: float = DEFAULT_TOL, oracle_kw: dict | None = None) -> dict:
    t0 = time.perf_counter()
    oracle_kw = oracle_kw or {
        "samples": SAMPLE_COUNT,
        "step": DEFAULT_STEP,
        "curvature_step": SECOND_ORDER_STEP,
        "threshold": DEFECT_THRESHOLD,
        "guard": DEFECT_GUARD,
    }
    tasks = []
    for entry in sorted(catalog_entries(), key=lambda e: e.name):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            us = random_admissible_u(entry, seed, count)
        tasks += [(entry.name, i, u, tol, with_oracle, oracle_kw) for i, u in enumerate(us)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cases = list(pool.map(_sweep_case, tasks))
    else:
        cases = [_sweep_case(t) for t in tasks]
    cases.sort(key=lambda c: (c["entry"], c["index"]))
    summary = {}
    for c in cases:
        s = summary.setdefault(c["entry"], {"cases": 0, "berwald": 0, "agree": 0, "matches_expected": 0})
        s["cases"] += 1
        s["berwald"] += bool(c["berwald"])
        s["agree"] += bool(c["agree"])
        s["matches_expected"] += bool(c["matches_expected"])
        if with_oracle:
            s.setdefault("oracle_agree", 0)
            s.setdefault("oracle_inconclusive", 0)
            s["oracle_agree"] += c["oracle_agree"] is True
            s["oracle_inconclusive"] += c["oracle_agree"] is None
    disagreements = sum(1 for c in cases if not c["agree"] or not c["matches_expected"] or (with_oracle and c["oracle_agree"] is False))
    total = len(cases)
    return {
        "command": "sweep",
        "seed": seed,
        "count": count,
        "oracle": with_oracle,
        "tolerance": tol,
        "cases": cases,
        "summary": summary,
        "total_cases": total,
        "disagreements": disagreements,
        "agreement_rate": 1.0 if total == 0 else (total - disagreements) / total,
        "timings": {"total_s": time.perf_counter() - t0},
    }


def run_catalog() -> dict:
    rows = []
    for e in sorted(catalog_entries(), key=lambda e: e.name):
        rows.append({
            "name": e.name,
            "dim_g": e.space.m,
            "dim_m": e.space.n,
            "fixed_dim": int(e.admissible_basis().shape[1]),
            "berwald_rule": e.rule,
            "description": e.description,
        })
    return {"command": "catalog", "entries": rows}


def run_chart(path, point) -> dict:
    parsed = _load(path)
    _validated(parsed, parsed.tolerances["validation"])
    datum = parsed.datum
    if point.size != datum.n:
        raise _Fail(EXIT_INVALID, f"--point needs {datum.n} coordinates, got {point.size}")
    try:
        a, b = metric_at(datum, point, parsed.chart_radius)
    except ChartDomainError as exc:
        raise _Fail(EXIT_INVALID, f"chart domain: {exc}") from None
    return {
        "command": "chart",
        "input": parsed.echo,
        "point": point.tolist(),
        "a": a.tolist(),
        "b": b.tolist(),
        "beta_length": float(np.sqrt(b @ np.linalg.solve(a, b))),
    }


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="homranders", description="Classify homogeneous Randers spaces (Berwald / Ricci-quadratic).")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def out_opt(sp):
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")

    sp = sub.add_parser("check", help="validate an input file and run the algebraic criteria")
    sp.add_argument("file")
    sp.add_argument("--tol", type=_positive_float, default=None, help=f"criteria tolerance (default from file, else {DEFAULT_TOL:g})")
    out_opt(sp)

    sp = sub.add_parser("oracle", help="numeric Berwald / Ricci defects at the origin")
    sp.add_argument("file")
    sp.add_argument("--samples", type=_positive_int, default=SAMPLE_COUNT, help="number of random sample pairs (axis pairs are always added)")
    sp.add_argument("--step", type=_positive_float, default=DEFAULT_STEP, help="finite-difference step for the spray")
    sp.add_argument("--curvature-step", type=_positive_float, default=SECOND_ORDER_STEP, help="finite-difference step for curvature")
    sp.add_argument("--threshold", type=_positive_float, default=DEFECT_THRESHOLD)
    sp.add_argument("--guard", type=_positive_float, default=DEFECT_GUARD, help="defects between guard and threshold are inconclusive")
    out_opt(sp)

    sp = sub.add_parser("sweep", help="catalog x random admissible u, both tests (and optionally the oracle)")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--count", type=_nonneg_int, default=DEFAULT_COUNT)
    sp.add_argument("--oracle", action="store_true", help="add numeric verification per case (slow)")
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    out_opt(sp)

    sp = sub.add_parser("catalog", help="list built-in spaces or export one as an input file")
    sp.add_argument("--export", metavar="NAME")
    sp.add_argument("--u", type=_point, default=None, help="u for --export (default 0.5 e_n)")

    sp = sub.add_parser("chart", help="print a(x), b(x) at a chart point")
    sp.add_argument("file")
    sp.add_argument("--point", type=_point, required=True, metavar="x1,...,xn")
    out_opt(sp)
    return p


def _emit(report: dict, output: str | None):
    text = dump_report(report)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "catalog":
            if args.export:
                try:
                    entry = catalog_entry(args.export)
                except KeyError as exc:
                    raise _Fail(EXIT_INVALID, str(exc.args[0])) from None
                u = args.u
                if u is None:
                    u = np.zeros(entry.space.n)
                    u[-1] = 0.5
                if u.size != entry.space.n:
                    raise _Fail(EXIT_INVALID, f"--u needs {entry.space.n} components")
                sys.stdout.write(export_input(entry.datum(u), f"{entry.name}: {entry.description}\nBerwald iff {entry.rule}"))
            else:
                for row in run_catalog()["entries"]:
                    print(f"{row['name']:<12} dim_g={row['dim_g']} dim_m={row['dim_m']} fixed={row['fixed_dim']}  Berwald iff {row['berwald_rule']}")
            return EXIT_OK
        if args.command == "check":
            report = run_check(args.file, args.tol)
        elif args.command == "oracle":
            report = run_oracle(args.file, args.samples, args.step, args.curvature_step, args.threshold, args.guard)
        elif args.command == "sweep":
            report = run_sweep(args.seed, args.count, args.oracle, args.jobs, args.tol)
            for name, s in report["summary"].items():
                print(f"{name}: {s['agree']}/{s['cases']} agree, {s['berwald']} Berwald", file=sys.stderr)
            print(f"sweep seed={args.seed} count={args.count}: {report['total_cases'] - report['disagreements']}/{report['total_cases']} agree", file=sys.stderr)
            _emit(report, args.output)
            return EXIT_OK if report["disagreements"] == 0 else EXIT_INCONSISTENT
        else:
            report = run_chart(args.file, args.point)
        _emit(report, args.output)
        return EXIT_OK
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.report is not None:
            _emit(exc.report, getattr(args, "output", None))
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
