"""Input files and reports.

Input is YAML (so plain JSON works too)::

    dim_g: 3
    dim_m: 3
    brackets:
      - {a: 1, b: 2, coeffs: {3: 1.0}}
    u: [0, 0, 0.5]
    # optional
    chart_radius: 0.5
    tolerances: {criteria: 1.0e-9, validation: 1.0e-12}
    inner_product: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

Indices are 1-based.  Only brackets with ``a < b`` may be listed; the
antisymmetric completion is automatic.  ``inner_product`` is the Gram matrix
of the first ``dim_m`` basis vectors; when present the basis is
orthonormalised and ``u`` is rewritten in the new basis.

Reports are JSON with sorted keys, so equal reports are byte-identical.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from .chart import CHART_RADIUS
from .criteria import DEFAULT_TOL
from .errors import InputFormatError
from .liealg import JACOBI_TOL, LieAlgebra, RandersDatum, ReductiveSpace, orthonormalize

SCHEMA_VERSION = 1
TOLERANCE_DEFAULTS = {"criteria": DEFAULT_TOL, "validation": JACOBI_TOL}
_KNOWN = {"dim_g", "dim_m", "brackets", "u", "chart_radius", "tolerances", "inner_product"}


@dataclass
class ParsedInput:
    datum: RandersDatum
    chart_radius: float = CHART_RADIUS
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCE_DEFAULTS))
    echo: dict = field(default_factory=dict)


def _line_map(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            out[path + (k.value,)] = k.start_mark.line + 1
            _line_map(v, path + (k.value,), out)
            out[path + (k.value,)] = k.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_map(v, path + (i,), out)
    return out


class _Reader:
    def __init__(self, lines: dict):
        self.lines = lines

    def fail(self, msg: str, *path):
        key = tuple(str(p) if not isinstance(p, int) else p for p in path)
        line = None
        while key and line is None:
            line = self.lines.get(key)
            key = key[:-1]
        name = ".".join(str(p) for p in path) if path else None
        raise InputFormatError(msg, line=line, field=name)

    def integer(self, value, *path) -> int:
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            self.fail(f"expected an integer, got {value!r}", *path)
        try:
            return int(value)
        except ValueError:
            self.fail(f"expected an integer, got {value!r}", *path)

    def real(self, value, *path) -> float:
        if isinstance(value, bool):
            self.fail(f"expected a number, got {value!r}", *path)
        try:
            out = float(value)
        except (TypeError, ValueError):
            self.fail(f"expected a number, got {value!r}", *path)
        if not math.isfinite(out):
            self.fail(f"expected a finite number, got {value!r}", *path)
        return out


def parse_input(text: str) -> ParsedInput:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise InputFormatError(f"not valid YAML/JSON: {getattr(exc, 'problem', exc)}", line=None if mark is None else mark.line + 1) from exc
    if not isinstance(raw, dict):
        raise InputFormatError("top level must be a mapping")
    rd = _Reader(_line_map(node))
    for key in raw:
        if key not in _KNOWN:
            rd.fail(f"unknown field {key!r}", key)
    for key in ("dim_g", "dim_m", "brackets", "u"):
        if key not in raw:
            raise InputFormatError("missing required field", field=key)

    dim_g = rd.integer(raw["dim_g"], "dim_g")
    dim_m = rd.integer(raw["dim_m"], "dim_m")
    if dim_g < 1:
        rd.fail("dim_g must be positive", "dim_g")
    if not 1 <= dim_m <= dim_g:
        rd.fail(f"dim_m must lie in 1..dim_g = {dim_g}", "dim_m")

    brackets = raw["brackets"]
    if brackets is None:
        brackets = []
    if not isinstance(brackets, list):
        rd.fail("brackets must be a list", "brackets")
    table: dict = {}
    for i, br in enumerate(brackets):
        if not isinstance(br, dict):
            rd.fail("bracket entry must be a mapping with a, b, coeffs", "brackets", i)
        for key in ("a", "b", "coeffs"):
            if key not in br:
                rd.fail(f"bracket entry lacks {key!r}", "brackets", i)
        a = rd.integer(br["a"], "brackets", i, "a")
        b = rd.integer(br["b"], "brackets", i, "b")
        for name, idx in (("a", a), ("b", b)):
            if not 1 <= idx <= dim_g:
                rd.fail(f"index {idx} outside 1..{dim_g}", "brackets", i, name)
        if a >= b:
            rd.fail(f"bracket [{a}, {b}] must be listed with a < b", "brackets", i, "a")
        if (a, b) in table:
            rd.fail(f"bracket [{a}, {b}] listed twice", "brackets", i)
        coeffs = br["coeffs"]
        if not isinstance(coeffs, dict):
            rd.fail("coeffs must map index -> value", "brackets", i, "coeffs")
        row = {}
        for k, v in coeffs.items():
            c = rd.integer(k, "brackets", i, "coeffs", k)
            if not 1 <= c <= dim_g:
                rd.fail(f"index {c} outside 1..{dim_g}", "brackets", i, "coeffs", k)
            row[c] = rd.real(v, "brackets", i, "coeffs", k)
        table[(a, b)] = row

    u_raw = raw["u"]
    if not isinstance(u_raw, list) or len(u_raw) != dim_m:
        rd.fail(f"u must be a list of {dim_m} numbers", "u")
    u = np.array([rd.real(v, "u", i) for i, v in enumerate(u_raw)])

    radius = CHART_RADIUS
    if "chart_radius" in raw:
        radius = rd.real(raw["chart_radius"], "chart_radius")
        if radius <= 0:
            rd.fail("chart_radius must be positive", "chart_radius")

    tols = dict(TOLERANCE_DEFAULTS)
    if "tolerances" in raw:
        tt = raw["tolerances"]
        if not isinstance(tt, dict):
            rd.fail("tolerances must be a mapping", "tolerances")
        for k, v in tt.items():
            if k not in TOLERANCE_DEFAULTS:
                rd.fail(f"unknown tolerance {k!r}; known: {sorted(TOLERANCE_DEFAULTS)}", "tolerances", k)
            tols[k] = rd.real(v, "tolerances", k)
            if tols[k] <= 0:
                rd.fail("tolerance must be positive", "tolerances", k)

    C = LieAlgebra.from_brackets(dim_g, table).C
    if "inner_product" in raw:
        gram = raw["inner_product"]
        ok = isinstance(gram, list) and len(gram) == dim_m and all(isinstance(r, list) and len(r) == dim_m for r in gram)
        if not ok:
            rd.fail(f"inner_product must be a {dim_m}x{dim_m} matrix", "inner_product")
        G = np.array([[rd.real(v, "inner_product", i, j) for j, v in enumerate(r)] for i, r in enumerate(gram)])
        if not np.allclose(G, G.T, rtol=0, atol=1e-12) or np.linalg.eigvalsh(G)[0] <= 0:
            rd.fail("inner_product must be symmetric positive definite", "inner_product")
        C, L = orthonormalize(C, dim_m, G)
        u = np.linalg.solve(L, u)

    datum = RandersDatum(ReductiveSpace(LieAlgebra(C), dim_m), u)
    echo = {
        "dim_g": dim_g,
        "dim_m": dim_m,
        "brackets": [{"a": a, "b": b, "coeffs": {str(k): v for k, v in sorted(row.items())}} for (a, b), row in sorted(table.items())],
        "u": [float(v) for v in raw["u"]],
        "chart_radius": radius,
        "tolerances": tols,
    }
    if "inner_product" in raw:
        echo["inner_product"] = [[float(v) for v in r] for r in raw["inner_product"]]
    return ParsedInput(datum=datum, chart_radius=radius, tolerances=tols, echo=echo)


def load_input(path) -> ParsedInput:
    with open(path, encoding="utf-8") as fh:
        return parse_input(fh.read())


def export_input(datum: RandersDatum, comment: str | None = None) -> str:
    """Input-file text for a datum (structure constants from the stored basis)."""
    brackets = [
        {"a": a, "b": b, "coeffs": {int(k): _num(v) for k, v in sorted(row.items())}}
        for (a, b), row in sorted(datum.space.algebra.brackets().items())
    ]
    doc = {
        "dim_g": datum.space.m,
        "dim_m": datum.n,
        "brackets": brackets,
        "u": [_num(v) for v in datum.u],
    }
    head = "".join(f"# {line}\n" for line in comment.splitlines()) if comment else ""
    return head + yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def _num(v):
    v = float(v)
    return int(v) if v.is_integer() else v


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        return v
    return obj


def dump_report(report: dict) -> str:
    body = dict(_plain(report))
    body["schema_version"] = SCHEMA_VERSION
    return json.dumps(body, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_report(text: str) -> dict:
    return json.loads(text)


def strip_timings(report: dict) -> dict:
    """Copy of a report without the ``timings`` entries (outside the determinism contract)."""
    if isinstance(report, dict):
        return {k: strip_timings(v) for k, v in report.items() if k != "timings"}
    if isinstance(report, list):
        return [strip_timings(v) for v in report]
    return report
