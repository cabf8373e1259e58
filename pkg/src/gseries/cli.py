"""Command line front end: series scripts and the saddle/polycycle pipelines.

Exit codes: 0 success, 2 parse/config error, 3 math-domain error,
4 verification failure, 5 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .monoid import DomainError, GeneratorBasis, SeriesError
from .series import INF, GeneralizedSeries, gs_mul, gs_partial_x, gs_partial_y, gs_truncate_gamma
from .textio import format_number, format_series, parse_number, parse_series, series_to_dict
from .transform import (blowup_regular, blowup_singular, gs_comp_inverse, gs_compose,
                        gs_reciprocal, gs_subst_puiseux, gs_translate_y, gs_unit_power)
from .weierstrass import implicit_solve, w_divide, w_prepare

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_VERIFY, EXIT_NUMERIC = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _classify(err: Exception) -> int:
    from .dynamics.transition import IntegrationFailure
    if isinstance(err, CliError):
        return err.code
    if isinstance(err, IntegrationFailure):
        return EXIT_NUMERIC
    if isinstance(err, (DomainError, SeriesError, ZeroDivisionError, ArithmeticError)):
        return EXIT_DOMAIN if not isinstance(err, FloatingPointError) else EXIT_NUMERIC
    if isinstance(err, (ValueError, KeyError, TypeError, yaml.YAMLError)):
        return EXIT_PARSE
    return EXIT_NUMERIC


# ---------------------------------------------------------------------------
# series scripts

@dataclass
class ScriptState:
    basis: GeneratorBasis
    m: int
    n: int
    cap: object = INF
    values: dict = field(default_factory=dict)


def _split_statements(text: str):
    """``(line, column, statement)`` for every non-empty statement."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        col = 0
        for piece in line.split(";"):
            stripped = piece.strip()
            if stripped:
                yield lineno, col + piece.index(stripped[0]) + 1, stripped
            col += len(piece) + 1


def _infer_shape(text: str) -> tuple[int, int]:
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    xs = [int(i) if i else 1 for i in re.findall(r"\bX(\d*)", body)]
    ys = [int(i) if i else 1 for i in re.findall(r"\bY(\d*)", body)]
    return max(xs, default=1), max(ys, default=0)


def _num(tok: str):
    v = parse_number(tok)
    return v


def _series_arg(state: ScriptState, tok: str) -> GeneralizedSeries:
    if tok not in state.values or not isinstance(state.values[tok], GeneralizedSeries):
        raise KeyError(f"unknown series {tok!r}")
    return state.values[tok]


def _exp(state: ScriptState, F: GeneralizedSeries, tok: str):
    return F.basis.from_value(_num(tok))


def _op_table():
    def one(fn):
        return lambda st, a: (fn(st, *a),)

    return {
        "add": one(lambda st, a, b: _series_arg(st, a) + _series_arg(st, b)),
        "sub": one(lambda st, a, b: _series_arg(st, a) - _series_arg(st, b)),
        "mul": one(lambda st, a, b: gs_mul(_series_arg(st, a), _series_arg(st, b))),
        "neg": one(lambda st, a: -_series_arg(st, a)),
        "scale": one(lambda st, a, c: _series_arg(st, a) * _num(c)),
        "truncate": one(lambda st, a, c: _series_arg(st, a).truncate(_num(c))),
        "truncate_gamma": one(lambda st, a, *g: gs_truncate_gamma(
            _series_arg(st, a), [_exp(st, _series_arg(st, a), t) for t in g])),
        "partial_x": one(lambda st, a, i: gs_partial_x(_series_arg(st, a), int(i) - 1)),
        "partial_y": one(lambda st, a, j: gs_partial_y(_series_arg(st, a), int(j) - 1)),
        "compose": one(lambda st, a, *gs: gs_compose(_series_arg(st, a),
                                                     [_series_arg(st, g) for g in gs])),
        "reciprocal": one(lambda st, a: gs_reciprocal(_series_arg(st, a))),
        "power": one(lambda st, a, e: gs_unit_power(_series_arg(st, a), _num(e))),
        "blowup_singular": one(lambda st, a, rho, i, j: blowup_singular(
            _series_arg(st, a), _num(rho), int(i) - 1, int(j) - 1)),
        "blowup_regular": one(lambda st, a, rho, lam, *cap: blowup_regular(
            _series_arg(st, a), _num(rho), _num(lam), _num(cap[0]) if cap else None)),
        "subst_puiseux": one(lambda st, a, g, slot, *cap: gs_subst_puiseux(
            _series_arg(st, a), _series_arg(st, g), int(slot) - 1,
            _num(cap[0]) if cap else None)),
        "inverse": one(lambda st, a, cap: gs_comp_inverse(_series_arg(st, a), _num(cap))),
        "translate_y": one(lambda st, a, lam: gs_translate_y(_series_arg(st, a), _num(lam))),
        "implicit_solve": one(lambda st, a: implicit_solve(_series_arg(st, a))),
        "order": one(lambda st, a: _series_arg(st, a).order()),
        "w_prepare": lambda st, a: w_prepare(_series_arg(st, a[0]),
                                             _num(a[1]) if len(a) > 1 else None),
        "w_divide": lambda st, a: w_divide(_series_arg(st, a[0]), _series_arg(st, a[1]),
                                           cap=_num(a[2]) if len(a) > 2 else None),
    }


OPS = _op_table()


def _parse_basis(spec: str) -> GeneratorBasis:
    names, gens = [], []
    for part in spec.split(","):
        if "=" not in part:
            raise ValueError(f"basis entries look like 'r = sqrt(2)', got {part!r}")
        name, value = (s.strip() for s in part.split("=", 1))
        names.append(name)
        gens.append(parse_number(value))
    return GeneratorBasis([1] + gens, ["1"] + names)


def format_value(value) -> str:
    if isinstance(value, GeneralizedSeries):
        text = format_series(value)
        return text if value.cap == INF else f"{text} @ {format_number(value.cap)}"
    return format_number(value)


def _literal(state: ScriptState, text: str) -> GeneralizedSeries:
    cap = state.cap
    if "@" in text:
        text, cap_text = text.rsplit("@", 1)
        cap = _num(cap_text)
    return parse_series(text, state.basis, state.m, state.n, cap)


def cmd_series(script: str, cap=None, basis: GeneratorBasis | None = None) -> list[str]:
    """Run a script; returns the printed lines or raises :class:`CliError`."""
    m, n = _infer_shape(script)
    state = ScriptState(basis or GeneratorBasis([1, parse_number("sqrt(2)")], ["1", "r"]),
                        m, n, INF if cap is None else cap)
    out: list[str] = []
    for lineno, col, stmt in _split_statements(script):
        where = f"line {lineno}, column {col}"
        head = stmt.split(None, 1)
        try:
            if head[0] == "basis":
                state.basis = _parse_basis(head[1] if len(head) > 1 else "")
                continue
            if head[0] == "shape":
                state.m, state.n = (int(v) for v in head[1].split())
                continue
            if head[0] == "cap":
                state.cap = _num(head[1])
                continue
        except (ValueError, IndexError, KeyError) as err:
            raise CliError(EXIT_PARSE, f"{where}: {err}") from err
        if "=" not in stmt:
            raise CliError(EXIT_PARSE, f"{where}: expected 'NAME = ...'")
        lhs, rhs = stmt.split("=", 1)
        names = [s.strip() for s in lhs.split(",")]
        if not all(re.fullmatch(r"[A-Za-z_]\w*", s) for s in names):
            raise CliError(EXIT_PARSE, f"{where}: bad target {lhs.strip()!r}")
        tokens = rhs.split()
        rhs_col = col + stmt.index("=") + 1 + (len(rhs) - len(rhs.lstrip()))
        if tokens and tokens[0] in OPS:
            op = tokens[0]
            try:
                result = OPS[op](state, tokens[1:])
            except (KeyError, TypeError, ValueError) as err:
                if isinstance(err, (SeriesError, ArithmeticError)):
                    raise CliError(EXIT_DOMAIN, f"{where}: {op}: {err}") from err
                raise CliError(EXIT_PARSE, f"{where}: {op}: {err}") from err
            except (SeriesError, ArithmeticError) as err:
                raise CliError(EXIT_DOMAIN, f"{where}: {op}: {err}") from err
        else:
            try:
                result = (_literal(state, rhs),)
            except (ValueError, KeyError) as err:
                raise CliError(EXIT_PARSE, f"line {lineno}, column {rhs_col}: {err}") from err
            except SeriesError as err:
                raise CliError(EXIT_DOMAIN, f"line {lineno}, column {rhs_col}: {err}") from err
        if len(result) != len(names):
            raise CliError(EXIT_PARSE, f"{where}: {len(result)} result(s) for {len(names)} name(s)")
        for name, value in zip(names, result):
            state.values[name] = value
            out.append(f"{name} = {format_value(value)}")
    return out


# ---------------------------------------------------------------------------
# field and polycycle configs

_MONO = re.compile(r"^\s*(?:(x|y)(?:\^(\d+))?)\s*(?:\*\s*(x|y)(?:\^(\d+))?)?\s*$")


def parse_monomial(key) -> tuple[int, int]:
    if isinstance(key, (list, tuple)):
        return int(key[0]), int(key[1])
    text = str(key).replace("**", "^")
    mt = _MONO.match(text)
    if not mt:
        raise ValueError(f"bad monomial {key!r}; use forms like 'x^2*y'")
    powers = {"x": 0, "y": 0}
    for var, exp in ((mt.group(1), mt.group(2)), (mt.group(3), mt.group(4))):
        if var:
            powers[var] += int(exp) if exp else 1
    return powers["x"], powers["y"]


def parse_coefficient(value, params: list[str]):
    from .dynamics.mupoly import MuPoly
    from .textio import sympy_to_number
    import sympy

    p = len(params)
    if isinstance(value, bool):
        raise ValueError("boolean coefficient")
    if isinstance(value, int):
        return MuPoly.const(value, p)
    if isinstance(value, float):
        return MuPoly.const(int(value) if value.is_integer() else value, p)
    syms = tuple(sympy.Symbol(name) for name in params)
    expr = sympy.sympify(str(value).replace("^", "**"), locals=dict(zip(params, syms)),
                         rational=True)
    if not params:
        return MuPoly.const(sympy_to_number(expr, value), 0)
    poly = sympy.Poly(expr, *syms)
    return MuPoly({mono: sympy_to_number(c, value) for mono, c in poly.terms()}, p)


def build_field(spec: dict):
    from .dynamics import PlanarAnalyticField

    params = list(spec.get("parameters", []))
    comps = []
    for name in ("P", "Q"):
        comp = spec.get(name)
        if not isinstance(comp, dict):
            raise ValueError(f"field component {name} must be a mapping monomial -> coefficient")
        comps.append({parse_monomial(k): parse_coefficient(v, params) for k, v in comp.items()})
    return PlanarAnalyticField(comps[0], comps[1], len(params))


def build_sections(spec: dict | None):
    from .dynamics import SectionPair

    spec = spec or {}
    return SectionPair(float(spec.get("x0", 1.0)), float(spec.get("y0", 1.0)),
                       float(spec.get("eps", 0.5)))


def _mu_list(cfg: dict, override) -> list[tuple]:
    if override:
        return [tuple(float(v) for v in item.split(",")) if item else () for item in override]
    raw = cfg.get("mu")
    if raw is None:
        return [()]
    out = []
    for item in raw:
        out.append(tuple(float(v) for v in (item if isinstance(item, (list, tuple)) else [item])))
    return out or [()]


def _parse_grid(cfg: dict, override):
    from .dynamics import default_grid

    g = dict(cfg.get("grid") or {})
    if override:
        parts = override.split(":")
        if len(parts) == 1:
            g["per_decade"] = int(parts[0])
        elif len(parts) == 3:
            g.update(lo=float(parts[0]), hi=float(parts[1]), per_decade=int(parts[2]))
        else:
            raise ValueError("--grid takes PER_DECADE or LO:HI:PER_DECADE")
    return default_grid(float(g.get("lo", 1e-3)), float(g.get("hi", 1e-1)),
                        int(g.get("per_decade", 40)))


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _suffix(k: int, count: int) -> str:
    return "" if count == 1 else f"_mu{k}"


def _expansion_record(exp, mu) -> dict:
    return {
        "mu": list(mu),
        "text": format_series(exp.series),
        "certified_order": float(exp.nu),
        "N": exp.N,
        "ratio": format_number(exp.ratio),
        "terms": [{"exponent": str(e), "exponent_value": float(e),
                   "coefficient": format_number(c), "certified": float(e) <= float(exp.nu) + 1e-12}
                  for e, c in exp.terms()],
        "series": series_to_dict(exp.series),
    }


def cmd_dulac(cfg: dict, out: Path, order=None, nu=None, tol=None, grid=None, mu=None) -> dict:
    from .dynamics import (analyze_saddle, dulac_series, verify_asymptotics)

    field_ = _stage("config", build_field, cfg["field"])
    sections = _stage("config", build_sections, cfg.get("sections"))
    saddle = _stage("analyze_saddle", analyze_saddle, field_, float(cfg.get("tolerance", 1e-9)))
    nu = float(nu if nu is not None else cfg.get("nu", 0) or 0) or None
    N = order or cfg.get("order")
    if N is None:
        per = 1 + min(float(saddle.ratio), 1.0)
        N = max(1, math.ceil((nu or float(saddle.ratio)) / per - 1e-12))
    N = int(N)
    if nu is None:
        nu = float(saddle.certified_order(N))
    tol = float(tol if tol is not None else cfg.get("tol", 1e-13))
    tgrid = _parse_grid(cfg, grid)
    mus = _mu_list(cfg, mu)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    for k, m in enumerate(mus):
        exp = _stage("dulac_series", dulac_series, saddle, N, sections, m, nu=nu,
                     chart_degree=cfg.get("chart_degree"))
        rep = _stage("verify_asymptotics", verify_asymptotics, saddle, exp, nu, tgrid, tol,
                     sections, cfg.get("margin"), m)
        sfx = _suffix(k, len(mus))
        (out / f"dulac_expansion{sfx}.json").write_text(
            json.dumps(_expansion_record(exp, m), indent=2))
        write_csv(out / f"dulac_verification{sfx}.csv",
                  ["t", "numeric", "series", "residual"], rep.rows())
        summary = dict(rep.summary(), mu=list(m), N=N, expansion=format_series(exp.series))
        reports.append(summary)
    record = {"command": "dulac", "reports": reports,
              "passed": all(r["passed"] for r in reports)}
    (out / "dulac_summary.json").write_text(json.dumps(record, indent=2))
    return record


def build_polycycle(cfg: dict, tol: float):
    from .dynamics import CornerMap, PolycycleSpec, analyze_saddle

    vertices = []
    for i, v in enumerate(cfg["vertices"]):
        try:
            saddle = analyze_saddle(build_field(v["field"]), float(v.get("tolerance", 1e-9)))
        except (DomainError, ValueError) as err:
            raise type(err)(f"vertex {i + 1}: {err}") from err
        vertices.append((saddle, build_sections(v.get("sections"))))
    maps = []
    for spec in cfg.get("corner_maps") or [{"coeffs": [1]}] * len(vertices):
        coeffs = [parse_coefficient(c, []).constant() for c in spec["coeffs"]]
        radius = float(spec.get("radius", math.inf))
        maps.append(CornerMap(tuple(coeffs), radius, spec.get("bound")))
    return PolycycleSpec(vertices, maps, tol)


def cmd_poincare(cfg: dict, out: Path, nu=None, tol=None, grid=None, mu=None) -> dict:
    from .dynamics import count_fixed_points, poincare_map, poincare_series

    tol = float(tol if tol is not None else cfg.get("tol", 1e-12))
    poly = _stage("config", build_polycycle, cfg, tol)
    nu = float(nu if nu is not None else cfg.get("nu", 3))
    lo, hi = (float(v) for v in cfg.get("interval", [0.01, 0.9]))
    resolution = int(cfg.get("resolution", 200))
    table = np.geomspace(lo, hi, int(cfg.get("table_points", 41)))
    if grid:
        table = np.geomspace(lo, hi, int(grid.split(":")[-1]))
    mus = _mu_list(cfg, mu)
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    for k, m in enumerate(mus):
        series = _stage("poincare_series", poincare_series, poly, nu, m)

        def P(t, m=m):
            return poincare_map(poly, t, mu=m)
        fp = _stage("count_fixed_points", count_fixed_points, P, (lo, hi), resolution, tol,
                    cfg.get("noise_floor"))
        values = [P(t) for t in table]
        sval = [float(series.evaluate((t,))) for t in table]
        sfx = _suffix(k, len(mus))
        write_csv(out / f"poincare_table{sfx}.csv", ["t", "P", "series", "delta"],
                  [(t, p, s, p - t) for t, p, s in zip(table, values, sval)])
        lead = series.sorted_terms()[0][0][0][0] if not series.is_zero() else None
        (out / f"poincare_series{sfx}.json").write_text(
            json.dumps({"mu": list(m), "text": format_series(series),
                        "leading_exponent": None if lead is None else str(lead),
                        "leading_exponent_value": None if lead is None else float(lead),
                        "series": series_to_dict(series)}, indent=2))
        rep = dict(fp.summary(), mu=list(m), series=format_series(series),
                   leading_exponent=None if lead is None else str(lead),
                   leading_exponent_value=None if lead is None else float(lead),
                   all_indeterminate=fp.all_indeterminate)
        reports.append(rep)
    record = {"command": "poincare", "reports": reports}
    (out / "poincare_fixed_points.json").write_text(json.dumps(record, indent=2))
    return record


# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gseries", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("series", help="run a series script")
    s.add_argument("script", help="script file, or - for stdin")
    s.add_argument("--cap", help="default cap for literals")
    for name in ("dulac", "poincare"):
        p = sub.add_parser(name, help=f"run the {name} pipeline on a YAML config")
        p.add_argument("config")
        p.add_argument("--order", type=int, help="normalisation order N")
        p.add_argument("--nu", type=float, help="verification / series order")
        p.add_argument("--tol", type=float, help="integration tolerance")
        p.add_argument("--grid", help="PER_DECADE or LO:HI:PER_DECADE")
        p.add_argument("--mu", action="append", help="comma-separated parameter values")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--cap", help=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "series":
            text = sys.stdin.read() if args.script == "-" else Path(args.script).read_text()
            cap = parse_number(args.cap) if args.cap else None
            for line in cmd_series(text, cap):
                print(line)
            return EXIT_OK
        try:
            cfg = yaml.safe_load(Path(args.config).read_text()) or {}
        except (OSError, yaml.YAMLError) as err:
            raise CliError(EXIT_PARSE, f"config: {err}") from err
        if args.command == "dulac":
            record = _staged(cmd_dulac, cfg, Path(args.out), args.order, args.nu, args.tol,
                             args.grid, args.mu)
            print(json.dumps(record, indent=2))
            return EXIT_OK if record["passed"] else EXIT_VERIFY
        record = _staged(cmd_poincare, cfg, Path(args.out), args.nu, args.tol, args.grid,
                         args.mu)
        print(json.dumps(record, indent=2))
        return EXIT_OK
    except Exception as err:  # noqa: BLE001 - mapped to exit codes
        code = _classify(err)
        stage = getattr(err, "stage", None)
        label = f"[{stage}] " if stage else ""
        print(f"error: {label}{type(err).__name__}: {err}", file=sys.stderr)
        return code


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as err:
        if not hasattr(err, "stage"):
            err.stage = name
        raise


def _staged(fn, cfg, *args):
    try:
        return fn(cfg, *args)
    except KeyError as err:
        raise CliError(EXIT_PARSE, f"config is missing {err}") from err


if __name__ == "__main__":
    sys.exit(main())
