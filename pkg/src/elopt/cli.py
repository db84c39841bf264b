"""Command-line pipeline: configuration in, reports and plot data out.

Config document (JSON, schema version 1; unknown keys are rejected)::

    {
      "schema": 1,
      "surface": {"kind": "hyperplane", "c": [1.0, 2.0], "M": 1.0}
               | {"kind": "curve", "family": "line" | "quadratic" | "hyperbola",
                  "a": 1.0, "b": 1.0, "shape": "auto" | "linear" |
                  "strictly_convex" | "strictly_concave",
                  "params": {}            # line
                          | {"c2": 0.5}   # quadratic
                          | {"s": 1.0, "t": 1.0}},  # hyperbola
      "seed": 0,                  # optional
      "samples": 10000,           # optional, property-suite pairs
      "surface_samples": 1000,    # optional, feasibility points
      "grid": [16, 32],           # optional, LP sizes
      "construction": "auto"      # optional: auto | linear_opt | convex_plateau
                                  #           | convex_diag | concave_step
    }

Subcommands: ``validate`` (surface report), ``bound`` (normal-ratio lower
bound), ``construct`` (build the matching constructions, print cost and
total cost, write each expression document), ``check`` (property suite +
feasibility of a construction or of ``--expr FILE``), ``lp`` (grid-LP sweep
over the configured sizes), ``report`` (full bound/construction/LP bracket),
``sample`` (CSV grid ``x,y,f,fx_left,fx_right,fy_left,fy_right`` for
plotting).

Flags ``--seed``, ``--samples``, ``--grid`` override the config; ``--out``
picks the artifact directory; ``--format json|text`` switches report
rendering.  All output is byte-reproducible for a fixed config and seed.

Report documents are JSON objects with a ``"type"`` tag naming the report
dataclass (``ELReport``, ``FeasibilityReport``, ``BoundReport``,
``SurfaceValidationReport``, ...) and one field per dataclass field, floats
in shortest round-trip form, NaN/inf as the strings "nan"/"inf".

Exit codes: 0 success; 2 configuration error; 3 surface validation failure;
4 property-suite or feasibility failure; 5 LP solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import (
    DEFAULT_PAIR_SAMPLES,
    DEFAULT_SURFACE_SAMPLES,
    check_el,
    check_feasible,
    gap_report,
    normal_ratio_bound,
)
from .constructions import (
    ConstructionResult,
    concave_construct,
    convex_diag,
    convex_plateau,
    linear_opt,
    linear_opt_curve,
)
from .errors import ConfigError, ConstructionError, EloptError, ShapeError, SolverError
from .exprs import ELExpr, cost_total, eval_at, one_sided_partials
from .lp_oracle import build_lp, dump_lp, solve_lp
from .serialize import dumps, expr_from_dict, expr_to_dict, surface_from_dict
from .surfaces import SHAPE_CONVEX, SHAPE_LINEAR, Hyperplane, Surface

__all__ = ["main"]

_KNOWN_KEYS = {"schema", "surface", "seed", "samples", "surface_samples", "grid", "construction"}
_CONSTRUCTION_NAMES = ("auto", "linear_opt", "convex_plateau", "convex_diag", "concave_step")


@dataclass
class _Job:
    surface: Surface
    seed: int
    samples: int
    surface_samples: int
    grid: tuple[int, ...]
    construction: str
    out: Path
    fmt: str


def _load_job(args) -> _Job:
    if args.config is None:
        raise ConfigError("--config PATH is required")
    try:
        doc = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if doc.get("schema") != 1:
        raise ConfigError("config must declare \"schema\": 1")
    if "surface" not in doc:
        raise ConfigError("config needs a \"surface\" entry")
    surface = surface_from_dict(doc["surface"])
    construction = doc.get("construction", "auto")
    if construction not in _CONSTRUCTION_NAMES:
        raise ConfigError(f"unknown construction {construction!r}")
    grid = doc.get("grid", [16, 32])
    if args.grid is not None:
        grid = args.grid
    try:
        grid = tuple(int(m) for m in grid)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"grid must be a list of integers: {exc}") from exc
    seed = int(args.seed if args.seed is not None else doc.get("seed", 0))
    samples = int(args.samples if args.samples is not None else doc.get("samples", DEFAULT_PAIR_SAMPLES))
    surface_samples = int(doc.get("surface_samples", DEFAULT_SURFACE_SAMPLES))
    return _Job(
        surface=surface,
        seed=seed,
        samples=samples,
        surface_samples=surface_samples,
        grid=grid,
        construction=construction,
        out=Path(args.out),
        fmt=args.format,
    )


def _emit(job: _Job, obj, text_lines: list[str]) -> None:
    if job.fmt == "json":
        sys.stdout.write(dumps(obj))
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def _require_valid_surface(job: _Job) -> Optional[int]:
    report = job.surface.validate()
    if not report.valid:
        sys.stderr.write("surface validation failed:\n")
        for clause in report.violations:
            sys.stderr.write(f"  - {clause}\n")
        return 3
    return None


def _box(surface: Surface) -> tuple[float, ...]:
    if isinstance(surface, Hyperplane):
        return tuple(1.5 * v for v in surface.intercepts())
    return (1.5 * surface.a, 1.5 * surface.b)


def _build_constructions(job: _Job) -> list[ConstructionResult]:
    surface = job.surface
    name = job.construction
    if isinstance(surface, Hyperplane):
        if name not in ("auto", "linear_opt"):
            raise ConfigError(f"construction {name!r} needs a curve surface")
        return [linear_opt(surface)]
    if name == "auto":
        if surface.shape == SHAPE_LINEAR:
            return [linear_opt_curve(surface)]
        if surface.shape == SHAPE_CONVEX:
            results = [convex_plateau(surface)]
            try:
                results.append(convex_diag(surface))
            except ConstructionError:
                pass  # no seam point: only the plateau fallback applies
            return results
        return [concave_construct(surface)]
    builders = {
        "linear_opt": linear_opt_curve,
        "convex_plateau": convex_plateau,
        "convex_diag": convex_diag,
        "concave_step": concave_construct,
    }
    return [builders[name](surface)]


def _total_or_none(expr: ELExpr) -> Optional[float]:
    try:
        return cost_total(expr)
    except EloptError:
        return None


def _cmd_validate(args) -> int:
    job = _load_job(args)
    report = job.surface.validate()
    lines = [f"kind: {report.kind}", f"valid: {report.valid}"]
    if report.slope_range is not None:
        lines.append(f"slope_range: [{report.slope_range[0]!r}, {report.slope_range[1]!r}]")
    if report.shape is not None:
        lines.append(f"shape: {report.shape}")
    if report.normal is not None:
        lines.append(f"normal: {list(report.normal)}")
    for clause in report.violations:
        lines.append(f"violation: {clause}")
    _emit(job, report, lines)
    return 0 if report.valid else 3


def _cmd_bound(args) -> int:
    job = _load_job(args)
    failed = _require_valid_surface(job)
    if failed:
        return failed
    bound = normal_ratio_bound(job.surface)
    _emit(
        job,
        bound,
        [
            f"normal_ratio_bound: {bound.value!r}",
            f"witness_point: {list(bound.point)}",
            f"ratio: normal[{bound.j}] / normal[{bound.i}] (supremum over the surface closure)",
        ],
    )
    return 0


def _cmd_construct(args) -> int:
    job = _load_job(args)
    failed = _require_valid_surface(job)
    if failed:
        return failed
    job.out.mkdir(parents=True, exist_ok=True)
    results = _build_constructions(job)
    payload = []
    lines = []
    for res in results:
        total = _total_or_none(res.expr)
        path = job.out / f"{res.kind}.expr.json"
        path.write_text(dumps(expr_to_dict(res.expr)))
        payload.append(
            {
                "kind": res.kind,
                "cost": res.claimed_cost,
                "cost_total": total,
                "scale_k": res.scale_k,
                "expr_file": path.name,
            }
        )
        lines.append(
            f"{res.kind}: cost {res.claimed_cost!r}, cost_total "
            f"{'unbounded' if total is None else repr(total)}, scale {res.scale_k!r} -> {path}"
        )
    _emit(job, {"constructions": payload}, lines)
    return 0


def _load_expr(job: _Job, expr_path: Optional[str]) -> ELExpr:
    if expr_path is None:
        return _build_constructions(job)[0].expr
    try:
        doc = json.loads(Path(expr_path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read expression file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"expression file is not valid JSON: {exc}") from exc
    return expr_from_dict(doc)


def _cmd_check(args) -> int:
    job = _load_job(args)
    failed = _require_valid_surface(job)
    if failed:
        return failed
    expr = _load_expr(job, args.expr)
    el = check_el(expr, _box(job.surface), samples=job.samples, seed=job.seed)
    feas = check_feasible(expr, job.surface, samples=job.surface_samples, seed=job.seed)
    lines = [f"el_suite: {'pass' if el.passed else 'FAIL'}"]
    for prop in el.properties:
        lines.append(
            f"  {prop.name}: {'pass' if prop.passed else 'FAIL'} "
            f"(worst {prop.worst_violation!r}, tol {prop.tolerance!r})"
        )
    lines.append(
        f"feasibility: {'pass' if feas.feasible else 'FAIL'} (min_jump {feas.min_jump!r} "
        f"at coordinate {feas.witness_coord} of {list(feas.witness_point)})"
    )
    _emit(job, {"el_report": el, "feasibility": feas}, lines)
    return 0 if el.passed and feas.feasible else 4


def _cmd_lp(args) -> int:
    job = _load_job(args)
    failed = _require_valid_surface(job)
    if failed:
        return failed
    rows = []
    lines = []
    for m in job.grid:
        lp = build_lp(job.surface, m)
        sol = solve_lp(lp)
        if sol.status != "optimal":
            raise SolverError(f"LP status {sol.status} at m={m}")
        rows.append({"m": m, "value": sol.value, "crossing_rows": lp.crossing_rows,
                     "iterations": sol.iterations})
        lines.append(f"m={m}: lp_value {sol.value!r} ({lp.crossing_rows} crossing rows)")
        if args.dump_lp:
            job.out.mkdir(parents=True, exist_ok=True)
            path = job.out / f"grid_lp_m{m}.lp"
            with path.open("w") as stream:
                dump_lp(lp, stream)
            lines.append(f"  wrote {path}")
    _emit(job, {"lp": rows}, lines)
    return 0


def _cmd_report(args) -> int:
    job = _load_job(args)
    failed = _require_valid_surface(job)
    if failed:
        return failed
    two_dim = not isinstance(job.surface, Hyperplane) or job.surface.dim == 2
    report = gap_report(job.surface, grid_m=job.grid if two_dim else None)
    job.out.mkdir(parents=True, exist_ok=True)
    path = job.out / "report.json"
    path.write_text(dumps(report))
    lines = [
        f"normal_ratio_bound: {report.ratio_bound!r}",
        f"construction: {report.construction_kind} (cost {report.construction_cost!r})",
        f"gap cost-bound: {report.gap_cost_minus_bound!r}",
    ]
    if report.lp_values is not None:
        for m, value in report.lp_values:
            lines.append(f"lp m={m}: {value!r}")
        lines.append(f"gap bound-lp: {report.gap_bound_minus_lp!r}")
    lines.append(f"wrote {path}")
    _emit(job, report, lines)
    return 0


def _cmd_sample(args) -> int:
    job = _load_job(args)
    failed = _require_valid_surface(job)
    if failed:
        return failed
    expr = _load_expr(job, args.expr)
    if expr.dim != 2:
        raise ConfigError("sample emits 2-D plot data; the expression must have dim 2")
    if isinstance(job.surface, Hyperplane):
        if job.surface.dim != 2:
            raise ConfigError("sample needs a two-dimensional surface")
        box_x, box_y = job.surface.intercepts()
    else:
        box_x, box_y = job.surface.a, job.surface.b
    resolution = job.grid[0] if job.grid else 32
    xs = np.linspace(0.0, 1.25 * box_x, resolution + 1)
    ys = np.linspace(0.0, 1.25 * box_y, resolution + 1)
    points = np.column_stack([np.repeat(xs, len(ys)), np.tile(ys, len(xs))])
    values = eval_at(expr, points)
    grad = one_sided_partials(expr, points)
    job.out.mkdir(parents=True, exist_ok=True)
    path = job.out / "sample.csv"
    with path.open("w", newline="\n") as stream:
        stream.write("x,y,f,fx_left,fx_right,fy_left,fy_right\n")
        for row in range(len(points)):
            fields = [
                points[row, 0],
                points[row, 1],
                values[row],
                grad.left[row, 0],
                grad.right[row, 0],
                grad.left[row, 1],
                grad.right[row, 1],
            ]
            stream.write(",".join(repr(float(v)) for v in fields) + "\n")
    _emit(job, {"sample": {"file": path.name, "rows": len(points)}}, [f"wrote {path}"])
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elopt",
        description="entropy-like functions: surface validation, cost bounds, constructions, grid-LP brackets",
    )
    parser.add_argument("--config", help="path to the JSON job config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--samples", type=int, default=None, help="override the property-suite sample count")
    parser.add_argument("--grid", type=lambda s: [int(v) for v in s.split(",")], default=None,
                        help="override the LP grid sizes, e.g. 16,32,64")
    parser.add_argument("--out", default=".", help="directory for emitted artifacts")
    parser.add_argument("--format", choices=("json", "text"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", help="validate the configured surface").set_defaults(func=_cmd_validate)
    sub.add_parser("bound", help="normal-ratio lower bound").set_defaults(func=_cmd_bound)
    sub.add_parser("construct", help="build the matching constructions").set_defaults(func=_cmd_construct)
    check = sub.add_parser("check", help="property suite + feasibility")
    check.add_argument("--expr", default=None, help="serialized expression to check instead of the construction")
    check.set_defaults(func=_cmd_check)
    lp = sub.add_parser("lp", help="grid-LP lower bounds over the configured sizes")
    lp.add_argument("--dump-lp", action="store_true", help="write each LP in interchange text format")
    lp.set_defaults(func=_cmd_lp)
    sub.add_parser("report", help="full bound/construction/LP bracket").set_defaults(func=_cmd_report)
    sample = sub.add_parser("sample", help="CSV grid of values and one-sided partials")
    sample.add_argument("--expr", default=None, help="serialized expression to sample instead of the construction")
    sample.set_defaults(func=_cmd_sample)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except ShapeError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except SolverError as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return 5
    except ConstructionError as exc:
        sys.stderr.write(f"construction failed verification: {exc}\n")
        return 4
    except EloptError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
