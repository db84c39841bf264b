"""Grid-LP lower bound on the optimal feasible cost of a 2-D surface.

The LP has one variable ``f(i, j)`` per node of an ``(m+1) x (m+1)`` grid on
the surface's intercept box (steps ``h_x = X/m``, ``h_y = Y/m``, anisotropic
when the box is not square) plus the objective scalar ``t``, and rows

(i)    pointedness        ``f(0,0) = 0``;
(ii)   monotonicity       ``f(g + e_d) >= f(g)``;
(iii)  lattice submodularity
                          ``f(g+e_x) + f(g+e_y) >= f(g) + f(g+e_x+e_y)``;
(iv)   per-axis concavity ``f(g+e_d) - f(g) >= f(g+2 e_d) - f(g+e_d)``;
(v)    crossing rows: on each grid line in direction ``d`` crossing the
       surface at coordinate ``c`` with ``k h_d <= c <= (k+1) h_d`` and
       ``1 <= k <= m-2``,
                          ``[f(k) - f(k-1)] - [f(k+2) - f(k+1)] >= h_d``;
(vi)   objective          ``min t`` with ``h_d * t >= f(e_d)`` for both axes.

Soundness (why the optimal LP value is a lower bound on the cost of every
surface-feasible entropy-like function): restrict such an ``f`` to the grid.
Rows (i)-(iv) hold because pointedness, monotonicity, submodularity and
per-axis concavity restrict verbatim to lattice points.  For row (v), f is
concave along the grid line, so the backward chord slope over the cell left
of the crossing is at least the left derivative at ``c`` and the forward
chord slope over the cell right of it is at most the right derivative at
``c``; feasibility makes the difference of those derivatives at least 1, and
multiplying by the step gives the row.  For (vi), concavity with ``f(0)=0``
gives ``f(h_d e_d)/h_d <= f_d^+(0) <= cost(f)``.  Hence the restriction is
LP-feasible with objective at most ``cost(f)``, and minimising over the
larger LP polytope can only go lower.  The restriction argument is machine-
checked by :func:`restriction_check`.

Crossings that fall on a grid node use the same cells (the quotients stay on
the correct sides of the crossing); the tie window is 1e-12.  Out-of-range
crossings are skipped, which only weakens the relaxation.  The LP is always
feasible (the restriction of any feasible function is a witness; with no
crossing rows the zero function already satisfies everything) and bounded
below by 0, so a deterministic solve returns a finite optimum.

The solve is delegated to the deterministic dual-simplex of HiGHS via
``scipy.optimize.linprog`` (anti-cycling built in).  ``m`` is capped at 96
(about 9.4k variables) to keep desk-scale runtimes.  One instance solves
single-threaded; independent instances (an ``m`` sweep) are safe to run in
parallel since all inputs are immutable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TextIO

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import DomainError, SolverError
from .exprs import ELExpr, eval_at
from .surfaces import Curve2D, Hyperplane, Surface

__all__ = [
    "GridLP",
    "LPSolution",
    "RestrictionReport",
    "build_lp",
    "solve_lp",
    "restriction_check",
    "grid_points",
    "dump_lp",
]

M_CAP = 96
_CROSS_TIE = 1e-12
ROW_TOL = 1e-9


@dataclass(frozen=True)
class GridLP:
    m: int
    h_x: float
    h_y: float
    n_vars: int
    geq: sp.csr_matrix          # rows: geq @ z >= geq_rhs
    geq_rhs: np.ndarray
    kinds: tuple[str, ...]
    crossing_rows: int
    surface: str


@dataclass(frozen=True)
class LPSolution:
    value: float
    t: float
    grid: np.ndarray            # (m+1, m+1); grid[i, j] = f(i h_x, j h_y)
    status: str
    iterations: int


@dataclass(frozen=True)
class RestrictionReport:
    satisfied: bool
    max_violation: float
    worst_row: str
    objective: float


def _crossing_fns(surface: Surface):
    """Per-direction crossing coordinate of the surface on a grid line, plus the box."""
    if isinstance(surface, Hyperplane):
        if surface.dim != 2:
            raise DomainError("the grid LP supports two-dimensional surfaces only")
        c1, c2 = surface.c
        box_x, box_y = surface.M / c1, surface.M / c2

        def cross_x(y: float) -> float:
            return (surface.M - c2 * y) / c1

        def cross_y(x: float) -> float:
            return (surface.M - c1 * x) / c2

        return box_x, box_y, cross_x, cross_y
    curve: Curve2D = surface

    def cross_x(y: float) -> float:
        return float(curve.beta(min(y, curve.b)))

    def cross_y(x: float) -> float:
        return float(curve.alpha(min(x, curve.a)))

    return curve.a, curve.b, cross_x, cross_y


def build_lp(surface: Surface, m: int) -> GridLP:
    """Assemble the grid LP for a validated 2-D surface."""
    if m < 4:
        raise ValueError(f"need m >= 4, got {m}")
    if m > M_CAP:
        raise ValueError(f"m = {m} above the cap {M_CAP} (9.4k variables)")
    report = surface.validate()
    if not report.valid:
        raise ValueError(f"surface failed validation: {'; '.join(report.violations)}")
    box_x, box_y, cross_x, cross_y = _crossing_fns(surface)
    n_grid = m + 1
    h_x = box_x / m
    h_y = box_y / m
    t_col = n_grid * n_grid
    n_vars = t_col + 1

    def vid(i, j):
        return i * n_grid + j

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    rhs: list[np.ndarray] = []
    kinds: list[str] = []
    counter = 0

    def add_block(term_cols, term_vals, rhs_vals, labels):
        nonlocal counter
        k = len(term_cols[0])
        base = counter
        for col_arr, cf in zip(term_cols, term_vals):
            rows.append(base + np.arange(k))
            cols.append(np.asarray(col_arr))
            vals.append(np.full(k, float(cf)))
        rhs.append(np.asarray(rhs_vals, dtype=float))
        kinds.extend(labels)
        counter += k

    # (ii) monotonicity along x then y
    I, J = np.meshgrid(np.arange(m), np.arange(n_grid), indexing="ij")
    I, J = I.ravel(), J.ravel()
    add_block(
        [vid(I + 1, J), vid(I, J)], [1.0, -1.0], np.zeros(I.size),
        [f"mono_x[{i},{j}]" for i, j in zip(I, J)],
    )
    I, J = np.meshgrid(np.arange(n_grid), np.arange(m), indexing="ij")
    I, J = I.ravel(), J.ravel()
    add_block(
        [vid(I, J + 1), vid(I, J)], [1.0, -1.0], np.zeros(I.size),
        [f"mono_y[{i},{j}]" for i, j in zip(I, J)],
    )

    # (iii) lattice submodularity on every cell
    I, J = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    I, J = I.ravel(), J.ravel()
    add_block(
        [vid(I + 1, J), vid(I, J + 1), vid(I, J), vid(I + 1, J + 1)],
        [1.0, 1.0, -1.0, -1.0],
        np.zeros(I.size),
        [f"submod[{i},{j}]" for i, j in zip(I, J)],
    )

    # (iv) per-axis concavity
    I, J = np.meshgrid(np.arange(m - 1), np.arange(n_grid), indexing="ij")
    I, J = I.ravel(), J.ravel()
    add_block(
        [vid(I + 1, J), vid(I, J), vid(I + 2, J)], [2.0, -1.0, -1.0], np.zeros(I.size),
        [f"conc_x[{i},{j}]" for i, j in zip(I, J)],
    )
    I, J = np.meshgrid(np.arange(n_grid), np.arange(m - 1), indexing="ij")
    I, J = I.ravel(), J.ravel()
    add_block(
        [vid(I, J + 1), vid(I, J), vid(I, J + 2)], [2.0, -1.0, -1.0], np.zeros(I.size),
        [f"conc_y[{i},{j}]" for i, j in zip(I, J)],
    )

    # (v) crossing rows
    crossings = 0
    for j in range(n_grid):
        c = cross_x(j * h_y)
        if not (-_CROSS_TIE <= c <= box_x + _CROSS_TIE):
            raise ValueError(f"surface exits the grid box at y = {j * h_y!r}")
        k = int(math.floor((c + _CROSS_TIE) / h_x))
        if 1 <= k <= m - 2:
            add_block(
                [
                    np.array([vid(k, j)]),
                    np.array([vid(k - 1, j)]),
                    np.array([vid(k + 1, j)]),
                    np.array([vid(k + 2, j)]),
                ],
                [1.0, -1.0, 1.0, -1.0],
                np.array([h_x]),
                [f"cross_x[j={j},k={k}]"],
            )
            crossings += 1
    for i in range(n_grid):
        c = cross_y(i * h_x)
        if not (-_CROSS_TIE <= c <= box_y + _CROSS_TIE):
            raise ValueError(f"surface exits the grid box at x = {i * h_x!r}")
        k = int(math.floor((c + _CROSS_TIE) / h_y))
        if 1 <= k <= m - 2:
            add_block(
                [
                    np.array([vid(i, k)]),
                    np.array([vid(i, k - 1)]),
                    np.array([vid(i, k + 1)]),
                    np.array([vid(i, k + 2)]),
                ],
                [1.0, -1.0, 1.0, -1.0],
                np.array([h_y]),
                [f"cross_y[i={i},k={k}]"],
            )
            crossings += 1
    if crossings == 0:
        warnings.warn(
            "grid hosts no crossing row; the LP is valid but its bound is trivial",
            stacklevel=2,
        )

    # (vi) objective support rows: h_d * t >= f(e_d)
    add_block(
        [np.array([t_col]), np.array([vid(1, 0)])], [h_x, -1.0], np.array([0.0]), ["obj_x"]
    )
    add_block(
        [np.array([t_col]), np.array([vid(0, 1)])], [h_y, -1.0], np.array([0.0]), ["obj_y"]
    )

    geq = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(counter, n_vars),
    ).tocsr()
    return GridLP(
        m=m,
        h_x=h_x,
        h_y=h_y,
        n_vars=n_vars,
        geq=geq,
        geq_rhs=np.concatenate(rhs),
        kinds=tuple(kinds),
        crossing_rows=crossings,
        surface=repr(surface),
    )


def solve_lp(lp: GridLP) -> LPSolution:
    """Deterministic solve; infeasible/unbounded are reported in the status field.

    (Neither can occur for a correctly built LP: the zero function satisfies
    everything but crossings, feasible restrictions satisfy those too, and
    the objective is bounded below by 0.)
    """
    n_grid = lp.m + 1
    objective = np.zeros(lp.n_vars)
    objective[-1] = 1.0
    a_eq = sp.csr_matrix(
        (np.array([1.0]), (np.array([0]), np.array([0]))), shape=(1, lp.n_vars)
    )
    res = linprog(
        objective,
        A_ub=-lp.geq,
        b_ub=-lp.geq_rhs,
        A_eq=a_eq,
        b_eq=np.array([0.0]),
        bounds=(0.0, None),
        method="highs",
    )
    if res.status in (1, 4):
        raise SolverError(f"LP solve failed: {res.message}")
    if res.status != 0:
        status = "infeasible" if res.status == 2 else "unbounded"
        return LPSolution(
            value=math.nan,
            t=math.nan,
            grid=np.full((n_grid, n_grid), math.nan),
            status=status,
            iterations=int(getattr(res, "nit", 0)),
        )
    x = np.asarray(res.x)
    return LPSolution(
        value=float(res.fun),
        t=float(x[-1]),
        grid=x[:-1].reshape(n_grid, n_grid),
        status="optimal",
        iterations=int(getattr(res, "nit", 0)),
    )


def grid_points(lp: GridLP) -> np.ndarray:
    """Grid nodes as an ((m+1)^2, 2) batch ordered like the LP variables."""
    n_grid = lp.m + 1
    xs = np.arange(n_grid) * lp.h_x
    ys = np.arange(n_grid) * lp.h_y
    return np.column_stack([np.repeat(xs, n_grid), np.tile(ys, n_grid)])


def restriction_check(lp: GridLP, expr: ELExpr, tol: float = ROW_TOL) -> RestrictionReport:
    """Machine check of the soundness argument: a feasible function's grid restriction satisfies every row."""
    f = np.asarray(eval_at(expr, grid_points(lp)), dtype=float)
    n_grid = lp.m + 1
    t = max(f[1 * n_grid + 0] / lp.h_x, f[0 * n_grid + 1] / lp.h_y)
    z = np.concatenate([f, [t]])
    residual = lp.geq @ z - lp.geq_rhs
    violations = np.maximum(-residual, 0.0)
    worst_idx = int(np.argmax(violations))
    worst = float(violations[worst_idx])
    origin = abs(float(f[0]))
    if origin > worst:
        worst_row = "point_origin"
        worst = origin
    else:
        worst_row = lp.kinds[worst_idx]
    return RestrictionReport(
        satisfied=worst <= tol,
        max_violation=worst,
        worst_row=worst_row,
        objective=float(t),
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def dump_lp(lp: GridLP, stream: TextIO) -> None:
    """Write the LP in the plain-text interchange format of CPLEX-style solvers.

    Variables follow the solver convention of default bounds ``0 <= var``,
    which matches how :func:`solve_lp` poses the problem.
    """
    n_grid = lp.m + 1

    def var_name(col: int) -> str:
        if col == lp.n_vars - 1:
            return "t"
        return f"f_{col // n_grid}_{col % n_grid}"

    stream.write(f"\\ grid LP lower bound ({lp.surface}), m = {lp.m}\n")
    stream.write("Minimize\n obj: t\nSubject To\n")
    stream.write(" point_origin: f_0_0 = 0\n")
    csr = lp.geq
    for row in range(csr.shape[0]):
        start, end = csr.indptr[row], csr.indptr[row + 1]
        terms = []
        for col, val in zip(csr.indices[start:end], csr.data[start:end]):
            sign = "+" if val >= 0 else "-"
            terms.append(f"{sign} {_fmt(abs(val))} {var_name(col)}")
        label = lp.kinds[row].replace("[", "_").replace("]", "").replace(",", "_").replace("=", "")
        stream.write(f" {label}_r{row}: {' '.join(terms)} >= {_fmt(lp.geq_rhs[row])}\n")
    stream.write("End\n")
