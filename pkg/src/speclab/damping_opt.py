"""Damping placement: maximize ``J_N(a) = min_n int a phi_n^2`` over densities of given mass.

The relaxed problem over ``0 <= a <= 1`` with ``int a = l`` is a linear
program once ``a`` is piecewise constant on quadrature cells. It is solved
here by a small bounded-variable revised simplex: there are only ``N + 1``
equality rows, so the basis stays tiny even for many cells, and the dual
values give the multipliers ``alpha_n`` of the optimality condition.

The result is certified by comparing the primal value with the value of the
dual program evaluated at the returned multipliers.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .eigensolver import EigenSystem
from .errors import InvalidParameterError, NumericalError

MASS_TOL = 1e-9
GAP_TOL = 1e-8
BANG_BANG_EPS = 1e-3


@dataclass(frozen=True)
class DampingDensity:
    """Cellwise constant density ``a`` with ``0 <= a <= 1`` and mass ``budget``."""

    a: np.ndarray
    budget: float
    cell_areas: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        areas = np.asarray(self.cell_areas, dtype=float)
        if a.shape != areas.shape:
            raise InvalidParameterError("density and cell areas differ in length")
        if np.any(a < -1e-12) or np.any(a > 1 + 1e-12):
            raise InvalidParameterError("density values must lie in [0, 1]")
        total = float(np.sum(areas))
        if abs(float(np.dot(a, areas)) - self.budget) > MASS_TOL * total:
            raise InvalidParameterError(
                f"density mass {np.dot(a, areas):.12g} differs from budget {self.budget:.12g}"
            )
        a = np.clip(a, 0.0, 1.0)
        a.setflags(write=False)
        areas = areas.copy()
        areas.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "cell_areas", areas)
        object.__setattr__(self, "budget", float(self.budget))

    @classmethod
    def from_values(cls, a, cell_areas) -> "DampingDensity":
        a = np.asarray(a, dtype=float)
        return cls(a, float(np.dot(a, cell_areas)), cell_areas)

    @classmethod
    def uniform(cls, cell_areas, budget: float) -> "DampingDensity":
        areas = np.asarray(cell_areas, dtype=float)
        return cls(np.full(areas.shape, budget / np.sum(areas)), budget, areas)

    @classmethod
    def indicator(cls, sys: EigenSystem, predicate: Callable[[np.ndarray], np.ndarray]) -> "DampingDensity":
        """Indicator of the cells whose centroid satisfies ``predicate``."""
        quad = sys.quadrature
        a = np.asarray(predicate(quad.cell_centroids), dtype=float)
        return cls.from_values(a, quad.cell_areas)

    @property
    def domain_area(self) -> float:
        return float(np.sum(self.cell_areas))

    def intermediate_mask(self, eps: float = BANG_BANG_EPS) -> np.ndarray:
        return (self.a >= eps) & (self.a <= 1.0 - eps)

    def to_dict(self) -> dict:
        return {"budget": self.budget, "a": self.a.tolist(), "cell_areas": self.cell_areas.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DampingDensity":
        return cls(np.asarray(data["a"], dtype=float), float(data["budget"]), np.asarray(data["cell_areas"], dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def mode_weights(sys: EigenSystem, N: int) -> np.ndarray:
    """``w[n, c] = int_cell phi_n^2`` for ``n < N`` (shape ``(N, cells)``)."""
    if not 1 <= N <= sys.n:
        raise InvalidParameterError(f"N must be in [1, {sys.n}]")
    quad = sys.quadrature
    vals = sys.quad_values[:, :N]
    return quad.cell_sum(vals**2).T


def evaluate_JN(sys: EigenSystem, density: DampingDensity, N: int) -> float:
    """``min_{n <= N} int a phi_n^2``."""
    w = mode_weights(sys, N)
    _check_cells(w, density)
    return float(np.min(w @ density.a))


def _check_cells(w: np.ndarray, density: DampingDensity) -> None:
    if w.shape[1] != density.a.shape[0]:
        raise InvalidParameterError(f"density has {density.a.shape[0]} cells, system has {w.shape[1]}")


@dataclass(frozen=True)
class DampingSolution:
    density: DampingDensity
    J_value: float
    active_modes: tuple[int, ...]  # 1-based
    multipliers: np.ndarray
    intermediate_measure: float
    dual_value: float
    duality_gap: float
    iterations: int
    alternative_optima: bool
    weights: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.multipliers)

    def to_dict(self) -> dict:
        return {
            "J_value": self.J_value,
            "dual_value": self.dual_value,
            "duality_gap": self.duality_gap,
            "active_modes": list(self.active_modes),
            "multipliers": self.multipliers.tolist(),
            "intermediate_measure": self.intermediate_measure,
            "alternative_optima": self.alternative_optima,
            "iterations": self.iterations,
            "density": self.density.to_dict(),
        }

    @classmethod
    def from_density(cls, sys: EigenSystem, density: DampingDensity, N: int) -> "DampingSolution":
        """Wrap an arbitrary density, with uniform multipliers on the minimizing modes."""
        w = mode_weights(sys, N)
        _check_cells(w, density)
        vals = w @ density.a
        J = float(np.min(vals))
        active = np.flatnonzero(vals <= J + 1e-12 * max(1.0, abs(J)))
        alpha = np.zeros(N)
        alpha[active] = 1.0 / len(active)
        return cls(density, J, tuple(int(i) + 1 for i in active), alpha,
                   float(np.sum(density.cell_areas[density.intermediate_mask()])),
                   float("nan"), float("nan"), 0, False, w)


# ---------------------------------------------------------------------------
# Linear program
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LPResult:
    a: np.ndarray
    t: float
    alpha: np.ndarray
    beta: float
    dual_value: float
    iterations: int
    alternative_optima: bool


def dual_value(w: np.ndarray, areas: np.ndarray, budget: float, alpha: np.ndarray, beta: float) -> float:
    """Dual objective ``l beta + sum_c max(0, sum_n alpha_n w_nc - beta area_c)``; an upper bound when ``sum alpha = 1``."""
    g = alpha @ w - beta * areas
    return float(budget * beta + np.sum(np.maximum(g, 0.0)))


def solve_damping_lp(w: np.ndarray, areas: np.ndarray, budget: float, *, max_iter: int | None = None) -> LPResult:
    """Maximize ``t`` subject to ``w a >= t``, ``areas . a = budget``, ``0 <= a <= 1``.

    Variables are ordered ``a_0 .. a_{C-1}, t, s_0 .. s_{N-1}`` (slacks of the
    mode constraints). Dantzig pricing is used, switching to Bland's rule
    (smallest eligible index, smallest leaving index) during runs of
    degenerate pivots, which rules out cycling. Ties are therefore broken
    lexicographically by cell index.

    The weights are first divided by the power of two nearest ``max |w|``,
    so rescaling ``w`` by a power of two reproduces every pivot exactly.
    """
    w = np.asarray(w, dtype=float)
    areas = np.asarray(areas, dtype=float)
    total = float(np.sum(areas))
    if not 0.0 < budget < total:
        raise InvalidParameterError(f"budget must lie in (0, {total:.6g})")
    wmax = float(np.max(np.abs(w)))
    if not wmax > 0:
        raise InvalidParameterError("weights are identically zero")
    scale = math.ldexp(1.0, math.frexp(wmax)[1])
    res = _simplex(w / scale, areas, budget, max_iter)
    return LPResult(res.a, res.t * scale, res.alpha, res.beta * scale, res.dual_value * scale,
                    res.iterations, res.alternative_optima)


def _simplex(w: np.ndarray, areas: np.ndarray, budget: float, max_iter: int | None) -> LPResult:
    N, C = w.shape
    m = N + 1
    nv = C + 1 + N
    T_IDX = C

    def column(j: int) -> np.ndarray:
        if j < C:
            col = np.empty(m)
            col[:N] = -w[:, j]
            col[N] = areas[j]
            return col
        if j == T_IDX:
            col = np.zeros(m)
            col[:N] = 1.0
            return col
        col = np.zeros(m)
        col[j - C - 1] = 1.0
        return col

    upper = np.concatenate([np.ones(C), np.full(1 + N, np.inf)])
    cost = np.zeros(nv)
    cost[T_IDX] = 1.0
    b = np.zeros(m)
    b[N] = budget

    # warm start: fill cells by decreasing average weight density (stable, so index breaks ties)
    score = np.mean(w, axis=0) / areas
    order = np.argsort(-score, kind="stable")
    x = np.zeros(nv)
    filled = np.cumsum(areas[order])
    k = int(np.searchsorted(filled, budget, side="left"))
    k = min(k, C - 1)
    x[order[:k]] = 1.0
    frac_cell = int(order[k])
    x[frac_cell] = (budget - (filled[k - 1] if k > 0 else 0.0)) / areas[frac_cell]
    basis = [frac_cell] + [C + 1 + n for n in range(N)]
    at_upper = np.zeros(nv, dtype=bool)
    at_upper[order[:k]] = True

    dtol = 1e-12
    ptol = 1e-12
    max_iter = max_iter or 50 * (C + m) + 1000
    degenerate_run = 0
    it = 0
    W_full = np.vstack([-w, areas[None, :]])  # A restricted to cell columns

    while True:
        B = np.column_stack([column(j) for j in basis])
        try:
            lu = scipy.linalg.lu_factor(B)
        except (ValueError, np.linalg.LinAlgError) as exc:  # pragma: no cover
            raise NumericalError(f"singular simplex basis: {exc}") from exc
        nonbasic_mask = np.ones(nv, dtype=bool)
        nonbasic_mask[basis] = False
        xn = np.where(nonbasic_mask, x, 0.0)
        rhs = b - (W_full @ xn[:C])
        rhs[:N] -= xn[T_IDX]
        rhs[:N] -= xn[C + 1:]
        xB = scipy.linalg.lu_solve(lu, rhs)
        x[basis] = xB
        cB = cost[basis]
        y = scipy.linalg.lu_solve(lu, cB, trans=1)
        # reduced costs
        d = np.empty(nv)
        d[:C] = -(y @ W_full)
        d[T_IDX] = 1.0 - np.sum(y[:N])
        d[C + 1:] = -y[:N]
        d[~nonbasic_mask] = 0.0
        eligible = nonbasic_mask & (((~at_upper) & (d > dtol)) | (at_upper & (d < -dtol)))
        if not np.any(eligible):
            break
        if it >= max_iter:
            raise NumericalError(f"simplex did not terminate within {max_iter} iterations")
        it += 1
        if degenerate_run > 20:
            j = int(np.flatnonzero(eligible)[0])
        else:
            cand = np.flatnonzero(eligible)
            j = int(cand[np.argmax(np.abs(d[cand]))])
        direction = -1.0 if at_upper[j] else 1.0
        alpha_col = scipy.linalg.lu_solve(lu, column(j))
        # x_B changes by -direction * theta * alpha_col
        theta = upper[j] - 0.0 if np.isfinite(upper[j]) else np.inf
        leave = -1
        for pos in range(m):
            rate = direction * alpha_col[pos]
            bj = basis[pos]
            if rate > ptol:
                lim = (x[bj] - 0.0) / rate
            elif rate < -ptol and np.isfinite(upper[bj]):
                lim = (upper[bj] - x[bj]) / (-rate)
            else:
                continue
            lim = max(lim, 0.0)
            if lim < theta - 1e-15 or (leave >= 0 and abs(lim - theta) <= 1e-15 and bj < basis[leave]):
                theta, leave = lim, pos
        if not np.isfinite(theta):
            raise NumericalError("linear program is unbounded")
        degenerate_run = degenerate_run + 1 if theta <= 1e-14 else 0
        x[j] += direction * theta
        x[basis] -= direction * theta * alpha_col
        if leave < 0:  # bound flip of the entering variable
            at_upper[j] = not at_upper[j]
            x[j] = upper[j] if at_upper[j] else 0.0
            continue
        out = basis[leave]
        rate = direction * alpha_col[leave]
        if rate > 0:
            x[out] = 0.0
            at_upper[out] = False
        else:
            x[out] = upper[out]
            at_upper[out] = True
        basis[leave] = j
        at_upper[j] = False

    a = np.clip(x[:C], 0.0, 1.0)
    t = float(x[T_IDX])
    alpha = np.maximum(y[:N], 0.0)
    s = alpha.sum()
    alpha = alpha / s if s > 0 else np.full(N, 1.0 / N)
    beta = float(y[N])
    dv = dual_value(w, areas, budget, alpha, beta)
    nonbasic_mask = np.ones(nv, dtype=bool)
    nonbasic_mask[basis] = False
    free_move = nonbasic_mask.copy()
    free_move[C + 1:] = False  # slack ties only reflect inactive constraints
    alternative = bool(np.any(free_move & (np.abs(d) <= dtol) & (upper > 0)))
    return LPResult(a, t, alpha, beta, dv, it, alternative)


def optimize_relaxed(sys: EigenSystem, budget: float, N: int) -> DampingSolution:
    """Optimal relaxed damping density for the first ``N`` modes and mass ``budget``.

    Raises :class:`NumericalError` if the duality gap exceeds ``1e-8 t*``.
    """
    w = mode_weights(sys, N)
    areas = np.asarray(sys.quadrature.cell_areas, dtype=float)
    res = solve_damping_lp(w, areas, budget)
    vals = w @ res.a
    J = float(np.min(vals))
    gap = abs(res.dual_value - J)
    if gap > GAP_TOL * max(abs(J), 1e-300):
        raise NumericalError(f"duality gap {gap:.3e} exceeds certificate tolerance")
    density = DampingDensity(res.a, float(np.dot(res.a, areas)), areas)
    active = np.flatnonzero(vals <= J + 1e-9 * max(abs(J), 1e-300))
    alpha = res.alpha.copy()
    alpha[np.setdiff1d(np.arange(N), active)] = 0.0
    alpha /= alpha.sum()
    return DampingSolution(
        density=density,
        J_value=J,
        active_modes=tuple(int(i) + 1 for i in active),
        multipliers=alpha,
        intermediate_measure=float(np.sum(areas[density.intermediate_mask()])),
        dual_value=res.dual_value,
        duality_gap=gap,
        iterations=res.iterations,
        alternative_optima=res.alternative_optima,
        weights=w,
    )


def level_set_density(weights: np.ndarray, areas: np.ndarray, budget: float) -> np.ndarray:
    """Fill cells by decreasing ``weights / areas`` until the budget is met (one fractional cell)."""
    order = np.argsort(-(np.asarray(weights) / areas), kind="stable")
    a = np.zeros(len(areas))
    remaining = budget
    for c in order:
        take = min(1.0, remaining / areas[c])
        a[c] = take
        remaining -= take * areas[c]
        if remaining <= 0:
            break
    return a


@dataclass(frozen=True)
class BangBangReport:
    intermediate_area: float
    residual: float
    cells: int
    eps: float

    def to_dict(self) -> dict:
        return {"intermediate_area": self.intermediate_area, "residual": self.residual, "cells": self.cells, "eps": self.eps}


def bang_bang_report(sol: DampingSolution, eps: float = BANG_BANG_EPS) -> BangBangReport:
    """Area of ``A_eps = {eps <= a <= 1 - eps}`` and the spread of ``sum alpha_k phi_k^2`` on it.

    The spread is the standard deviation of the cell averages; the
    optimality condition predicts it to be zero.
    """
    if not 0 < eps < 0.5:
        raise InvalidParameterError("eps must lie in (0, 1/2)")
    dens = sol.density
    mask = dens.intermediate_mask(eps)
    if not np.any(mask):
        return BangBangReport(0.0, 0.0, 0, eps)
    avg = (sol.multipliers @ sol.weights[:, mask]) / dens.cell_areas[mask]
    return BangBangReport(float(np.sum(dens.cell_areas[mask])), float(np.std(avg)), int(mask.sum()), eps)


def budget_sweep(sys: EigenSystem, budgets: Sequence[float], N: int) -> list[tuple[float, float]]:
    return [(float(l), optimize_relaxed(sys, float(l), N).J_value) for l in budgets]


def sweep_to_csv(rows: Sequence[tuple[float, float]]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["budget", "J"])
    for l, t in rows:
        wr.writerow([repr(l), repr(t)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Damped wave equation, truncated to M modes
# ---------------------------------------------------------------------------


def damping_matrix(sys: EigenSystem, density: DampingDensity, M: int) -> np.ndarray:
    """``B_ij = int a phi_i phi_j`` for ``i, j < M``."""
    quad = sys.quadrature
    if quad.cell_areas.shape != density.a.shape:
        raise InvalidParameterError("density cells do not match the system quadrature")
    vals = sys.quad_values[:, :M]
    wa = quad.weights * density.a[quad.cells]
    return vals.T @ (wa[:, None] * vals)


def modal_decay_rate(sys: EigenSystem, density: DampingDensity, k_damp: float, M: int) -> float:
    """Decay rate of the damped membrane projected onto the first ``M`` modes.

    Solves ``s^2 I + 2 k s B + Lambda = 0`` by companion linearization and
    returns ``-max Re s``. This is a truncated-modal estimate; compare
    several ``M`` before trusting it.
    """
    if not 1 <= M <= sys.n:
        raise InvalidParameterError(f"M must be in [1, {sys.n}]")
    if k_damp < 0:
        raise InvalidParameterError("k_damp must be nonnegative")
    if k_damp == 0:
        return 0.0
    B = damping_matrix(sys, density, M)
    A = np.zeros((2 * M, 2 * M))
    A[:M, M:] = np.eye(M)
    A[M:, :M] = -np.diag(sys.lambdas[:M])
    A[M:, M:] = -2.0 * k_damp * B
    try:
        s = scipy.linalg.eigvals(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"pencil eigensolve failed: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise NumericalError("pencil eigensolve produced non-finite values")
    return float(-np.max(s.real))
