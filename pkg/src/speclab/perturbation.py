"""Eigenvalue curves along deformations, and first-order eigenvalue derivatives.

``track_path`` follows eigenvalue branches across a :class:`DeformationPath`
by eigenfunction overlap and reports crossings. ``hadamard_derivative``
evaluates the boundary-integral shape derivative and
``potential_derivative`` the derivative with respect to a potential
perturbation ``-Laplacian + eps V``. Both come with central
finite-difference checks.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .eigensolver import EigenSystem, assemble_p1, fem_spectrum, orthotope_spectrum, p1_gradients
from .errors import InvalidParameterError, PairingError, SimplicityError, ValidityError
from .geometry import DeformationPath, MeshedDomain, Orthotope, VectorField2D, flow_deform

CROSSING_TOL = 1e-4
OVERLAP_MIN = 0.9


# ---------------------------------------------------------------------------
# Path tracking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrossingEvent:
    t_start: float
    t_end: float
    pair: tuple[int, int]
    min_gap: float
    kind: str  # "crossing" (branches swap order) or "near" (gap below threshold at a grid point)
    t_cross: float | None = None  # linear interpolation of the branch difference, crossings only

    def to_dict(self) -> dict:
        return {"t": [self.t_start, self.t_end], "pair": list(self.pair), "min_gap": self.min_gap,
                "kind": self.kind, "t_cross": self.t_cross}


@dataclass(frozen=True)
class EigenPath:
    """Eigenvalues along a path.

    ``values[k]`` is the sorted spectrum at ``t_grid[k]`` (``n`` requested
    modes plus a buffer). ``pairing[k][i]`` is the sorted position at
    ``t_grid[k+1]`` of the branch at position ``i`` at ``t_grid[k]``.
    Crossing pairs use 1-based positions at the start of the interval.
    """

    t_grid: np.ndarray
    values: np.ndarray
    n: int
    pairing: np.ndarray
    crossing_events: tuple[CrossingEvent, ...]
    min_overlaps: np.ndarray = field(default=None)

    @property
    def curves(self) -> np.ndarray:
        """Branch values, shape (m, T): row ``c`` follows the branch at position ``c`` at t=0."""
        T, m = self.values.shape
        pos = np.arange(m)
        out = np.empty((m, T))
        out[:, 0] = self.values[0]
        for k in range(T - 1):
            pos = self.pairing[k][pos]
            out[:, k + 1] = self.values[k + 1][pos]
        return out

    def crossings(self, pair: tuple[int, int] | None = None) -> list[CrossingEvent]:
        ev = [e for e in self.crossing_events if e.kind == "crossing"]
        if pair is not None:
            ev = [e for e in ev if set(e.pair) == set(pair)]
        return ev

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"lambda_{i + 1}" for i in range(self.n)] + ["pairing", "crossing"])
        flagged = {}
        for e in self.crossing_events:
            flagged.setdefault(e.t_start, []).append(f"{e.kind}:{e.pair[0]}-{e.pair[1]}")
        for k, t in enumerate(self.t_grid):
            perm = " ".join(map(str, self.pairing[k].tolist())) if k < len(self.pairing) else ""
            w.writerow([repr(float(t))] + [repr(float(x)) for x in self.values[k, : self.n]]
                       + [perm, ";".join(flagged.get(float(t), []))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "t_grid": self.t_grid.tolist(),
            "n": self.n,
            "values": self.values[:, : self.n].tolist(),
            "pairing": self.pairing.tolist(),
            "crossing_events": [e.to_dict() for e in self.crossing_events],
        }


def _overlap_group(O: np.ndarray, i: int, perm: np.ndarray, significant: float = 0.1) -> tuple[list[int], list[int]]:
    """Rows and columns connected to row ``i`` through overlaps above ``significant``."""
    rows, cols = {i}, {int(perm[i])}
    while True:
        new_cols = cols | {int(c) for r in rows for c in np.flatnonzero(O[r] > significant)}
        new_rows = rows | {int(r) for c in new_cols for r in np.flatnonzero(O[:, c] > significant)}
        if new_rows == rows and new_cols == cols:
            return sorted(rows), sorted(cols)
        rows, cols = new_rows, new_cols


def track_path(path: DeformationPath, n: int, *, buffer: int = 2, crossing_tol: float = CROSSING_TOL,
               overlap_min: float = OVERLAP_MIN, systems: Sequence[EigenSystem] | None = None) -> EigenPath:
    """Compute spectra along ``path`` and pair modes by maximal L2 overlap.

    ``n + buffer`` modes are computed so that branches entering or leaving
    the requested window can still be followed. A pairing whose overlap
    for any of the first ``n`` positions is at most ``overlap_min`` raises
    :class:`PairingError`, unless the weak entries form a group compared as
    subspaces. Inside such a group (an exact degeneracy, or an avoided
    crossing of the discrete problem) a step is accepted when the group
    subspace is preserved, that is all singular values of its overlap
    block exceed ``overlap_min``.
    """
    m = n + buffer
    if systems is None:
        systems = [fem_spectrum(mesh, m) for mesh in path.meshes]
    values = np.array([s.lambdas[:m] for s in systems])
    T = len(systems)
    pairing = np.zeros((max(T - 1, 0), m), dtype=np.int64)
    min_ov = np.zeros(max(T - 1, 0))
    events: list[CrossingEvent] = []
    t = np.asarray(path.t_grid)

    for k in range(T):
        lam = values[k]
        for i in range(n):
            if i + 1 < m and lam[i + 1] - lam[i] < crossing_tol * (1.0 + lam[i]):
                events.append(CrossingEvent(float(t[k]), float(t[k]), (i + 1, i + 2), float(lam[i + 1] - lam[i]), "near"))

    for k in range(T - 1):
        _, M = assemble_p1(systems[k + 1].domain)
        S = systems[k].vectors[:, :m].T @ (M @ systems[k + 1].vectors[:, :m])
        O = np.abs(S)
        rows, cols = linear_sum_assignment(-O)
        perm = np.empty(m, dtype=np.int64)
        perm[rows] = cols
        ov = O[np.arange(m), perm]
        weak = [i for i in range(m) if ov[i] <= overlap_min and (i < n or perm[i] < n)]
        for i in weak:
            grp_a, grp_b = _overlap_group(O, i, perm)
            sv = np.linalg.svd(S[np.ix_(grp_a, grp_b)], compute_uv=False) if len(grp_a) == len(grp_b) else [0.0]
            if np.min(sv) <= overlap_min:
                raise PairingError(
                    f"ambiguous pairing between t={t[k]:.6g} and t={t[k + 1]:.6g} "
                    f"(mode {i + 1}, overlap {ov[i]:.3f}); refine the t grid"
                )
        pairing[k] = perm
        min_ov[k] = float(np.min(ov[[i for i in range(m) if i < n or perm[i] < n]]))
        for i in range(m):
            for j in range(i + 1, m):
                if perm[i] > perm[j] and min(i, j) < n:
                    d0 = values[k, i] - values[k, j]
                    d1 = values[k + 1, perm[i]] - values[k + 1, perm[j]]
                    frac = 0.5 if d1 == d0 else -d0 / (d1 - d0)
                    tc = float(t[k] + frac * (t[k + 1] - t[k]))
                    events.append(CrossingEvent(float(t[k]), float(t[k + 1]), (i + 1, j + 1), 0.0, "crossing", tc))

    return EigenPath(t_grid=t.copy(), values=values, n=n, pairing=pairing,
                     crossing_events=tuple(events), min_overlaps=min_ov)


def rectangle_family_path(mu0: Sequence[float], mu1: Sequence[float], steps: int, h: float) -> DeformationPath:
    """Interpolation path between two rectangles meshed with the same cell counts."""
    from .geometry import interpolation_path, make_orthotope, mesh_domain

    L0 = np.asarray(mu0, dtype=float) * np.pi
    L1 = np.asarray(mu1, dtype=float) * np.pi
    div = [max(2, int(math.ceil(max(a, b) / h - 1e-12))) for a, b in zip(L0, L1)]
    d0 = mesh_domain(make_orthotope(mu0), h, divisions=div)
    d1 = mesh_domain(make_orthotope(mu1), h, divisions=div)
    return interpolation_path(d0, d1, steps)


# ---------------------------------------------------------------------------
# Boundary perturbations and the Hadamard formula
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryPerturbation:
    """Normal speed ``V . nu`` sampled at quadrature points of a boundary part.

    For orthotope faces ``face = (axis, side)`` with side ``+1`` for
    ``x_axis = mu_axis * pi`` and ``-1`` for ``x_axis = 0``. For meshes
    ``edges`` holds the boundary-edge index of each point.
    """

    points: np.ndarray
    normals: np.ndarray
    speeds: np.ndarray
    weights: np.ndarray
    face: tuple[int, int] | None = None
    edges: np.ndarray | None = None

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise InvalidParameterError("boundary quadrature weights must be positive")

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))

    def scaled(self, c: float) -> "BoundaryPerturbation":
        return BoundaryPerturbation(self.points, self.normals, c * self.speeds, self.weights, self.face, self.edges)


def _speed_values(speed, points, normals) -> np.ndarray:
    if callable(speed):
        v = np.asarray(speed(points), dtype=float)
        if v.ndim == 2:  # a vector field: take its normal component
            v = np.sum(v * normals, axis=1)
        return v
    return np.full(len(points), float(speed))


def orthotope_face(ortho: Orthotope, speed=1.0, *, axis: int = -1, side: int = 1,
                   cells: int = 32, order: int = 8) -> BoundaryPerturbation:
    """Gauss quadrature on one face of an orthotope with a prescribed normal speed.

    ``speed`` is a constant, a scalar function of the face points, or a
    vector field whose normal component is taken.
    """
    d = ortho.d
    axis = axis % d
    L = ortho.lengths
    x, w = np.polynomial.legendre.leggauss(order)
    other = [i for i in range(d) if i != axis]
    if other:
        pts_axes, w_axes = [], []
        for i in other:
            hc = L[i] / cells
            left = np.arange(cells) * hc
            pts_axes.append((left[:, None] + 0.5 * hc * (x + 1)[None]).ravel())
            w_axes.append(np.tile(0.5 * hc * w, cells))
        G = np.meshgrid(*pts_axes, indexing="ij")
        W = np.meshgrid(*w_axes, indexing="ij")
        n_pts = G[0].size
        points = np.zeros((n_pts, d))
        for i, g in zip(other, G):
            points[:, i] = g.ravel()
        weights = np.prod([wg.ravel() for wg in W], axis=0)
    else:
        points = np.zeros((1, d))
        weights = np.ones(1)
    points[:, axis] = L[axis] if side > 0 else 0.0
    normals = np.zeros_like(points)
    normals[:, axis] = 1.0 if side > 0 else -1.0
    speeds = _speed_values(speed, points, normals)
    return BoundaryPerturbation(points, normals, speeds, weights, face=(axis, 1 if side > 0 else -1))


def mesh_boundary(mesh: MeshedDomain, speed=1.0, *, select: Callable[[np.ndarray], np.ndarray] | None = None) -> BoundaryPerturbation:
    """Two-point Gauss quadrature on (selected) boundary edges of a mesh.

    ``select`` is a predicate on edge midpoints choosing the part Gamma.
    """
    a = mesh.vertices[mesh.boundary_edges[:, 0]]
    b = mesh.vertices[mesh.boundary_edges[:, 1]]
    keep = np.ones(len(a), dtype=bool) if select is None else np.asarray(select(0.5 * (a + b)), dtype=bool)
    idx = np.flatnonzero(keep)
    g = np.array([0.5 - 0.5 / math.sqrt(3), 0.5 + 0.5 / math.sqrt(3)])
    lengths = np.linalg.norm(b[idx] - a[idx], axis=1)
    points = (a[idx][:, None, :] + g[None, :, None] * (b[idx] - a[idx])[:, None, :]).reshape(-1, 2)
    weights = np.repeat(0.5 * lengths, 2)
    normals = np.repeat(mesh.normals[idx], 2, axis=0)
    edges = np.repeat(idx, 2)
    speeds = _speed_values(speed, points, normals)
    return BoundaryPerturbation(points, normals, speeds, weights, edges=edges)


def normal_derivative_constant(sys: EigenSystem, mode: int, axis: int = -1) -> float:
    """Constant ``c`` with ``d phi / d nu = c * prod_{i != axis} sin(k_i x_i / mu_i)`` on the far face."""
    m = sys.modes[mode]
    axis = axis % sys.dim
    mu = sys.domain.mu
    return m.norm_constant * (m.K[axis] / mu[axis]) * math.cos(m.K[axis] * math.pi)


def _normal_derivatives(sys: EigenSystem, pert: BoundaryPerturbation, modes: Sequence[int]) -> np.ndarray:
    """``d phi / d nu`` at the perturbation points for the given 0-based modes, shape (P, len(modes))."""
    if sys.is_closed_form:
        if pert.face is None:
            raise InvalidParameterError("closed-form systems need an orthotope face perturbation")
        axis, side = pert.face
        mu = np.asarray(sys.domain.mu)
        out = np.empty((len(pert.points), len(modes)))
        for c, i in enumerate(modes):
            K = np.asarray(sys.modes[i].K, dtype=float)
            rest = np.prod(np.delete(np.sin(pert.points * (K / mu)), axis, axis=1), axis=1)
            if side > 0:
                const = normal_derivative_constant(sys, i, axis)
            else:
                const = -sys.modes[i].norm_constant * K[axis] / mu[axis]
            out[:, c] = const * rest
        return out
    if pert.edges is None:
        raise InvalidParameterError("mesh systems need a mesh boundary perturbation")
    mesh = sys.domain
    tri_of_edge = _edge_triangles(mesh)
    tri = tri_of_edge[pert.edges]
    grads = p1_gradients(mesh)[tri]  # (P, 3, 2)
    vals = sys.vectors[mesh.triangles[tri]][:, :, list(modes)]  # (P, 3, k)
    g = np.einsum("pvd,pvk->pkd", grads, vals)
    return np.einsum("pkd,pd->pk", g, pert.normals)


def _edge_triangles(mesh: MeshedDomain) -> np.ndarray:
    lookup = {}
    for t, tri in enumerate(mesh.triangles.tolist()):
        for i in range(3):
            lookup[(tri[i], tri[(i + 1) % 3])] = t
    return np.array([lookup[(i, j)] for i, j in mesh.boundary_edges.tolist()], dtype=np.int64)


def _resolve_mode(sys: EigenSystem, l) -> int:
    if isinstance(l, (tuple, list)):
        if not sys.is_closed_form:
            raise InvalidParameterError("multi-index modes need a closed-form system")
        K = tuple(int(k) for k in l)
        for i, m in enumerate(sys.modes):
            if m.K == K:
                return i
        raise InvalidParameterError(f"mode {K} is not among the first {sys.n} modes")
    return sys._check_index(int(l))


def _cluster_of(sys: EigenSystem, i: int, gap_tol: float) -> list[int]:
    lam = sys.lambdas
    lo = i
    while lo > 0 and lam[lo] - lam[lo - 1] < gap_tol * (1.0 + lam[lo - 1]):
        lo -= 1
    hi = i
    while hi < sys.n - 1 and lam[hi + 1] - lam[hi] < gap_tol * (1.0 + lam[hi]):
        hi += 1
    return list(range(lo, hi + 1))


def hadamard_derivative(sys: EigenSystem, pert: BoundaryPerturbation, l, *, gap_tol: float = 1e-6) -> float:
    """``-int_Gamma (d phi_l / d nu)^2 (V . nu) d sigma``.

    ``l`` is a 1-based mode number, which must be a simple eigenvalue, or
    (closed form only) a multi-index ``K``. A multi-index inside a
    degenerate cluster is accepted only when its boundary cross terms with
    the other cluster members vanish, in which case the formula gives the
    derivative of that separable branch.
    """
    i = _resolve_mode(sys, l)
    cluster = _cluster_of(sys, i, gap_tol)
    if len(cluster) > 1:
        if not isinstance(l, (tuple, list)):
            raise SimplicityError(f"lambda_{i + 1} lies in a degenerate cluster {[c + 1 for c in cluster]}")
        dn = _normal_derivatives(sys, pert, cluster)
        C = dn.T @ (pert.weights[:, None] * pert.speeds[:, None] * dn)
        j = cluster.index(i)
        off = np.delete(C[j], j)
        if np.any(np.abs(off) > 1e-10 * max(1.0, abs(C[j, j]))):
            raise SimplicityError(f"mode {tuple(l)} couples to its degenerate partners on Gamma")
        return float(-C[j, j])
    dn = _normal_derivatives(sys, pert, [i])[:, 0]
    return float(-np.sum(pert.weights * pert.speeds * dn**2))


@dataclass(frozen=True)
class FDCheck:
    formula: float
    fd_slope: float
    relative_error: float
    step: float

    def to_dict(self) -> dict:
        return {"formula": self.formula, "fd_slope": self.fd_slope, "relative_error": self.relative_error, "step": self.step}


def _rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _branch_value(sys: EigenSystem, reference: np.ndarray, window: float = 0.05) -> tuple[float, int]:
    """Rayleigh quotient of ``reference`` compressed onto the discrete cluster it lies in.

    Used for a separable branch through a degenerate point: a mesh splits
    the degenerate pair by a fixed amount, which cancels in a central
    difference of the compressed quotient but not in the individual
    discrete eigenvalues. Returns the value and the index of the dominant
    discrete mode.
    """
    _, M = assemble_p1(sys.domain)
    c = sys.vectors.T @ (M @ reference)
    j = int(np.argmax(np.abs(c)))
    lam = sys.lambdas
    near = np.abs(lam - lam[j]) < window * (1.0 + lam[j])
    w = c[near] ** 2
    return float(np.sum(w * lam[near]) / np.sum(w)), j


def fd_shape_check(mesh: MeshedDomain, field: VectorField2D, l, dt: float, *,
                   hadamard_sys: EigenSystem | None = None, pert: BoundaryPerturbation | None = None,
                   n: int | None = None, crossing_tol: float = CROSSING_TOL) -> FDCheck:
    """Compare the Hadamard formula with a central difference of FEM eigenvalues.

    The family is ``exp(t V)(mesh)`` for ``t = +-dt``. The formula side is
    evaluated on ``hadamard_sys`` with ``pert`` when given (for instance
    the closed form of an orthotope), otherwise on the FEM system of
    ``mesh`` with the normal component of ``field`` on its boundary.

    For a multi-index ``l`` the branch is followed through the overlap with
    that closed-form mode sampled at the base vertices, which allows
    checking a separable branch through a degenerate point.
    """
    idx = _resolve_mode(hadamard_sys, l) if isinstance(l, (tuple, list)) else int(l) - 1
    n = n or max(idx + 3, 4)
    base = fem_spectrum(mesh, n)
    if hadamard_sys is None:
        hadamard_sys = base
        pert = mesh_boundary(mesh, field)
    elif pert is None:
        raise InvalidParameterError("pert is required together with hadamard_sys")
    formula = hadamard_derivative(hadamard_sys, pert, l)

    reference = None
    if isinstance(l, (tuple, list)):
        reference = hadamard_sys.modes[idx](mesh.vertices, hadamard_sys.domain.mu)
    lams = []
    for s in (-dt, dt):
        sys_s = fem_spectrum(flow_deform(mesh, field, s), n)
        lam = sys_s.lambdas
        if reference is not None:
            value, _ = _branch_value(sys_s, reference)
            lams.append(value)
            continue
        for nb in (idx - 1, idx + 1):
            if 0 <= nb < sys_s.n and abs(lam[nb] - lam[idx]) < crossing_tol * (1.0 + lam[idx]):
                raise ValidityError(f"lambda_{idx + 1} is not separated at t={s:+g}; a crossing lies inside [-dt, dt]")
        # a crossing strictly inside the interval shows up as the branch changing sorted position
        _, M = assemble_p1(sys_s.domain)
        ov = np.abs(base.vectors[:, idx] @ (M @ sys_s.vectors))
        if int(np.argmax(ov)) != idx or ov[idx] <= OVERLAP_MIN:
            raise ValidityError(f"the branch of lambda_{idx + 1} changes position between t=0 and t={s:+g}; "
                                "a crossing lies inside [-dt, dt]")
        lams.append(lam[idx])
    if reference is None:
        lam0 = base.lambdas
        for nb in (idx - 1, idx + 1):
            if 0 <= nb < base.n and abs(lam0[nb] - lam0[idx]) < crossing_tol * (1.0 + lam0[idx]):
                raise ValidityError(f"lambda_{idx + 1} is not simple at t=0")
    slope = (lams[1] - lams[0]) / (2.0 * dt)
    return FDCheck(float(formula), float(slope), float(_rel_err(formula, slope)), float(dt))


def orthotope_stretch_slope(ortho: Orthotope, K: Sequence[int], axis: int, dt: float) -> float:
    """Central difference of ``sum (k_i/mu_i)^2`` under ``mu_axis -> mu_axis + t/pi``.

    The far face moves with unit normal speed; used as a closed-form check of
    the Hadamard formula and of second-order convergence in ``dt``.
    """
    K = np.asarray(K, dtype=float)

    def lam(t):
        mu = np.array(ortho.mu, dtype=float)
        mu[axis] += t / np.pi
        return float(np.sum((K / mu) ** 2))

    return (lam(dt) - lam(-dt)) / (2.0 * dt)


# ---------------------------------------------------------------------------
# Potential perturbations
# ---------------------------------------------------------------------------


def _check_simple(sys: EigenSystem, i: int, gap_tol: float) -> None:
    if len(_cluster_of(sys, i, gap_tol)) > 1:
        raise SimplicityError(f"lambda_{i + 1} is degenerate; the first-order formula does not apply")


def potential_derivative(sys: EigenSystem, V_pot, k: int, *, gap_tol: float = 1e-6) -> float:
    """``int V phi_k^2`` (k is 1-based), the eps-derivative of ``lambda_k(-Laplacian + eps V)`` at 0."""
    i = sys._check_index(k)
    _check_simple(sys, i, gap_tol)
    quad = sys.quadrature
    return float(np.sum(quad.weights * _potential_values(V_pot, quad) * sys.quad_values[:, i] ** 2))


def _potential_values(V_pot, quad) -> np.ndarray:
    if callable(V_pot):
        v = V_pot(quad.points)
    else:
        v = np.asarray(V_pot, dtype=float)
        if v.ndim == 0:
            return np.full(len(quad.points), float(v))
        v = v[quad.cells]
    v = np.asarray(v, dtype=float)
    return np.broadcast_to(v, (len(quad.points),)) if v.ndim == 0 else v


def interval_spectrum(length: float, n: int, *, cells: int = 4000, potential=None, eps: float = 0.0) -> np.ndarray:
    """Smallest ``n`` eigenvalues of ``-u'' + eps V u`` on ``(0, length)``, Dirichlet.

    Lowest-order (mass-lumped P1, equivalently three-point) discretization
    on a uniform grid; tridiagonal, so solved with LAPACK's tridiagonal
    eigensolver.
    """
    hh = length / cells
    x = np.arange(1, cells) * hh
    diag = np.full(cells - 1, 2.0 / hh**2)
    if potential is not None and eps != 0.0:
        v = potential(x[:, None]) if callable(potential) else potential
        diag = diag + eps * np.broadcast_to(np.asarray(v, dtype=float).reshape(-1), diag.shape)
    off = np.full(cells - 2, -1.0 / hh**2)
    return scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, n - 1))


def fd_potential_check(dom, V_pot, k: int, d_eps: float, *, h: float = 0.05, cells: int = 4000,
                       gap_tol: float = 1e-6) -> FDCheck:
    """Central difference in ``eps`` of ``lambda_k(-Laplacian + eps V)`` versus ``int V phi_k^2``.

    ``dom`` is an orthotope (closed-form formula; 1D finite differences or
    2D FEM on a mesh of size ``h`` for the eigenvalues) or a mesh (FEM on
    both sides). The potential enters the discrete operator mass-lumped.
    """
    if isinstance(dom, Orthotope):
        ref = orthotope_spectrum(dom, k + 1)
        formula = potential_derivative(ref, V_pot, k, gap_tol=gap_tol)
        if dom.d == 1:
            L = dom.lengths[0]
            lp = interval_spectrum(L, k + 1, cells=cells, potential=V_pot, eps=d_eps)
            lm = interval_spectrum(L, k + 1, cells=cells, potential=V_pot, eps=-d_eps)
        elif dom.d == 2:
            from .geometry import mesh_domain

            mesh = mesh_domain(dom, h)
            lp = fem_spectrum(mesh, k + 1, potential=V_pot, potential_scale=d_eps).lambdas
            lm = fem_spectrum(mesh, k + 1, potential=V_pot, potential_scale=-d_eps).lambdas
        else:
            raise InvalidParameterError("numeric check supports d = 1 or 2")
    elif isinstance(dom, MeshedDomain):
        base = fem_spectrum(dom, k + 1)
        formula = potential_derivative(base, V_pot, k, gap_tol=gap_tol)
        lp = fem_spectrum(dom, k + 1, potential=V_pot, potential_scale=d_eps).lambdas
        lm = fem_spectrum(dom, k + 1, potential=V_pot, potential_scale=-d_eps).lambdas
    else:
        raise InvalidParameterError("dom must be an Orthotope or a MeshedDomain")
    for lam in (lp, lm):
        if len(lam) > k and lam[k] - lam[k - 1] < gap_tol * (1.0 + lam[k - 1]):
            raise ValidityError(f"lambda_{k} is not simple for |eps| <= {d_eps}")
        if k >= 2 and lam[k - 1] - lam[k - 2] < gap_tol * (1.0 + lam[k - 2]):
            raise ValidityError(f"lambda_{k} is not simple for |eps| <= {d_eps}")
    slope = (lp[k - 1] - lm[k - 1]) / (2.0 * d_eps)
    return FDCheck(float(formula), float(slope), float(_rel_err(formula, float(slope))), float(d_eps))
