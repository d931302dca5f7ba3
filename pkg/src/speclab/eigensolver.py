"""Laplacian-Dirichlet eigenpairs.

Orthotopes are solved in closed form by separation of variables. Planar
meshes are solved with P1 finite elements: the generalized problem
``K u = lambda M u`` on interior vertices, by shift-invert Lanczos at
shift 0.

Mode numbers in the public API are 1-based (``index=1`` is the ground
state); arrays such as ``EigenSystem.lambdas`` are ordinary 0-based arrays.
"""
from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.spatial import cKDTree
from scipy.special import j0, j1, jn_zeros

from .errors import ConvergenceError, InvalidParameterError, PointOutsideError, PreconditionError
from .exact import QuadSurd
from .geometry import Disk, MeshedDomain, Orthotope, mesh_domain

GAP_TOL = 1e-6
RESIDUAL_TOL = 1e-9

# degree-5 seven-point triangle rule (barycentric coordinates, weights summing to 1)
_A1, _B1 = 0.059715871789770, 0.470142064105115
_A2, _B2 = 0.797426985353087, 0.101286507323456
_TRI_BARY = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3],
        [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
        [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2],
    ]
)
_TRI_W = np.array([0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3)


@dataclass(frozen=True)
class OrthotopeMode:
    """Separable mode ``C * prod_i sin(k_i x_i / mu_i)``."""

    K: tuple[int, ...]
    lam: float
    norm_constant: float
    lam_exact: QuadSurd | None = None

    def __call__(self, points, mu) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        k = np.asarray(self.K, dtype=float)
        return self.norm_constant * np.prod(np.sin(p * (k / np.asarray(mu))), axis=1)

    def gradient(self, points, mu) -> np.ndarray:
        """Gradient at ``points``, shape (P, d)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        freq = np.asarray(self.K, dtype=float) / np.asarray(mu)
        s, c = np.sin(p * freq), np.cos(p * freq)
        out = np.empty_like(p)
        for a in range(p.shape[1]):
            others = np.prod(np.delete(s, a, axis=1), axis=1)
            out[:, a] = self.norm_constant * freq[a] * c[:, a] * others
        return out


@dataclass(frozen=True)
class Quadrature:
    """Cellwise quadrature: points, weights and the cell each point belongs to."""

    points: np.ndarray
    weights: np.ndarray
    cells: np.ndarray
    cell_areas: np.ndarray
    cell_centroids: np.ndarray

    @property
    def n_cells(self) -> int:
        return len(self.cell_areas)

    def cell_sum(self, values: np.ndarray) -> np.ndarray:
        """Per-cell integrals of point values (leading axis = quadrature points)."""
        v = np.asarray(values)
        out = np.zeros((self.n_cells,) + v.shape[1:])
        np.add.at(out, self.cells, self.weights.reshape((-1,) + (1,) * (v.ndim - 1)) * v)
        return out


def orthotope_quadrature(ortho: Orthotope, cells: int, order: int) -> Quadrature:
    """Tensor Gauss-Legendre rule on a uniform ``cells**d`` grid of the box."""
    x, w = np.polynomial.legendre.leggauss(order)
    axes_pts, axes_w, axes_c = [], [], []
    for L in ortho.lengths:
        hcell = L / cells
        left = np.arange(cells) * hcell
        axes_pts.append((left[:, None] + 0.5 * hcell * (x + 1.0)[None, :]).ravel())
        axes_w.append(np.tile(0.5 * hcell * w, cells))
        axes_c.append(np.repeat(np.arange(cells), order))
    grids = np.meshgrid(*axes_pts, indexing="ij")
    points = np.column_stack([g.ravel() for g in grids])
    weights = np.ones(len(points))
    for wgt in np.meshgrid(*axes_w, indexing="ij"):
        weights *= wgt.ravel()
    cidx = np.meshgrid(*axes_c, indexing="ij")
    cells_flat = np.ravel_multi_index(tuple(c.ravel() for c in cidx), (cells,) * ortho.d)
    hcell = ortho.lengths / cells
    centres = np.meshgrid(*[(np.arange(cells) + 0.5) * hc for hc in hcell], indexing="ij")
    centroids = np.column_stack([c.ravel() for c in centres])
    areas = np.full(cells**ortho.d, float(np.prod(hcell)))
    return Quadrature(points, weights, cells_flat, areas, centroids)


def mesh_quadrature(mesh: MeshedDomain) -> tuple[Quadrature, sp.csr_matrix]:
    """Degree-5 rule on every triangle, plus the P1 interpolation matrix to its points."""
    T = len(mesh.triangles)
    q = len(_TRI_W)
    corners = mesh.vertices[mesh.triangles]
    points = np.einsum("qk,tkd->tqd", _TRI_BARY, corners).reshape(-1, 2)
    weights = (mesh.cell_areas[:, None] * _TRI_W[None, :]).ravel()
    cells = np.repeat(np.arange(T), q)
    rows = np.repeat(np.arange(T * q), 3)
    cols = np.repeat(mesh.triangles, q, axis=0).ravel()
    vals = np.tile(_TRI_BARY, (T, 1)).ravel()
    P = sp.csr_matrix((vals, (rows, cols)), shape=(T * q, mesh.n_vertices))
    quad = Quadrature(points, weights, cells, np.array(mesh.cell_areas), mesh.centroids)
    return quad, P


# ---------------------------------------------------------------------------
# P1 assembly
# ---------------------------------------------------------------------------


def p1_gradients(mesh: MeshedDomain) -> np.ndarray:
    """Gradients of the three barycentric basis functions, shape (T, 3, 2)."""
    c = mesh.vertices[mesh.triangles]
    area2 = 2.0 * mesh.cell_areas
    g = np.empty((len(c), 3, 2))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        e = c[:, k] - c[:, j]
        g[:, i, 0] = -e[:, 1] / area2
        g[:, i, 1] = e[:, 0] / area2
    return g


def assemble_p1(mesh: MeshedDomain) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Stiffness and consistent mass matrices on all vertices."""
    g = p1_gradients(mesh)
    A = mesh.cell_areas
    ke = np.einsum("tid,tjd->tij", g, g) * A[:, None, None]
    me = (np.ones((3, 3)) + np.eye(3))[None] * (A / 12.0)[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    V = mesh.n_vertices
    K = sp.csr_matrix((ke.ravel(), (rows, cols)), shape=(V, V))
    M = sp.csr_matrix((me.ravel(), (rows, cols)), shape=(V, V))
    return K, M


def lumped_mass(mesh: MeshedDomain) -> np.ndarray:
    m = np.zeros(mesh.n_vertices)
    np.add.at(m, mesh.triangles.ravel(), np.repeat(mesh.cell_areas / 3.0, 3))
    return m


# ---------------------------------------------------------------------------
# Eigen systems
# ---------------------------------------------------------------------------


def _gap_flags(lambdas: np.ndarray, gap_tol: float) -> np.ndarray:
    lam = np.asarray(lambdas)
    return np.diff(lam) < gap_tol * (1.0 + lam[:-1])


@dataclass(frozen=True)
class EigenSystem:
    """First ``n`` eigenpairs of the Laplacian-Dirichlet operator on one domain.

    Exactly one of ``modes`` (closed form on an orthotope) and ``vectors``
    (nodal P1 values on a mesh, zero on the boundary) is set.
    Eigenfunctions are L2-normalized; each is signed so that its sample of
    largest magnitude is positive (nodal: vertices, ties to the lowest
    index; closed form: the lobe at the origin corner, which is the
    lexicographically first maximizer).
    """

    lambdas: np.ndarray
    domain: Orthotope | MeshedDomain
    modes: tuple[OrthotopeMode, ...] | None = None
    vectors: np.ndarray | None = None
    gap_flags: np.ndarray = field(default=None)
    residuals: np.ndarray | None = None
    quad_cells: int | None = None
    quad_order: int = 6
    normalization: str = "L2"

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float)
        lam.flags.writeable = False
        object.__setattr__(self, "lambdas", lam)
        if self.gap_flags is None:
            object.__setattr__(self, "gap_flags", _gap_flags(lam, GAP_TOL))
        if self.vectors is not None:
            self.vectors.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def is_closed_form(self) -> bool:
        return self.modes is not None

    @property
    def sign_convention(self) -> str:
        if self.is_closed_form:
            return "closed-form: positive on the lobe at the origin corner (first maximizer)"
        return "nodal: vertex of largest |value| positive, ties to lowest vertex index"

    @property
    def dim(self) -> int:
        return self.domain.d if isinstance(self.domain, Orthotope) else 2

    def domain_volume(self) -> float:
        return self.domain.volume if isinstance(self.domain, Orthotope) else self.domain.area

    def _check_index(self, index: int) -> int:
        if not 1 <= index <= self.n:
            raise InvalidParameterError(f"mode number must be in 1..{self.n}, got {index}")
        return index - 1

    # -- evaluation ---------------------------------------------------------

    def values(self, points, *, strict: bool = False) -> np.ndarray:
        """Values of all modes at ``points``, shape (P, n); zero outside the domain."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_closed_form:
            inside = self.domain.contains(p)
            out = np.zeros((len(p), self.n))
            if np.any(inside):
                out[inside] = np.column_stack([m(p[inside], self.domain.mu) for m in self.modes])
            return out
        tri, bary = locate_points(self.domain, p, strict=strict)
        out = np.zeros((len(p), self.n))
        ok = tri >= 0
        if np.any(ok):
            corners = self.domain.triangles[tri[ok]]
            out[ok] = np.einsum("pk,pkn->pn", bary[ok], self.vectors[corners])
        return out

    @cached_property
    def _quad(self):
        if self.is_closed_form:
            return orthotope_quadrature(self.domain, self.quad_cells, self.quad_order), None
        return mesh_quadrature(self.domain)

    @property
    def quadrature(self) -> Quadrature:
        return self._quad[0]

    @cached_property
    def quad_values(self) -> np.ndarray:
        """Eigenfunction values at the quadrature points, shape (Q, n)."""
        quad, P = self._quad
        if P is None:
            return np.column_stack([m(quad.points, self.domain.mu) for m in self.modes])
        return P @ self.vectors

    @cached_property
    def fem_matrices(self) -> tuple[sp.csr_matrix, sp.csr_matrix]:
        if self.is_closed_form:
            raise InvalidParameterError("closed-form systems have no FEM matrices")
        return assemble_p1(self.domain)

    def gram(self) -> np.ndarray:
        """L2 inner products of the eigenfunctions (mass matrix for nodal systems)."""
        if self.is_closed_form:
            w = self.quadrature.weights
            v = self.quad_values
            return v.T @ (w[:, None] * v)
        _, M = self.fem_matrices
        return self.vectors.T @ (M @ self.vectors)

    # -- export -------------------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "lambdas": self.lambdas.tolist(),
            "normalization": self.normalization,
            "sign_convention": self.sign_convention,
            "gap_flags": self.gap_flags.tolist(),
        }
        if self.is_closed_form:
            doc["kind"] = "closed_form"
            doc["mu"] = list(self.domain.mu)
            doc["modes"] = [
                {"K": list(m.K), "lambda": m.lam, "norm_constant": m.norm_constant} for m in self.modes
            ]
        else:
            doc["kind"] = "nodal"
            doc["mesh_hash"] = self.domain.fingerprint()
            doc["nodal_values"] = self.vectors.T.tolist()
            doc["residuals"] = self.residuals.tolist()
        return doc

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "lambda"])
        for i, lam in enumerate(self.lambdas, start=1):
            w.writerow([i, repr(float(lam))])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# Closed form
# ---------------------------------------------------------------------------


def orthotope_spectrum(ortho: Orthotope, n: int, *, cells: int | None = None, quad_order: int = 6) -> EigenSystem:
    """The ``n`` smallest eigenvalues ``sum (k_i/mu_i)^2`` of an orthotope.

    Multi-indices are enumerated with a min-heap frontier starting at
    ``(1, ..., 1)``; ties are broken lexicographically in ``K``. When the
    orthotope carries exact ``inv_mu_sq`` values, ordering and ties are
    decided exactly.

    ``cells`` and ``quad_order`` set the cellwise Gauss-Legendre rule used
    for integrals against these modes (default 64, 48 or 8 cells per axis
    for d = 1, 2, >= 3).
    """
    if n < 1:
        raise InvalidParameterError("n must be at least 1")
    d = ortho.d
    inv = np.array([1.0 / m**2 for m in ortho.mu])
    exact = ortho.inv_mu_sq

    def key(K):
        if exact is not None:
            lam_e = sum((k * k * q for k, q in zip(K, exact)), QuadSurd(0))
            return (lam_e, K)
        return (float(np.dot(np.square(K), inv)), K)

    start = (1,) * d
    heap = [key(start)]
    seen = {start}
    norm = float(np.prod(np.sqrt(2.0 / (np.asarray(ortho.mu) * np.pi))))
    modes = []
    while len(modes) < n:
        lam_key, K = heapq.heappop(heap)
        lam_f = float(np.dot(np.square(K), inv))
        modes.append(OrthotopeMode(K=K, lam=lam_f, norm_constant=norm,
                                   lam_exact=lam_key if exact is not None else None))
        for i in range(d):
            nK = K[:i] + (K[i] + 1,) + K[i + 1:]
            if nK not in seen:
                seen.add(nK)
                heapq.heappush(heap, key(nK))
    if cells is None:
        cells = {1: 64, 2: 48}.get(d, 8)
    lambdas = np.array([m.lam for m in modes])
    if exact is not None:
        flags = np.array([modes[i].lam_exact == modes[i + 1].lam_exact for i in range(n - 1)], dtype=bool)
    else:
        flags = _gap_flags(lambdas, GAP_TOL)
    return EigenSystem(lambdas=lambdas, domain=ortho, modes=tuple(modes), gap_flags=flags,
                       quad_cells=cells, quad_order=quad_order)


# ---------------------------------------------------------------------------
# Finite elements
# ---------------------------------------------------------------------------


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vectors), axis=0)
    s = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    s[s == 0] = 1.0
    return vectors * s


def _m_orthonormalize(U: np.ndarray, M) -> np.ndarray:
    """Modified Gram-Schmidt in the M inner product (used inside clusters)."""
    U = U.copy()
    for j in range(U.shape[1]):
        for i in range(j):
            U[:, j] -= (U[:, i] @ (M @ U[:, j])) * U[:, i]
        U[:, j] /= math.sqrt(U[:, j] @ (M @ U[:, j]))
    return U


def solve_pencil(K: sp.spmatrix, M: sp.spmatrix, n: int, *, max_restarts: int = 3,
                 residual_tol: float = RESIDUAL_TOL, gap_tol: float = GAP_TOL):
    """Smallest ``n`` eigenpairs of a sparse symmetric pencil, M-orthonormal.

    Small problems go through dense LAPACK; larger ones through ARPACK in
    shift-invert mode at shift 0 with a deterministic start vector.
    Returns ``(lambdas, vectors, residuals)`` with residuals
    ``||K u - lam M u|| / ||u||``.
    """
    N = K.shape[0]
    if not 1 <= n < N:
        raise InvalidParameterError(f"n must satisfy 1 <= n < {N} (interior unknowns)")
    if N <= 400:
        lam, U = scipy.linalg.eigh(K.toarray(), M.toarray(), subset_by_index=(0, n - 1))
    else:
        ncv = min(N - 1, max(n + 5, 2 * n, 20))
        v0 = np.ones(N)
        tol = 0.0
        for attempt in range(max_restarts + 1):
            try:
                lam, U = spla.eigsh(K.tocsc(), k=n, M=M.tocsc(), sigma=0.0, which="LM",
                                    ncv=ncv, v0=v0, tol=tol, maxiter=20 * N)
                break
            except spla.ArpackNoConvergence as exc:
                if attempt == max_restarts:
                    raise ConvergenceError("shift-invert iteration did not converge") from exc
                ncv = min(N - 1, 2 * ncv)
        order = np.argsort(lam)
        lam, U = lam[order], U[:, order]
    U = U / np.sqrt(np.einsum("ij,ij->j", U, M @ U))
    flags = _gap_flags(lam, gap_tol)
    i = 0
    while i < n:
        j = i
        while j < n - 1 and flags[j]:
            j += 1
        if j > i:
            U[:, i:j + 1] = _m_orthonormalize(U[:, i:j + 1], M)
        i = j + 1
    R = K @ U - (M @ U) * lam
    res = np.linalg.norm(R, axis=0) / np.linalg.norm(U, axis=0)
    if np.any(res > residual_tol):
        raise ConvergenceError(
            f"eigen residual {float(np.max(res)):.3e} exceeds {residual_tol:.1e}", residual=float(np.max(res))
        )
    return lam, U, res


def fem_spectrum(dom: MeshedDomain, n: int, *, gap_tol: float = GAP_TOL,
                 residual_tol: float = RESIDUAL_TOL, potential=None, potential_scale: float = 0.0) -> EigenSystem:
    """``n`` smallest P1 eigenpairs on a mesh, Dirichlet rows eliminated.

    ``potential`` (a function of (P, 2) points, or a constant) adds
    ``potential_scale * V`` as a mass-lumped diagonal term, i.e. solves
    for the operator ``-Laplacian + potential_scale * V``.
    """
    K, M = assemble_p1(dom)
    if potential is not None and potential_scale != 0.0:
        vals = potential(dom.vertices) if callable(potential) else potential
        vals = np.broadcast_to(np.asarray(vals, dtype=float), (dom.n_vertices,))
        K = K + sp.diags(potential_scale * vals * lumped_mass(dom))
    inner = dom.interior_vertices
    Ki = K[inner][:, inner]
    Mi = M[inner][:, inner]
    lam, Ui, res = solve_pencil(Ki, Mi, n, residual_tol=residual_tol, gap_tol=gap_tol)
    U = np.zeros((dom.n_vertices, n))
    U[inner] = Ui
    U = _fix_signs(U)
    return EigenSystem(lambdas=lam, domain=dom, vectors=U, gap_flags=_gap_flags(lam, gap_tol), residuals=res)


# ---------------------------------------------------------------------------
# Point location and evaluation
# ---------------------------------------------------------------------------


def _barycentric(mesh: MeshedDomain, tri: np.ndarray, p: np.ndarray) -> np.ndarray:
    c = mesh.vertices[mesh.triangles[tri]]
    v0, v1 = c[:, 1] - c[:, 0], c[:, 2] - c[:, 0]
    v2 = p - c[:, 0]
    den = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]
    b1 = (v2[:, 0] * v1[:, 1] - v2[:, 1] * v1[:, 0]) / den
    b2 = (v0[:, 0] * v2[:, 1] - v0[:, 1] * v2[:, 0]) / den
    return np.column_stack([1.0 - b1 - b2, b1, b2])


def _boundary_distance(mesh: MeshedDomain, p: np.ndarray) -> np.ndarray:
    a = mesh.vertices[mesh.boundary_edges[:, 0]][None]
    b = mesh.vertices[mesh.boundary_edges[:, 1]][None]
    ab = b - a
    q = p[:, None, :]
    s = np.clip(np.sum((q - a) * ab, axis=2) / np.sum(ab * ab, axis=2), 0.0, 1.0)
    return np.min(np.linalg.norm(q - (a + s[..., None] * ab), axis=2), axis=1)


def locate_points(mesh: MeshedDomain, points, *, strict: bool = False, tol: float = 1e-12):
    """Containing triangle (or -1) and barycentric coordinates for each point.

    Points outside the mesh get -1. With ``strict=True`` a point farther
    than 1e-9 outside raises :class:`PointOutsideError`.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    tri_out = -np.ones(len(p), dtype=np.int64)
    bary_out = np.zeros((len(p), 3))
    tree = cKDTree(mesh.centroids)
    k = min(16, len(mesh.triangles))
    _, cand = tree.query(p, k=k)
    cand = np.atleast_2d(cand).reshape(len(p), k)
    todo = np.ones(len(p), dtype=bool)
    for j in range(k):
        idx = np.flatnonzero(todo)
        if len(idx) == 0:
            break
        t = cand[idx, j]
        b = _barycentric(mesh, t, p[idx])
        hit = np.all(b >= -tol, axis=1)
        tri_out[idx[hit]] = t[hit]
        bary_out[idx[hit]] = b[hit]
        todo[idx[hit]] = False
    for i in np.flatnonzero(todo):
        T = np.arange(len(mesh.triangles))
        b = _barycentric(mesh, T, np.repeat(p[i:i + 1], len(T), axis=0))
        hit = np.flatnonzero(np.all(b >= -tol, axis=1))
        if len(hit):
            tri_out[i], bary_out[i] = hit[0], b[hit[0]]
            todo[i] = False
    if strict and np.any(todo):
        far = _boundary_distance(mesh, p[todo]) > 1e-9
        if np.any(far):
            raise PointOutsideError(f"{int(np.sum(far))} points lie outside the mesh")
    return tri_out, bary_out


def evaluate_eigenfunction(sys: EigenSystem, index: int, points, *, strict: bool = False) -> np.ndarray:
    """Values of mode ``index`` (1-based) at ``points``; zero outside the domain."""
    i = sys._check_index(index)
    p = np.atleast_2d(np.asarray(points, dtype=float))
    if p.shape[1] != sys.dim and sys.dim == 1 and p.shape[0] == 1:
        p = p.T
    return sys.values(p, strict=strict)[:, i]


# ---------------------------------------------------------------------------
# Convergence against closed forms
# ---------------------------------------------------------------------------


def disk_ground_state(radius: float = 1.0):
    """First Dirichlet eigenvalue of a disk and its normalized eigenfunction."""
    j = jn_zeros(0, 1)[0]
    lam = (j / radius) ** 2
    c = 1.0 / (math.sqrt(math.pi) * radius * abs(j1(j)))

    def phi(points):
        r = np.linalg.norm(np.atleast_2d(points), axis=1)
        return np.where(r < radius, c * j0(j * r / radius), 0.0)

    return lam, phi


@dataclass(frozen=True)
class ConvergenceTable:
    h: np.ndarray
    mesh_h: np.ndarray
    lambda_errors: np.ndarray
    eigenfunction_errors: np.ndarray
    orders: np.ndarray

    def rows(self):
        for i, h in enumerate(self.h):
            yield float(h), self.lambda_errors[i].tolist(), self.eigenfunction_errors[i].tolist()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.lambda_errors.shape[1]
        w.writerow(["h", "mesh_h"] + [f"lambda_err_{k + 1}" for k in range(n)]
                   + [f"phi_sup_err_{k + 1}" for k in range(n)])
        for i in range(len(self.h)):
            w.writerow([repr(float(self.h[i])), repr(float(self.mesh_h[i]))]
                       + [repr(float(x)) for x in self.lambda_errors[i]]
                       + [repr(float(x)) for x in self.eigenfunction_errors[i]])
        return buf.getvalue()


def _fit_order(h: np.ndarray, err: np.ndarray) -> float:
    if len(h) < 2 or np.any(err <= 0) or np.ptp(np.log(h)) == 0:
        return float("nan")
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


def convergence_study(target: Orthotope | Disk, h_list: Sequence[float], n: int) -> ConvergenceTable:
    """FEM eigenvalue and sup-norm eigenfunction errors against a closed form.

    Orders are least-squares slopes of ``log(error)`` against the log of
    the meshes' maximum edge length.
    """
    h_arr = np.asarray(h_list, dtype=float)
    if np.any(np.diff(h_arr) > 0):
        raise InvalidParameterError("h_list must be non-increasing")
    if isinstance(target, Orthotope):
        ref = orthotope_spectrum(target, n + 1)
        if np.any(ref.gap_flags[:n]):
            raise PreconditionError("target spectrum is degenerate among the first n modes")
        exact_lams = ref.lambdas[:n]

        def exact_phi(points):
            return ref.values(points)[:, :n]
    elif isinstance(target, Disk):
        if n != 1:
            raise PreconditionError("only the first disk eigenvalue is simple; use n=1")
        lam, phi = disk_ground_state(target.radius)
        exact_lams = np.array([lam])

        def exact_phi(points):
            return phi(points)[:, None]
    else:
        raise InvalidParameterError("target must be an Orthotope or a Disk")

    lam_err = np.zeros((len(h_arr), n))
    phi_err = np.zeros((len(h_arr), n))
    mesh_h = np.zeros(len(h_arr))
    for i, h in enumerate(h_arr):
        mesh = mesh_domain(target, h)
        mesh_h[i] = mesh.max_edge_length()
        sys = fem_spectrum(mesh, n)
        lam_err[i] = np.abs(sys.lambdas - exact_lams)
        ex = exact_phi(mesh.vertices)
        s = np.sign(np.sum(ex * sys.vectors, axis=0))
        phi_err[i] = np.max(np.abs(sys.vectors * s - ex), axis=0)
    orders = np.array([_fit_order(mesh_h, lam_err[:, k]) for k in range(n)])
    return ConvergenceTable(h=h_arr, mesh_h=mesh_h, lambda_errors=lam_err, eigenfunction_errors=phi_err, orders=orders)
