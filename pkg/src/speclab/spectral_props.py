"""Checks of simplicity, squared-eigenfunction independence and non-resonance.

Verdicts are ``"holds"``, ``"fails"`` or ``"inconclusive"``. Floating-point
non-resonance can only be refuted, so ``"holds"`` for it always means
"no integer relation up to the searched height".
"""
from __future__ import annotations

import csv
import inspect
import io
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .eigensolver import EigenSystem, locate_points
from .errors import BudgetError, InvalidParameterError
from .geometry import Orthotope

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
DET_TOL = 1e-8
RESIDUAL_TOL = 1e-7
WORK_BUDGET = 2 * 10**8


@dataclass(frozen=True)
class RationalRelation:
    """Integer vector ``q`` with ``|sum q_l lambda_l| = residual``."""

    q: tuple[int, ...]
    residual: float
    verified: bool = True

    def __post_init__(self):
        if not any(self.q):
            raise InvalidParameterError("a relation needs a nonzero coefficient")

    @property
    def height(self) -> int:
        return max(abs(x) for x in self.q)

    def recompute(self, lambdas) -> float:
        return abs(float(np.dot(np.asarray(self.q, dtype=float), np.asarray(lambdas, dtype=float))))

    def to_dict(self) -> dict:
        return {"q": list(self.q), "residual": self.residual, "height": self.height, "verified": self.verified}


@dataclass(frozen=True)
class PropertyReport:
    property: str
    n: int
    verdict: str
    witness: dict | None = None
    tolerances: dict = field(default_factory=dict)
    relations: tuple[RationalRelation, ...] = ()
    height: int | None = None
    seed: int | None = None
    exact: bool = False

    def __post_init__(self):
        if self.verdict == FAILS and self.witness is None:
            raise ValueError("a failing report must carry a witness")
        if self.property == "nonresonance" and self.verdict == HOLDS and self.height is None:
            raise ValueError("a non-resonance verdict must record the searched height")

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "n": self.n,
            "verdict": self.verdict,
            "witness": self.witness,
            "tolerances": self.tolerances,
            "relations": [r.to_dict() for r in self.relations],
            "height": self.height,
            "seed": self.seed,
            "exact": self.exact,
        }


# ---------------------------------------------------------------------------
# Simplicity
# ---------------------------------------------------------------------------


def check_simplicity(sys: EigenSystem, gap_tol: float = 1e-6, *, exact: bool = True) -> PropertyReport:
    """Relative gaps ``(lam_{k+1} - lam_k) / (1 + lam_k)`` against ``gap_tol``.

    A failing report names the lowest degenerate pair; a passing one names
    the closest pair.

    Closed-form systems on orthotopes with exact side data are decided
    exactly when ``exact`` is true; ``gap_tol`` is then unused.
    """
    lam = sys.lambdas
    tols = {"gap_tol": gap_tol}
    if sys.n == 1:
        return PropertyReport("simplicity", 1, HOLDS, witness=None, tolerances=tols)
    gaps = np.diff(lam) / (1.0 + lam[:-1])
    k = int(np.argmin(gaps))
    use_exact = exact and sys.is_closed_form and sys.modes[0].lam_exact is not None
    if use_exact:
        equal = [i for i in range(sys.n - 1) if sys.modes[i].lam_exact == sys.modes[i + 1].lam_exact]
        bad = equal[0] if equal else None
    else:
        failing = np.flatnonzero(gaps <= gap_tol)
        bad = int(failing[0]) if len(failing) else None
    at = bad if bad is not None else k
    witness = {
        "index": at + 1,
        "pair": [at + 1, at + 2],
        "lambdas": [float(lam[at]), float(lam[at + 1])],
        "relative_gap": float(gaps[at]),
    }
    if sys.is_closed_form:
        witness["multi_indices"] = [list(sys.modes[at].K), list(sys.modes[at + 1].K)]
    verdict = FAILS if bad is not None else HOLDS
    return PropertyReport("simplicity", sys.n, verdict, witness=witness, tolerances=tols, exact=use_exact)


# ---------------------------------------------------------------------------
# Squared independence
# ---------------------------------------------------------------------------


def _as_points(sys: EigenSystem, points) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if sys.dim == 1 and p.ndim == 1:
        p = p[:, None]
    return np.atleast_2d(p)


def squared_independence_det(sys: EigenSystem, points) -> float:
    """``det(M)`` with ``M[i, j] = phi_j(x_i)**2`` for the first ``len(points)`` modes."""
    p = _as_points(sys, points)
    n = len(p)
    if n > sys.n:
        raise InvalidParameterError(f"{n} points but only {sys.n} modes")
    M = sys.values(p)[:, :n] ** 2
    return float(np.linalg.det(M))


def _det_threshold(M: np.ndarray) -> float:
    return DET_TOL * float(np.prod(np.linalg.norm(M, axis=1)))


def _sample_domain(sys: EigenSystem, count: int, seed: int) -> np.ndarray:
    """Scrambled Halton points in the domain, rejection-sampled on meshes."""
    d = sys.dim
    if count == 0:
        return np.empty((0, d))
    sampler = qmc.Halton(d=d, scramble=True, seed=seed)
    if isinstance(sys.domain, Orthotope):
        return sampler.random(count) * sys.domain.lengths
    lo, hi = sys.domain.vertices.min(axis=0), sys.domain.vertices.max(axis=0)
    out = []
    need = count
    while need > 0:
        batch = sampler.random(max(64, 2 * need)) * (hi - lo) + lo
        tri, _ = locate_points(sys.domain, batch)
        batch = batch[tri >= 0]
        out.append(batch[:need])
        need -= len(out[-1])
    return np.concatenate(out)


def squared_independence_search(sys: EigenSystem, trials: int, seed: int = 0, n: int | None = None) -> PropertyReport:
    """Search for points where the squared-eigenfunction matrix is nonsingular.

    Each trial takes ``n`` consecutive low-discrepancy points. A witness is
    accepted when ``|det| > 1e-8 * prod(row norms)``. All trials are run and
    the strongest witness is reported, together with the first trial that
    already passed. Without a witness the verdict is inconclusive, never a
    failure.
    """
    n = sys.n if n is None else n
    tols = {"det_tol": DET_TOL, "scale": "row-norm product"}
    pts = _sample_domain(sys, trials * n, seed)
    best, best_ratio, first = None, -1.0, None
    for t in range(trials):
        P = pts[t * n:(t + 1) * n]
        M = sys.values(P)[:, :n] ** 2
        det = float(np.linalg.det(M))
        thr = _det_threshold(M)
        ratio = abs(det) / thr if thr > 0 else 0.0
        if first is None and ratio > 1.0:
            first = t
        if ratio > best_ratio:
            best_ratio = ratio
            best = {"trial": t, "points": P.tolist(), "det": det, "threshold": thr}
    if best is not None:
        best["first_passing_trial"] = first
    if best is not None and best_ratio > 1.0:
        return PropertyReport("squared_independence", n, HOLDS, witness=best, tolerances=tols, seed=seed)
    return PropertyReport("squared_independence", n, INCONCLUSIVE, witness=best, tolerances=tols, seed=seed)


@dataclass(frozen=True)
class GramResult:
    matrix: np.ndarray
    min_eigenvalue: float
    quadrature_error: float
    area: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in self.matrix:
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def _cell_mask(sys: EigenSystem, subset) -> np.ndarray:
    quad = sys.quadrature
    if subset is None:
        return np.ones(quad.n_cells, dtype=bool)
    if callable(subset):
        mask = np.asarray(subset(quad.cell_centroids), dtype=bool)
    else:
        mask = np.asarray(subset, dtype=bool)
    if mask.shape != (quad.n_cells,):
        raise InvalidParameterError(f"cell mask must have shape ({quad.n_cells},)")
    return mask


def squared_gram(sys: EigenSystem, subset=None) -> GramResult:
    """Gram matrix ``G_ij = int_omega phi_i^2 phi_j^2`` and its smallest eigenvalue.

    ``subset`` is a boolean cell mask or a predicate on cell centroids.
    The quadrature error is estimated by comparison with the rule that
    drops each cell's outermost Gauss points (closed form) or with the
    centroid rule (meshes).
    """
    quad = sys.quadrature
    mask = _cell_mask(sys, subset)
    area = float(np.sum(quad.cell_areas[mask]))
    if area <= 0:
        raise InvalidParameterError("subset has zero measure")
    sel = mask[quad.cells]
    v2 = sys.quad_values[sel] ** 2
    w = quad.weights[sel]
    G = v2.T @ (w[:, None] * v2)
    G = 0.5 * (G + G.T)
    min_eig = float(np.linalg.eigvalsh(G)[0])
    G_low = _coarse_gram(sys, mask)
    err = float(np.max(np.abs(G - G_low)))
    return GramResult(matrix=G, min_eigenvalue=min_eig, quadrature_error=err, area=area)


def _coarse_gram(sys: EigenSystem, mask: np.ndarray) -> np.ndarray:
    if sys.is_closed_form:
        from .eigensolver import orthotope_quadrature

        q = orthotope_quadrature(sys.domain, sys.quad_cells, max(2, sys.quad_order - 2))
        vals = np.column_stack([m(q.points, sys.domain.mu) for m in sys.modes])
        sel = mask[q.cells]
        v2 = vals[sel] ** 2
        return v2.T @ (q.weights[sel][:, None] * v2)
    mesh = sys.domain
    c = sys.vectors[mesh.triangles].mean(axis=1) ** 2
    a = mesh.cell_areas * mask
    return c.T @ (a[:, None] * c)


# ---------------------------------------------------------------------------
# Non-resonance
# ---------------------------------------------------------------------------


def _canonical(q: np.ndarray) -> np.ndarray:
    """Rows whose first nonzero entry is positive (one of each +-q pair)."""
    nz = q != 0
    first = np.argmax(nz, axis=1)
    lead = q[np.arange(len(q)), first]
    return nz.any(axis=1) & (lead > 0)


def _relation_sort_key(r: RationalRelation):
    return (r.residual, r.height, sum(abs(x) for x in r.q), tuple(-x for x in r.q))


def _search_block(prefix, lam_head, tail_q, tail_sum, tail_l1, tol_scale, residual_tol):
    s = float(np.dot(prefix, lam_head)) + tail_sum
    l1 = int(np.sum(np.abs(prefix))) + tail_l1
    hit = np.abs(s) <= residual_tol * tol_scale * np.maximum(l1, 1)
    if not np.any(hit):
        return []
    idx = np.flatnonzero(hit)
    full = np.hstack([np.broadcast_to(np.asarray(prefix, dtype=np.int64), (len(idx), len(prefix))), tail_q[idx]])
    keep = _canonical(full)
    return [(tuple(int(x) for x in row), float(abs(val))) for row, val in zip(full[keep], s[idx][keep])]


def nonresonance_search(lambdas: Sequence[float], height: int, residual_tol: float = RESIDUAL_TOL, *,
                        work_budget: int = WORK_BUDGET, max_relations: int = 10000,
                        lll: bool = False, workers: int = 1) -> PropertyReport:
    """Exhaustive integer-relation search with ``0 < max|q_l| <= height``.

    A relation is reported when ``|sum q_l lam_l| <= residual_tol * ||lam|| * ||q||_1``.
    Only canonical representatives (first nonzero coefficient positive)
    are enumerated. All relations found are returned, sorted by residual,
    height and l1 norm; the first is the witness.

    With ``lll=True`` an LLL reduction proposes extra candidates beyond
    ``height``; those are flagged ``verified=False``.
    """
    lam = np.asarray(lambdas, dtype=float)
    k = len(lam)
    if k < 1 or height < 1:
        raise InvalidParameterError("need at least one value and height >= 1")
    work = k * (2 * height + 1) ** k
    if work > work_budget:
        raise BudgetError(f"search needs {work:.3e} operations (budget {work_budget:.1e}); lower height or k")
    tol_scale = float(np.linalg.norm(lam))
    r = k
    while r > 1 and (2 * height + 1) ** r > 2 * 10**6:
        r -= 1
    rng = np.arange(-height, height + 1)
    tail_q = np.array(list(itertools.product(rng, repeat=r)), dtype=np.int64)
    tail_sum = tail_q @ lam[k - r:]
    tail_l1 = np.sum(np.abs(tail_q), axis=1)
    prefixes = list(itertools.product(rng, repeat=k - r))
    args = (lam[:k - r], tail_q, tail_sum, tail_l1, tol_scale, residual_tol)
    if workers > 1 and len(prefixes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(lambda p: _search_block(p, *args), prefixes))
    else:
        chunks = [_search_block(p, *args) for p in prefixes]
    found = [RationalRelation(q, res) for chunk in chunks for q, res in chunk]
    found.sort(key=_relation_sort_key)
    found = found[:max_relations]
    if lll:
        have = {rel.q for rel in found}
        for cand in lll_candidates(lam):
            if cand.q not in have and cand.height > height:
                found.append(cand)
    tols = {"residual_tol": residual_tol, "scale": "||lambda||_2 * ||q||_1"}
    verified = [rel for rel in found if rel.verified]
    if verified:
        return PropertyReport("nonresonance", k, FAILS, witness=verified[0].to_dict(), tolerances=tols,
                              relations=tuple(found), height=height)
    return PropertyReport("nonresonance", k, HOLDS, witness=None, tolerances=tols,
                          relations=tuple(found), height=height)


def lll_candidates(lambdas: Sequence[float], scale: float = 1e9, keep: int = 3) -> list[RationalRelation]:
    """Short integer relations proposed by LLL on the lattice ``[I | round(scale * lam)]``.

    Candidates are unverified: a small residual here proves nothing about
    relations of bounded height.
    """
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    lam = np.asarray(lambdas, dtype=float)
    k = len(lam)
    if k < 2:
        return []
    rows = []
    for i in range(k):
        row = [ZZ(1 if j == i else 0) for j in range(k)]
        row.append(ZZ(int(round(scale * lam[i]))))
        rows.append(row)
    B = DomainMatrix(rows, (k, k + 1), ZZ).lll().to_Matrix()
    out = []
    for i in range(min(keep, k)):
        q = np.array([int(B[i, j]) for j in range(k)], dtype=np.int64)
        if not q.any():
            continue
        if q[np.flatnonzero(q)[0]] < 0:
            q = -q
        out.append(RationalRelation(tuple(int(x) for x in q), abs(float(q @ lam)), verified=False))
    return out


def exact_nonresonance(sys: EigenSystem, height: int, *, work_budget: int = WORK_BUDGET) -> PropertyReport:
    """Exact relation search for closed-form spectra in a quadratic field.

    Each eigenvalue is ``a_l + b_l sqrt(D)`` with rational ``a_l, b_l``, so
    ``sum q_l lam_l = 0`` exactly iff both ``sum q_l a_l`` and
    ``sum q_l b_l`` vanish; the search runs in integer arithmetic.
    """
    if not (sys.is_closed_form and sys.modes[0].lam_exact is not None):
        raise InvalidParameterError("exact search needs a closed-form system with exact side data")
    pairs = [m.lam_exact.to_pair() for m in sys.modes]
    den = 1
    for a, b in pairs:
        den = np.lcm(den, np.lcm(Fraction(a).denominator, Fraction(b).denominator))
    A = np.array([int(a * den) for a, _ in pairs], dtype=np.int64)
    B = np.array([int(b * den) for _, b in pairs], dtype=np.int64)
    k = len(A)
    work = k * (2 * height + 1) ** k
    if work > work_budget:
        raise BudgetError(f"search needs {work:.3e} operations (budget {work_budget:.1e})")
    rng = np.arange(-height, height + 1)
    found = []
    r = k
    while r > 1 and (2 * height + 1) ** r > 2 * 10**6:
        r -= 1
    tail = np.array(list(itertools.product(rng, repeat=r)), dtype=np.int64)
    ta, tb = tail @ A[k - r:], tail @ B[k - r:]
    for prefix in itertools.product(rng, repeat=k - r):
        pa = int(np.dot(prefix, A[:k - r])) if k > r else 0
        pb = int(np.dot(prefix, B[:k - r])) if k > r else 0
        hit = np.flatnonzero((ta + pa == 0) & (tb + pb == 0))
        if len(hit):
            full = np.hstack([np.broadcast_to(np.asarray(prefix, dtype=np.int64), (len(hit), k - r)), tail[hit]])
            for row in full[_canonical(full)]:
                found.append(RationalRelation(tuple(int(x) for x in row), 0.0))
    found.sort(key=_relation_sort_key)
    tols = {"arithmetic": "exact"}
    if found:
        return PropertyReport("nonresonance", k, FAILS, witness=found[0].to_dict(), tolerances=tols,
                              relations=tuple(found), height=height, exact=True)
    return PropertyReport("nonresonance", k, HOLDS, tolerances=tols, height=height, exact=True)


# ---------------------------------------------------------------------------
# Generic analytic functional of eigenfunction values and eigenvalues
# ---------------------------------------------------------------------------


class Functional:
    """Callable of ``n(n+1)`` scalar arguments with a declared arity."""

    def __init__(self, func: Callable[..., float], arity: int, name: str = "custom"):
        self.func, self.arity, self.name = func, arity, name

    def __call__(self, *args):
        return self.func(*args)


def _arity(functional) -> int | None:
    if hasattr(functional, "arity"):
        return int(functional.arity)
    try:
        params = inspect.signature(functional).parameters.values()
    except (TypeError, ValueError):
        return None
    if any(p.kind == p.VAR_POSITIONAL for p in params):
        return None
    return sum(p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD) for p in params)


def generic_Fn(sys: EigenSystem, points, functional) -> float:
    """Evaluate ``F(phi_1(x_1), ..., phi_n(x_1), ..., phi_n(x_n), lam_1, ..., lam_n)``.

    Arguments are grouped by point: the first ``n`` are the ``n`` modes at
    ``x_1``, and the last ``n`` are the eigenvalues.
    """
    p = _as_points(sys, points)
    n = len(p)
    if n > sys.n:
        raise InvalidParameterError(f"{n} points but only {sys.n} modes")
    ar = _arity(functional)
    if ar is not None and ar != n * (n + 1):
        raise InvalidParameterError(f"functional takes {ar} arguments, expected n(n+1) = {n * (n + 1)}")
    y = np.concatenate([sys.values(p)[:, :n].ravel(), sys.lambdas[:n]])
    return float(functional(*y))


def det_of_squares(n: int) -> Functional:
    def f(*y):
        return float(np.linalg.det(np.asarray(y[: n * n]).reshape(n, n) ** 2))

    return Functional(f, n * (n + 1), "det_of_squares")


def det_of_values(n: int) -> Functional:
    def f(*y):
        return float(np.linalg.det(np.asarray(y[: n * n]).reshape(n, n)))

    return Functional(f, n * (n + 1), "det_of_values")


def eigenvalue_combination(q: Sequence[int]) -> Functional:
    n = len(q)
    qa = np.asarray(q, dtype=float)

    def f(*y):
        return float(np.dot(qa, y[n * n:]))

    return Functional(f, n * (n + 1), "eigenvalue_combination")


def last_argument(n: int) -> Functional:
    return Functional(lambda *y: float(y[-1]), n * (n + 1), "last_argument")
