"""Finite precheck for approximate controllability of a bilinear Schrodinger equation.

The sufficient conditions involve every mode: the Dirichlet spectrum must be
non-resonant and every consecutive coupling ``int W phi_k phi_{k+1}`` must be
nonzero. Only the first ``n`` modes and relations of height at most ``H`` can
be examined, so a passing report is evidence, never a proof. Every report
says so.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .eigensolver import EigenSystem
from .errors import InvalidParameterError
from .spectral_props import FAILS, RESIDUAL_TOL, PropertyReport, exact_nonresonance, nonresonance_search

CONDITIONS_MET = "conditions-met"
COUPLING_FAILS = "coupling-fails"
RESONANCE_FOUND = "resonance-found"
COUPLING_TOL_REL = 1e-8
EVIDENCE_NOTE = (
    "finite check: modes 1..n and integer relations up to height H only; "
    "necessary evidence for the infinite conditions, not a proof"
)


@dataclass(frozen=True)
class PolynomialPotential:
    """``W(x) = sum_j c_j prod_i x_i^{p_ji}``; ``terms`` maps exponent tuples to coefficients."""

    terms: tuple[tuple[tuple[int, ...], float], ...]

    @classmethod
    def from_terms(cls, terms: dict | Sequence) -> "PolynomialPotential":
        items = terms.items() if isinstance(terms, dict) else terms
        clean = []
        for powers, coef in items:
            p = tuple(int(e) for e in powers)
            if any(e < 0 for e in p):
                raise InvalidParameterError("exponents must be nonnegative")
            clean.append((p, float(coef)))
        if not clean:
            raise InvalidParameterError("a polynomial potential needs at least one term")
        dims = {len(p) for p, _ in clean}
        if len(dims) != 1:
            raise InvalidParameterError("all exponent tuples must have the same length")
        return cls(tuple(sorted(clean)))

    @classmethod
    def constant(cls, c: float, d: int) -> "PolynomialPotential":
        return cls.from_terms({(0,) * d: c})

    @classmethod
    def coordinate(cls, axis: int, d: int) -> "PolynomialPotential":
        p = [0] * d
        p[axis] = 1
        return cls.from_terms({tuple(p): 1.0})

    @property
    def dim(self) -> int:
        return len(self.terms[0][0])

    def __call__(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        if x.shape[1] != self.dim:
            raise InvalidParameterError(f"potential is {self.dim}-dimensional, points are {x.shape[1]}-dimensional")
        out = np.zeros(len(x))
        for p, c in self.terms:
            out += c * np.prod(x ** np.asarray(p), axis=1)
        return out

    def to_dict(self) -> dict:
        return {"type": "polynomial", "terms": [{"powers": list(p), "coef": c} for p, c in self.terms]}


@dataclass(frozen=True)
class CellPotential:
    """Potential given by one value per quadrature cell of a system."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise InvalidParameterError("cell potential needs a finite 1D array")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def to_dict(self) -> dict:
        return {"type": "cells", "values": self.values.tolist()}


def potential_from_dict(data: dict):
    kind = data.get("type")
    if kind == "polynomial":
        return PolynomialPotential.from_terms([(t["powers"], t["coef"]) for t in data["terms"]])
    if kind == "cells":
        return CellPotential(np.asarray(data["values"], dtype=float))
    if kind == "constant":
        return PolynomialPotential.constant(float(data["value"]), int(data["dim"]))
    raise InvalidParameterError(f"unknown potential type {kind!r}")


def _describe(W) -> dict:
    if hasattr(W, "to_dict"):
        return W.to_dict()
    if np.isscalar(W):
        return {"type": "constant", "value": float(W)}
    return {"type": "callable", "name": getattr(W, "__name__", type(W).__name__)}


def potential_values(sys: EigenSystem, W) -> np.ndarray:
    """``W`` at the quadrature points of ``sys``."""
    quad = sys.quadrature
    if isinstance(W, CellPotential):
        if len(W.values) != quad.n_cells:
            raise InvalidParameterError(f"cell potential has {len(W.values)} values, system has {quad.n_cells} cells")
        return W.values[quad.cells]
    if np.isscalar(W):
        return np.full(len(quad.points), float(W))
    v = np.asarray(W(quad.points), dtype=float)
    v = np.broadcast_to(v, (len(quad.points),))
    if not np.all(np.isfinite(v)):
        raise InvalidParameterError("potential is not bounded on the domain")
    return v


def coupling_integrals(sys: EigenSystem, W, n: int) -> np.ndarray:
    """``int W phi_k phi_{k+1}`` for ``k = 1 .. n-1``."""
    if not 2 <= n <= sys.n:
        raise InvalidParameterError(f"n must be in [2, {sys.n}]")
    quad = sys.quadrature
    phi = sys.quad_values[:, :n]
    ww = quad.weights * potential_values(sys, W)
    return np.einsum("p,pk,pk->k", ww, phi[:, :-1], phi[:, 1:])


@dataclass(frozen=True)
class ControllabilityReport:
    n: int
    height: int
    nonresonance: PropertyReport
    couplings: np.ndarray
    coupling_tol: float
    verdict: str
    failing_k: int | None
    W: dict
    quadrature: dict
    note: str = EVIDENCE_NOTE
    vanishing: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.verdict == CONDITIONS_MET:
            if np.any(np.abs(self.couplings) <= self.coupling_tol) or self.nonresonance.verdict == FAILS:
                raise ValueError("conditions-met needs nonvanishing couplings and no relation found")

    @property
    def label(self) -> str:
        return f"{COUPLING_FAILS}({self.failing_k})" if self.verdict == COUPLING_FAILS else self.verdict

    def to_dict(self) -> dict:
        return {
            "verdict": self.label,
            "n": self.n,
            "height": self.height,
            "couplings": [float(c) for c in self.couplings],
            "coupling_tol": self.coupling_tol,
            "vanishing": list(self.vanishing),
            "nonresonance": self.nonresonance.to_dict(),
            "W": self.W,
            "quadrature": self.quadrature,
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def controllability_precheck(sys: EigenSystem, W, n: int, H: int, *, coupling_tol: float | None = None,
                             residual_tol: float = RESIDUAL_TOL, exact: bool = False) -> ControllabilityReport:
    """Coupling integrals plus a relation search on ``lambda_1 .. lambda_n``.

    The verdict is ``coupling-fails(k)`` for the first vanishing coupling,
    else ``resonance-found`` if any relation of height at most ``H`` exists,
    else ``conditions-met``. The default coupling tolerance is
    ``1e-8 * sup |W|`` over the quadrature points. ``exact=True`` uses exact
    arithmetic for closed-form spectra with exact side data.
    """
    couplings = coupling_integrals(sys, W, n)
    sup = float(np.max(np.abs(potential_values(sys, W))))
    tol = COUPLING_TOL_REL * sup if coupling_tol is None else float(coupling_tol)
    if exact and sys.is_closed_form and sys.modes[0].lam_exact is not None:
        sub = sys if sys.n == n else _truncate(sys, n)
        nonres = exact_nonresonance(sub, H)
    else:
        nonres = nonresonance_search(sys.lambdas[:n], H, residual_tol)
    vanishing = tuple(int(k) + 1 for k in np.flatnonzero(np.abs(couplings) <= tol))
    if vanishing:
        verdict, failing = COUPLING_FAILS, vanishing[0]
    elif nonres.verdict == FAILS:
        verdict, failing = RESONANCE_FOUND, None
    else:
        verdict, failing = CONDITIONS_MET, None
    quad_info = {"cells": sys.quad_cells, "order": sys.quad_order, "points": int(len(sys.quadrature.points))}
    return ControllabilityReport(n, H, nonres, couplings, tol, verdict, failing, _describe(W), quad_info,
                                 vanishing=vanishing)


def _truncate(sys: EigenSystem, n: int) -> EigenSystem:
    from .eigensolver import orthotope_spectrum

    return orthotope_spectrum(sys.domain, n, cells=sys.quad_cells, quad_order=sys.quad_order)


@dataclass(frozen=True)
class ResidualSearchResult:
    W: PolynomialPotential | None
    report: ControllabilityReport | None
    attempts: int
    spectrum_resonant: bool


def residual_W_search(sys: EigenSystem, n: int, H: int, *, degree: int = 2, max_attempts: int = 20,
                      seed: int = 0) -> ResidualSearchResult:
    """Draw random polynomial potentials until the precheck passes.

    A resonant spectrum cannot be fixed by any ``W``; this is detected once
    up front and reported with zero attempts.
    """
    nonres = nonresonance_search(sys.lambdas[:n], H)
    if nonres.verdict == FAILS:
        return ResidualSearchResult(None, None, 0, True)
    rng = np.random.default_rng(seed)
    d = sys.dim
    exps = [p for p in np.ndindex(*(degree + 1,) * d) if sum(p) <= degree]
    report = None
    for attempt in range(1, max_attempts + 1):
        W = PolynomialPotential.from_terms({p: float(c) for p, c in zip(exps, rng.standard_normal(len(exps)))})
        report = controllability_precheck(sys, W, n, H)
        if report.verdict == CONDITIONS_MET:
            return ResidualSearchResult(W, report, attempt, False)
    return ResidualSearchResult(None, report, max_attempts, False)
