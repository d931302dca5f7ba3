"""Acceptance criteria, each run at its stated tolerance.

Every criterion is a function returning ``(passed, detail)``. Under pytest
each one is a test, and a terminal summary prints one PASS/FAIL line per
criterion. Run this file directly for the same lines without pytest::

    python3 tests/test_acceptance.py

Criterion 4 cannot hold as written: for every rectangle the first four
eigenvalues satisfy ``l11 + l22 = l21 + l12``, and for ``mu = (1, 2^{-1/4})``
also ``4 l11 = l22``. It is implemented as stated and marked as an expected
failure, so the suite reports it honestly and goes red if it ever passes.
"""
import math
import time

import numpy as np
import pytest

from speclab.damping_opt import (
    DampingDensity,
    bang_bang_report,
    budget_sweep,
    modal_decay_rate,
    optimize_relaxed,
)
from speclab.eigensolver import convergence_study, fem_spectrum, orthotope_spectrum
from speclab.geometry import canonical_rectangle, make_orthotope, mesh_domain, stretch_field
from speclab.perturbation import (
    fd_potential_check,
    fd_shape_check,
    hadamard_derivative,
    orthotope_face,
    rectangle_family_path,
    track_path,
)
from speclab.schrodinger_check import PolynomialPotential, controllability_precheck
from speclab.spectral_props import (
    FAILS,
    HOLDS,
    check_simplicity,
    nonresonance_search,
    squared_gram,
    squared_independence_search,
)

PI = math.pi
SQRT2 = math.sqrt(2.0)
RESULTS: dict[int, tuple[bool, str]] = {}


def _record(k: int, passed: bool, detail: str) -> tuple[bool, str]:
    RESULTS[k] = (bool(passed), detail)
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {k}: {detail}")
    return bool(passed), detail


def _bisect(f, lo, hi, tol=1e-12):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def criterion_1():
    t0 = time.perf_counter()
    rect = canonical_rectangle()
    exact = np.array(sorted(a * a + SQRT2 * b * b for a in range(1, 8) for b in range(1, 8))[:6])
    fem = fem_spectrum(mesh_domain(rect, 0.02), 6)
    rel = float(np.max(np.abs(fem.lambdas - exact) / exact))
    orders = convergence_study(rect, [0.2, 0.1, 0.05], 4).orders
    elapsed = time.perf_counter() - t0
    ok = rel < 3e-3 and float(np.min(orders)) >= 1.8 and elapsed <= 60
    return _record(1, ok, f"max rel err {rel:.2e} (< 3e-3), min order {np.min(orders):.3f} (>= 1.8), {elapsed:.1f} s")


def criterion_2():
    sq = check_simplicity(orthotope_spectrum(make_orthotope((1.0, 1.0)), 3), 1e-6)
    rect = check_simplicity(orthotope_spectrum(canonical_rectangle(), 8))
    ok = (sq.verdict == FAILS and sq.witness["pair"] == [2, 3] and sq.witness["lambdas"] == [5.0, 5.0]
          and rect.verdict == HOLDS and rect.exact)
    return _record(2, ok, f"square {sq.verdict} at pair {sq.witness['pair']}; rectangle n=8 {rect.verdict}, exact={rect.exact}")


def criterion_3():
    interval = make_orthotope((1.0,))
    devs = [abs(squared_gram(orthotope_spectrum(interval, n)).min_eigenvalue - 1 / (2 * PI)) for n in range(2, 13)]
    rect = orthotope_spectrum(canonical_rectangle(), 6)
    g = squared_gram(rect)
    search = squared_independence_search(rect, 200, seed=0)
    ok = max(devs) <= 1e-10 and g.min_eigenvalue > 10 * g.quadrature_error and search.verdict == HOLDS
    return _record(3, ok, f"1D max dev {max(devs):.1e}; 2D min eig {g.min_eigenvalue:.3e} vs 10x tol "
                          f"{10 * g.quadrature_error:.1e}; det witness {search.verdict}, first at trial "
                          f"{search.witness['first_passing_trial']} of 200")


def criterion_4():
    t0 = time.perf_counter()
    sq = nonresonance_search([2.0, 5.0, 5.0, 8.0], 4)
    found = {r.q: r.residual for r in sq.relations}
    part1 = found.get((0, 1, -1, 0)) == 0.0 and found.get((4, 0, 0, -1)) == 0.0
    lam = [1 + SQRT2, 4 + SQRT2, 1 + 4 * SQRT2, 4 + 4 * SQRT2]
    rect = nonresonance_search(lam, 20)
    part2 = rect.verdict == HOLDS and rect.height == 20
    elapsed = time.perf_counter() - t0
    ok = part1 and part2 and elapsed <= 10
    detail = (f"square relations found: {part1}; rectangle first 4 up to H=20: {rect.verdict}"
              + ("" if part2 else f" (witness q={rect.witness['q']}, residual {rect.witness['residual']})")
              + f"; {elapsed:.2f} s")
    return _record(4, ok, detail)


def criterion_5():
    sq = make_orthotope((1.0, 1.0))
    sys_ = orthotope_spectrum(sq, 6)
    face = orthotope_face(sq)
    mesh = mesh_domain(sq, 0.03)
    field = stretch_field(1, 1 / PI)  # unit normal speed on the top face
    c11 = fd_shape_check(mesh, field, 1, 1e-3, hadamard_sys=sys_, pert=face)
    c12 = fd_shape_check(mesh, field, (1, 2), 1e-3, hadamard_sys=sys_, pert=face)
    h11 = hadamard_derivative(sys_, face, 1)
    h12 = hadamard_derivative(sys_, face, (1, 2))
    ok = (math.isclose(h11, -2 / PI, rel_tol=1e-12) and math.isclose(h12, -8 / PI, rel_tol=1e-12)
          and c11.relative_error < 1e-3 and c12.relative_error < 1e-3)
    return _record(5, ok, f"(1,1) {h11:.6f} fd rel err {c11.relative_error:.1e}; "
                          f"(1,2) {h12:.6f} fd rel err {c12.relative_error:.1e} (< 1e-3)")


def criterion_6():
    chk = fd_potential_check(make_orthotope((1.0,)), lambda p: p[:, 0], 1, 1e-4)
    err = abs(chk.formula - PI / 2) / (PI / 2)
    ok = err < 1e-4 and chk.relative_error < 1e-4
    return _record(6, ok, f"formula {chk.formula:.8f} (pi/2 rel {err:.1e}); fd rel err {chk.relative_error:.1e} (< 1e-4)")


def criterion_7():
    interval = orthotope_spectrum(make_orthotope((1.0,)), 4)
    sol = optimize_relaxed(interval, PI / 2, 1)
    bb = bang_bang_report(sol)
    cell = float(np.max(interval.quadrature.cell_areas))
    part1 = abs(sol.J_value - (0.5 + 1 / PI)) <= 1e-4 and bb.intermediate_area <= cell
    rect = orthotope_spectrum(canonical_rectangle(), 6)
    area = float(np.sum(rect.quadrature.cell_areas))
    sol3 = optimize_relaxed(rect, 0.5 * area, 3)
    bb3 = bang_bang_report(sol3)
    ts = np.array([t for _, t in budget_sweep(rect, area * np.linspace(0.05, 0.95, 10), 3)])
    d1 = np.diff(ts)
    concave = bool(np.all(d1 >= -1e-8) and np.all(np.diff(d1) <= 1e-8))
    part2 = sol3.duality_gap <= 1e-8 * sol3.J_value and bb3.cells <= 3 and concave
    return _record(7, part1 and part2,
                   f"1D t*={sol.J_value:.6f}, intermediate area {bb.intermediate_area:.1e}; rectangle N=3 gap "
                   f"{sol3.duality_gap:.1e}, {bb3.cells} fractional cells, concave nondecreasing: {concave}")


def criterion_8():
    interval = orthotope_spectrum(make_orthotope((1.0,)), 16)
    ones = DampingDensity.from_values(np.ones(interval.quadrature.n_cells), interval.quadrature.cell_areas)
    rates = [modal_decay_rate(interval, ones, 0.5, M) for M in (4, 8, 12, 16)]
    dev = max(abs(r - 0.5) for r in rates)
    return _record(8, dev <= 1e-6, f"rates for M=4,8,12,16 deviate from 0.5 by at most {dev:.1e}")


def criterion_9():
    interval = orthotope_spectrum(make_orthotope((1.0,)), 4)
    rep = controllability_precheck(interval, PolynomialPotential.coordinate(0, 1), 4, 10)
    const = controllability_precheck(interval, 1.0, 4, 10)
    c1 = float(rep.couplings[0])
    ok = abs(c1 + 16 / (9 * PI)) <= 1e-4 and rep.label == "resonance-found" and const.label == "coupling-fails(1)"
    return _record(9, ok, f"coupling_1 {c1:.6f} (-16/(9 pi) = {-16 / (9 * PI):.6f}); x -> {rep.label}; 1 -> {const.label}")


def criterion_10():
    step = 0.01
    path = rectangle_family_path((1.0, 0.6), (1.0, 0.9), 100, 0.05)
    ep = track_path(path, 4)

    def gap(t):  # (1,2) minus (3,1) on mu2 = 0.6 + 0.3 t
        mu = 0.6 + 0.3 * t
        return (1 + 4 / mu**2) - (9 + 1 / mu**2)

    t_star = _bisect(gap, 0.0, 1.0)
    ev = ep.crossings((3, 4))
    ok = len(ev) == 1 and ev[0].t_start - step <= t_star <= ev[0].t_end + step
    where = f"[{ev[0].t_start:.2f}, {ev[0].t_end:.2f}]" if ev else "none"
    return _record(10, ok, f"closed-form crossing t={t_star:.10f}; detected interval {where} (tolerance one step {step})")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("k", [1, 2, 3, 5, 6, 7, 8, 9, 10])
def test_criterion(k):
    passed, detail = CRITERIA[k - 1]()
    assert passed, detail


@pytest.mark.xfail(strict=True, reason="the first four eigenvalues of any rectangle satisfy "
                                       "l11 + l22 = l21 + l12 (and 4 l11 = l22 for this mu), so no "
                                       "search can certify non-resonance up to height 20")
def test_criterion_4():
    passed, detail = criterion_4()
    assert passed, detail


if __name__ == "__main__":
    for fn in CRITERIA:
        fn()
    failed = [k for k, (ok, _) in sorted(RESULTS.items()) if not ok]
    print(f"{10 - len(failed)}/10 criteria pass" + (f"; failing: {failed}" if failed else ""))
