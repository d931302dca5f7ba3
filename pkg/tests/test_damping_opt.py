import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from speclab.damping_opt import (
    DampingDensity,
    DampingSolution,
    bang_bang_report,
    budget_sweep,
    damping_matrix,
    evaluate_JN,
    level_set_density,
    modal_decay_rate,
    mode_weights,
    optimize_relaxed,
    solve_damping_lp,
    sweep_to_csv,
)
from speclab.eigensolver import fem_spectrum, orthotope_spectrum
from speclab.errors import InvalidParameterError
from speclab.geometry import mesh_domain

from .oracles import HALF_INTERVAL_MASS, PI


def middle_half(c):
    return (c[:, 0] > PI / 4) & (c[:, 0] < 3 * PI / 4)


def random_feasible(rng, areas, budget):
    """A random density in [0, 1] with the given mass."""
    u = rng.random(len(areas))
    total = areas.sum()
    c = budget / np.dot(u, areas)
    if c <= 1:
        return c * u
    c = (total - budget) / np.dot(1 - u, areas)
    return 1 - c * (1 - u)


def dual_ternary(w, areas, budget, iters=200):
    """Independent oracle for N = 2: minimise the convex dual over alpha = (s, 1 - s)."""
    def g(s):
        comb = s * w[0] + (1 - s) * w[1]
        return float(np.dot(level_set_density(comb, areas, budget), comb))

    lo, hi = 0.0, 1.0
    for _ in range(iters):
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        if g(m1) <= g(m2):
            hi = m2
        else:
            lo = m1
    return g(0.5 * (lo + hi))


# -- density ------------------------------------------------------------------


def test_density_validates_bounds_and_mass():
    areas = np.ones(4)
    with pytest.raises(InvalidParameterError):
        DampingDensity(np.array([1.2, 0, 0, 0]), 1.2, areas)
    with pytest.raises(InvalidParameterError):
        DampingDensity(np.array([0.5, 0.5, 0, 0]), 2.0, areas)
    with pytest.raises(InvalidParameterError):
        DampingDensity(np.ones(3), 3.0, areas)


def test_density_json_round_trip(interval_sys):
    d = DampingDensity.indicator(interval_sys, middle_half)
    import json

    back = DampingDensity.from_dict(json.loads(d.to_json()))
    assert np.array_equal(back.a, d.a) and back.budget == d.budget


# -- J_N ----------------------------------------------------------------------


def test_weights_sum_to_one(rect_sys, rect_fem):
    assert np.allclose(mode_weights(rect_sys, 8).sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(mode_weights(rect_fem, 6).sum(axis=1), 1.0, atol=1e-10)


@pytest.mark.parametrize("N", [1, 4, 8])
def test_full_density_gives_one(rect_sys, N):
    areas = rect_sys.quadrature.cell_areas
    full = DampingDensity.from_values(np.ones(len(areas)), areas)
    assert evaluate_JN(rect_sys, full, N) == pytest.approx(1.0, abs=1e-12)


def test_uniform_density(square_sys):
    areas = square_sys.quadrature.cell_areas
    ell = 0.3 * areas.sum()
    assert evaluate_JN(square_sys, DampingDensity.uniform(areas, ell), 5) == pytest.approx(0.3, rel=1e-12)


def test_interval_indicator(interval_sys):
    d = DampingDensity.indicator(interval_sys, middle_half)
    assert d.budget == pytest.approx(PI / 2)
    assert evaluate_JN(interval_sys, d, 1) == pytest.approx(HALF_INTERVAL_MASS, rel=1e-12)


def test_cell_mismatch(interval_sys, rect_sys):
    with pytest.raises(InvalidParameterError):
        evaluate_JN(rect_sys, DampingDensity.indicator(interval_sys, middle_half), 1)


# -- LP -----------------------------------------------------------------------


def test_interval_single_mode_is_middle_half(interval_sys):
    sol = optimize_relaxed(interval_sys, PI / 2, 1)
    assert sol.J_value == pytest.approx(HALF_INTERVAL_MASS, rel=1e-12)
    assert np.allclose(sol.density.a, DampingDensity.indicator(interval_sys, middle_half).a, atol=1e-12)
    assert sol.duality_gap <= 1e-8 * sol.J_value


def test_single_mode_matches_level_set(rect_sys):
    areas = rect_sys.quadrature.cell_areas
    ell = 0.37 * areas.sum()
    sol = optimize_relaxed(rect_sys, ell, 1)
    ref = level_set_density(mode_weights(rect_sys, 1)[0], areas, ell)
    assert np.count_nonzero(np.abs(sol.density.a - ref) > 1e-9) <= 1
    assert sol.J_value == pytest.approx(float(mode_weights(rect_sys, 1)[0] @ ref), rel=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_lp_matches_highs(rect_sys, N):
    w = mode_weights(rect_sys, N)
    areas = rect_sys.quadrature.cell_areas
    ell = 0.4 * areas.sum()
    C = len(areas)
    # variables (a, t); maximise t
    c = np.zeros(C + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-w, np.ones((N, 1))])
    A_eq = np.hstack([areas, [0.0]])[None]
    ref = linprog(c, A_ub=A_ub, b_ub=np.zeros(N), A_eq=A_eq, b_eq=[ell],
                  bounds=[(0, 1)] * C + [(None, None)], method="highs")
    sol = optimize_relaxed(rect_sys, ell, N)
    assert sol.J_value == pytest.approx(-ref.fun, rel=1e-9)


def test_square_two_modes_against_dual_oracle(square_sys):
    w = mode_weights(square_sys, 2)
    areas = square_sys.quadrature.cell_areas
    ell = areas.sum() / 2
    sol = optimize_relaxed(square_sys, ell, 2)
    assert sol.J_value == pytest.approx(dual_ternary(w, areas, ell), abs=1e-6)


def test_multipliers_form_probability_vector(rect_sys):
    sol = optimize_relaxed(rect_sys, 0.5 * rect_sys.quadrature.cell_areas.sum(), 3)
    assert sol.multipliers.sum() == pytest.approx(1.0)
    assert np.all(sol.multipliers >= 0)
    inactive = [k for k in range(3) if k + 1 not in sol.active_modes]
    assert np.all(sol.multipliers[inactive] == 0)
    assert sol.dual_value == pytest.approx(sol.J_value, rel=1e-8)


def test_full_budget_limit(rect_sys):
    total = rect_sys.quadrature.cell_areas.sum()
    vals = [optimize_relaxed(rect_sys, total - d, 4).J_value for d in (1.0, 0.1, 1e-3)]
    assert vals[0] < vals[1] < vals[2] < 1.0
    assert 1.0 - vals[2] < 1e-3


def test_budget_bounds(rect_sys):
    total = rect_sys.quadrature.cell_areas.sum()
    for bad in (0.0, total, -1.0):
        with pytest.raises(InvalidParameterError):
            optimize_relaxed(rect_sys, bad, 2)


def test_value_concave_nondecreasing_in_budget(rect_sys):
    total = rect_sys.quadrature.cell_areas.sum()
    grid = total * np.linspace(0.05, 0.95, 19)
    t = np.array([J for _, J in budget_sweep(rect_sys, grid, 3)])
    d1 = np.diff(t)
    assert np.all(d1 >= -1e-8)
    assert np.all(np.diff(d1) <= 1e-8)


def test_optimum_beats_random_feasible(rect_sys):
    N = 4
    total = rect_sys.quadrature.cell_areas.sum()
    areas = rect_sys.quadrature.cell_areas
    ell = 0.3 * total
    best = optimize_relaxed(rect_sys, ell, N).J_value
    rng = np.random.default_rng(2024)
    for _ in range(100):
        d = DampingDensity(random_feasible(rng, areas, ell), ell, areas)
        assert evaluate_JN(rect_sys, d, N) <= best + 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(1, 4))
def test_weight_scaling_invariance(c, N):
    from speclab.geometry import canonical_rectangle

    sys_ = orthotope_spectrum(canonical_rectangle(), 4, cells=16)
    w = mode_weights(sys_, N)
    areas = sys_.quadrature.cell_areas
    ell = 0.45 * areas.sum()
    base = solve_damping_lp(w, areas, ell)
    scaled = solve_damping_lp(c * w, areas, ell)
    assert scaled.t == pytest.approx(c * base.t, rel=1e-9)
    # the maximiser set is unchanged: the scaled optimum is optimal for the original weights
    assert np.min(w @ scaled.a) == pytest.approx(base.t, rel=1e-9)


@pytest.mark.parametrize("c", [0.25, 2.0, 1024.0])
def test_exact_scaling_keeps_density(rect_sys, c):
    # symmetric cells give tied optimal vertices; scaling by a power of two keeps every
    # floating-point comparison, so the solver must return the same vertex
    w = mode_weights(rect_sys, 3)
    areas = rect_sys.quadrature.cell_areas
    ell = 0.45 * areas.sum()
    assert np.allclose(solve_damping_lp(c * w, areas, ell).a, solve_damping_lp(w, areas, ell).a, atol=1e-12)


def test_fem_mesh_solution(rect):
    sys_ = fem_spectrum(mesh_domain(rect, 0.1), 4)
    areas = sys_.quadrature.cell_areas
    sol = optimize_relaxed(sys_, 0.5 * areas.sum(), 4)
    assert sol.duality_gap <= 1e-8 * sol.J_value
    assert sol.density.budget == pytest.approx(0.5 * areas.sum(), rel=1e-9)


def test_sweep_csv(rect_sys):
    rows = budget_sweep(rect_sys, [1.0, 2.0], 2)
    lines = sweep_to_csv(rows).splitlines()
    assert lines[0] == "budget,J" and len(lines) == 3


# -- bang-bang ------------------------------------------------------------------


def test_interval_solution_is_bang_bang(interval_sys):
    sol = optimize_relaxed(interval_sys, 1.234, 1)
    rep = bang_bang_report(sol)
    assert rep.intermediate_area <= interval_sys.quadrature.cell_areas.max() + 1e-15
    assert rep.cells <= 1


def test_uniform_density_is_all_intermediate(rect_sys):
    areas = rect_sys.quadrature.cell_areas
    sol = DampingSolution.from_density(rect_sys, DampingDensity.uniform(areas, 0.5 * areas.sum()), 3)
    assert bang_bang_report(sol).intermediate_area == pytest.approx(areas.sum())


def test_rectangle_three_modes_fractional_cells(rect_sys):
    sol = optimize_relaxed(rect_sys, 0.5 * rect_sys.quadrature.cell_areas.sum(), 3)
    rep = bang_bang_report(sol)
    assert rep.cells <= 3
    assert rep.residual < 1e-10


def test_pure_bang_bang_reports_zero(interval_sys):
    sol = optimize_relaxed(interval_sys, PI / 2, 1)
    rep = bang_bang_report(sol)
    assert (rep.intermediate_area, rep.residual) == (0.0, 0.0)


# -- decay rate -----------------------------------------------------------------


@pytest.mark.parametrize("M", [1, 4, 16])
def test_full_damping_decay_rate(interval_sys, M):
    areas = interval_sys.quadrature.cell_areas
    full = DampingDensity.from_values(np.ones(len(areas)), areas)
    assert modal_decay_rate(interval_sys, full, 0.5, M) == pytest.approx(0.5, rel=1e-10)


def test_undamped_rate_zero(interval_sys):
    d = DampingDensity.indicator(interval_sys, middle_half)
    assert modal_decay_rate(interval_sys, d, 0.0, 8) == 0.0


def test_decay_rate_truncation_stability(interval_sys):
    d = DampingDensity.indicator(interval_sys, middle_half)
    r8 = modal_decay_rate(interval_sys, d, 0.3, 8)
    r16 = modal_decay_rate(interval_sys, d, 0.3, 16)
    assert r8 > 0 and abs(r8 - r16) <= 0.02 * r16


def test_damping_matrix_symmetric_psd(rect_sys):
    areas = rect_sys.quadrature.cell_areas
    d = DampingDensity.from_values(np.linspace(0, 1, len(areas)), areas)
    B = damping_matrix(rect_sys, d, 6)
    assert np.allclose(B, B.T, atol=1e-14)
    assert np.linalg.eigvalsh(B).min() > -1e-12
