import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from speclab.errors import (
    DeformationError,
    GeometryError,
    IncompatibleMeshError,
    InvalidParameterError,
    ResolutionError,
)
from speclab.geometry import (
    Disk,
    MeshedDomain,
    Polygon,
    canonical_rectangle,
    domain_from_dict,
    domain_to_dict,
    ellipse_map,
    flow_deform,
    flow_points,
    identity_map,
    interpolation_path,
    make_orthotope,
    mesh_domain,
    polygon_area,
    regular_polygon,
    squashing_field,
)


# -- orthotopes ---------------------------------------------------------------


def test_make_orthotope_interval_and_square():
    iv = make_orthotope((1,))
    assert iv.d == 1 and np.allclose(iv.lengths, [math.pi])
    sq = make_orthotope((1, 1))
    assert np.allclose(sq.lengths, [math.pi, math.pi])
    assert sq.volume == pytest.approx(math.pi**2)


def test_canonical_rectangle_side_lengths():
    r = canonical_rectangle()
    assert r.mu[1] == pytest.approx(2**-0.25)
    assert r.lengths[1] == pytest.approx(math.pi * 2**-0.25)
    assert r.inv_mu_sq is not None


@pytest.mark.parametrize("mu", [(0.0,), (1.0, -2.0), ()])
def test_make_orthotope_rejects_bad_sides(mu):
    with pytest.raises(InvalidParameterError):
        make_orthotope(mu)


# -- meshing ------------------------------------------------------------------


def _mesh_invariants(mesh: MeshedDomain):
    mesh.validate()
    assert np.all(mesh.cell_areas > 0)
    assert mesh.area == pytest.approx(float(np.sum(mesh.cell_areas)), rel=1e-14)
    assert np.allclose(np.linalg.norm(mesh.normals, axis=1), 1.0, atol=1e-12)
    loops = mesh.boundary_loops()
    assert sum(len(loop) for loop in loops) == len(mesh.boundary_edges)


def test_unit_square_mesh_edge_bound():
    poly = Polygon(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))
    mesh = mesh_domain(poly, 0.1)
    _mesh_invariants(mesh)
    assert mesh.max_edge_length() <= 0.15
    assert mesh.area == pytest.approx(1.0, rel=1e-12)


def test_structured_orthotope_mesh(square):
    mesh = mesh_domain(square, 0.1)
    _mesh_invariants(mesh)
    assert mesh.max_edge_length() <= 0.15
    assert mesh.area == pytest.approx(math.pi**2, rel=1e-12)


def test_regular_64gon_area_close_to_disk():
    mesh = mesh_domain(regular_polygon(64), 0.05)
    _mesh_invariants(mesh)
    assert abs(mesh.area - math.pi) / math.pi < 5e-3
    assert mesh.max_edge_length() <= 1.5 * 0.05


def test_normals_point_outward():
    mesh = mesh_domain(regular_polygon(16), 0.2)
    mid = 0.5 * (mesh.vertices[mesh.boundary_edges[:, 0]] + mesh.vertices[mesh.boundary_edges[:, 1]])
    assert np.all(np.sum(mid * mesh.normals, axis=1) > 0)


def test_identity_mapped_ball_equals_disk_mesh():
    a = mesh_domain(identity_map(), 0.2)
    b = mesh_domain(Disk(1.0), 0.2)
    assert np.array_equal(a.triangles, b.triangles)
    assert np.allclose(a.vertices, b.vertices, atol=1e-15)


def test_l_shaped_polygon_meshes():
    L = Polygon(np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], dtype=float))
    mesh = mesh_domain(L, 0.1)
    _mesh_invariants(mesh)
    assert mesh.area == pytest.approx(3.0, rel=1e-12)


def test_self_intersecting_polygon_rejected():
    bow = np.array([[0, 0], [1, 1], [1, 0], [0, 1]], dtype=float)
    with pytest.raises(GeometryError):
        mesh_domain(Polygon(bow), 0.1)


def test_near_duplicate_vertices_rejected():
    pts = np.array([[0, 0], [1, 0], [1, 1e-10], [1, 1], [0, 1]], dtype=float)
    with pytest.raises(GeometryError):
        mesh_domain(Polygon(pts), 0.1)


def test_coarse_h_raises_resolution_error():
    with pytest.raises(ResolutionError):
        mesh_domain(Polygon(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)), 0.9)


def test_mesh_json_roundtrip(square_mesh):
    doc = square_mesh.to_dict()
    assert {"vertices", "triangles", "boundary_edges"} <= set(doc)
    back = MeshedDomain.from_dict(doc)
    assert back.fingerprint() == square_mesh.fingerprint()


@pytest.mark.parametrize("spec", [
    make_orthotope((1.0, 0.5)),
    canonical_rectangle(),
    Polygon(np.array([[0, 0], [2, 0], [0, 1]], dtype=float)),
    ellipse_map(1.0, 1.3),
])
def test_domain_json_roundtrip(spec):
    back = domain_from_dict(domain_to_dict(spec))
    assert domain_to_dict(back) == domain_to_dict(spec)


def test_polygon_area_shoelace():
    assert polygon_area(np.array([[0, 0], [2, 0], [0, 1]])) == pytest.approx(1.0)


# -- squashing field and flows ------------------------------------------------


def test_squashing_field_zero_at_north_pole():
    V = squashing_field()
    assert np.allclose(V(np.array([[0.0, 1.0]])), 0.0, atol=0)


def test_squashing_field_value_on_axis():
    V = squashing_field()
    assert np.allclose(V(np.array([[1.0, 0.0]])), [[0.0, -1.0]], atol=1e-15)


def test_squashing_field_tangent_to_unit_circle():
    V = squashing_field()
    th = np.linspace(0, 2 * np.pi, 10_000, endpoint=False)
    x = np.column_stack([np.cos(th), np.sin(th)])
    assert np.max(np.abs(np.sum(V(x) * x, axis=1))) <= 1e-12


def test_squashing_field_support():
    rho = 4.0
    V = squashing_field(rho)
    rng = np.random.default_rng(1)
    ang = rng.uniform(0, 2 * np.pi, 500)
    r = rng.uniform(math.sqrt(rho + 1), 10, 500)
    pts = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
    assert np.all(V(pts) == 0)
    assert V.support_radius == pytest.approx(math.sqrt(rho + 1))


def test_squashing_field_only_zeros_on_closed_disk_are_poles():
    V = squashing_field()
    g = np.linspace(-1, 1, 201)
    X, Y = np.meshgrid(g, g)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    pts = pts[np.sum(pts**2, axis=1) <= 1]
    speed = np.linalg.norm(V(pts), axis=1)
    slow = pts[speed < 1e-3]
    assert np.all(np.abs(np.abs(slow[:, 1]) - 1) < 0.05)


@pytest.mark.parametrize("rho", [1.0, 0.5, -2.0])
def test_squashing_field_rejects_small_rho(rho):
    with pytest.raises(InvalidParameterError):
        squashing_field(rho)


def test_flow_zero_time_is_identity(square_mesh):
    moved = flow_deform(square_mesh, squashing_field(), 0.0)
    assert np.array_equal(moved.vertices, square_mesh.vertices)


def test_flow_reversible():
    mesh = mesh_domain(Disk(0.5), 0.1)
    V = squashing_field()
    there = flow_deform(mesh, V, 0.3)
    back = flow_deform(there, V, -0.3)
    assert np.max(np.abs(back.vertices - mesh.vertices)) <= 1e-8


def test_flow_decreases_height_and_keeps_unit_disk():
    mesh = mesh_domain(Disk(0.5), 0.1)
    V = squashing_field()
    prev = mesh.vertices[:, 1]
    cur = mesh
    for _ in range(5):
        cur = flow_deform(cur, V, 0.2)
        y = cur.vertices[:, 1]
        assert np.all(y < prev)
        assert np.max(np.linalg.norm(cur.vertices, axis=1)) <= 1 + 1e-8
        prev = y
    assert np.array_equal(cur.triangles, mesh.triangles)
    assert len(cur.boundary_loops()) == len(mesh.boundary_loops())


def test_flow_long_time_approaches_south_pole():
    x = flow_points(np.array([[0.2, 0.1], [-0.3, 0.0]]), squashing_field(), 40.0)
    assert np.allclose(x, [[0, -1], [0, -1]], atol=1e-3)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 2 * math.pi), st.floats(0.0, 0.99), st.floats(0.01, 2.0))
def test_flow_stays_in_closed_disk(theta, r, t):
    p = np.array([[r * math.cos(theta), r * math.sin(theta)]])
    q = flow_points(p, squashing_field(), t)
    assert np.linalg.norm(q) <= 1 + 1e-8


def test_flow_inversion_raises():
    from speclab.geometry import VectorField2D

    # differential rotation folds linear triangles although the exact flow is a diffeomorphism
    twist = VectorField2D(lambda p: 20 * np.sum(p**2, axis=1)[:, None] * np.column_stack([-p[:, 1], p[:, 0]]),
                          100.0, "twist")
    with pytest.raises(DeformationError):
        flow_deform(mesh_domain(Disk(1.0), 0.3), twist, 1.0)


# -- interpolation paths ------------------------------------------------------


def test_constant_interpolation_path(square_mesh):
    path = interpolation_path(square_mesh, square_mesh, 4)
    assert len(path.meshes) == 5
    assert all(np.array_equal(m.vertices, square_mesh.vertices) for m in path.meshes)


def test_disk_to_ellipse_path_monotone_area():
    d0 = mesh_domain(identity_map(), 0.15)
    d1 = mesh_domain(ellipse_map(1.0, 1.3), 0.15)
    path = interpolation_path(d0, d1, 10)
    assert len(path.meshes) == 11
    areas = []
    for m in path.meshes:
        _mesh_invariants(m)
        areas.append(m.area)
    assert np.all(np.diff(areas) > 0)
    assert np.allclose(path.t_grid, np.linspace(0, 1, 11))


def test_single_step_path_has_endpoints_only(square_mesh):
    path = interpolation_path(square_mesh, square_mesh, 1)
    assert list(path.t_grid) == [0.0, 1.0]


def test_incompatible_meshes_rejected(square):
    with pytest.raises(IncompatibleMeshError):
        interpolation_path(mesh_domain(square, 0.2), mesh_domain(square, 0.3), 3)


def test_reversed_path(square_mesh):
    d1 = square_mesh.with_vertices(square_mesh.vertices * 1.1)
    path = interpolation_path(square_mesh, d1, 4)
    rev = path.reversed()
    assert np.array_equal(rev.meshes[0].vertices, d1.vertices)
    assert rev.t_grid[0] == 0 and np.all(np.diff(rev.t_grid) > 0)
