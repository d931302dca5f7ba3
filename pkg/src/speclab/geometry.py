"""Domains, triangular meshes and one-parameter deformations.

Three kinds of domain are supported:

* :class:`Orthotope` -- the box ``prod (0, mu_i * pi)`` in any dimension,
  handled in closed form by the eigensolver;
* polygons and mapped unit disks, which are triangulated into a
  :class:`MeshedDomain` (two dimensions only);
* deformations of a mesh, either by the flow of a compactly supported
  :class:`VectorField2D` or by vertexwise interpolation between two meshes
  sharing the same connectivity.

All objects are immutable; arrays are stored read-only.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.spatial import Delaunay

from .errors import (
    DeformationError,
    GeometryError,
    IncompatibleMeshError,
    InvalidParameterError,
    ResolutionError,
)
from .exact import QuadSurd

NORMAL_TOL = 1e-12
MIN_VERTEX_SEPARATION = 1e-9


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


# ---------------------------------------------------------------------------
# Orthotopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Orthotope:
    """The box ``prod_i (0, mu_i * pi)``.

    ``inv_mu_sq`` optionally carries exact values of ``1 / mu_i**2`` in a
    common quadratic field; it enables exact spectral verdicts.
    """

    mu: tuple[float, ...]
    inv_mu_sq: tuple[QuadSurd, ...] | None = None

    @property
    def d(self) -> int:
        return len(self.mu)

    @property
    def lengths(self) -> np.ndarray:
        return np.asarray(self.mu) * np.pi

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def contains(self, points) -> np.ndarray:
        """Open-box membership test for an array of points of shape (P, d)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((p > 0.0) & (p < self.lengths), axis=1)


def make_orthotope(mu: Sequence[float], inv_mu_sq: Sequence[QuadSurd] | None = None) -> Orthotope:
    """Build the orthotope with side lengths ``mu_i * pi``.

    Parameters
    ----------
    mu : sequence of float
        Positive side-length factors.
    inv_mu_sq : sequence of QuadSurd, optional
        Exact values of ``1/mu_i**2``. They must agree with ``mu`` to 1e-12.
    """
    mu = tuple(float(m) for m in np.atleast_1d(np.asarray(mu, dtype=float)))
    if len(mu) < 1:
        raise InvalidParameterError("an orthotope needs at least one side")
    if not all(np.isfinite(m) and m > 0 for m in mu):
        raise InvalidParameterError(f"orthotope sides must be positive, got {mu}")
    if inv_mu_sq is not None:
        inv_mu_sq = tuple(v if isinstance(v, QuadSurd) else QuadSurd(v) for v in inv_mu_sq)
        if len(inv_mu_sq) != len(mu):
            raise InvalidParameterError("inv_mu_sq length does not match mu")
        for m, v in zip(mu, inv_mu_sq):
            if abs(float(v) - 1.0 / m**2) > 1e-12 * max(1.0, 1.0 / m**2):
                raise InvalidParameterError(f"exact value {v!r} does not match mu={m}")
    return Orthotope(mu=mu, inv_mu_sq=inv_mu_sq)


def canonical_rectangle() -> Orthotope:
    """Rectangle ``(0, pi) x (0, pi * 2**-0.25)``; inverse squared ratios (1, sqrt 2)."""
    return make_orthotope((1.0, 2.0**-0.25), inv_mu_sq=(QuadSurd(1), QuadSurd(0, 1, 2)))


# ---------------------------------------------------------------------------
# Meshes
# ---------------------------------------------------------------------------


def _signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p0, p1, p2 = (vertices[triangles[:, i]] for i in range(3))
    e1, e2 = p1 - p0, p2 - p0
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def _boundary_edges(triangles: np.ndarray) -> np.ndarray:
    """Edges used by exactly one triangle, oriented as in that (CCW) triangle."""
    edges = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    key = np.sort(edges, axis=1)
    _, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    return edges[counts[inverse] == 1]


def _edge_normals(vertices: np.ndarray, bedges: np.ndarray) -> np.ndarray:
    d = vertices[bedges[:, 1]] - vertices[bedges[:, 0]]
    n = np.column_stack([d[:, 1], -d[:, 0]])
    return n / np.linalg.norm(n, axis=1)[:, None]


@dataclass(frozen=True)
class MeshedDomain:
    """Conforming P1 triangulation of a planar domain.

    ``boundary_edges`` are oriented counter-clockwise with respect to the
    interior, so the outward normal of edge ``(i, j)`` is the tangent
    ``v_j - v_i`` rotated clockwise.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    normals: np.ndarray
    cell_areas: np.ndarray

    @classmethod
    def from_arrays(cls, vertices, triangles, *, orient: bool = False) -> "MeshedDomain":
        """Build and validate a mesh from raw arrays.

        With ``orient=True`` clockwise triangles are flipped; otherwise a
        non-positive triangle area raises :class:`DeformationError`.
        """
        v = np.asarray(vertices, dtype=float)
        t = np.asarray(triangles, dtype=np.int64).copy()
        if v.ndim != 2 or v.shape[1] != 2 or t.ndim != 2 or t.shape[1] != 3:
            raise GeometryError("vertices must be (V, 2) and triangles (T, 3)")
        areas = _signed_areas(v, t)
        if orient:
            flip = areas < 0
            t[flip] = t[flip][:, [0, 2, 1]]
            areas = np.abs(areas)
        if np.any(areas <= 0):
            raise DeformationError(
                f"{int(np.sum(areas <= 0))} triangles have non-positive area; remesh the domain"
            )
        bedges = _boundary_edges(t)
        mesh = cls(
            vertices=_frozen(v),
            triangles=_frozen(t, np.int64),
            boundary_edges=_frozen(bedges, np.int64),
            normals=_frozen(_edge_normals(v, bedges)),
            cell_areas=_frozen(areas),
        )
        mesh.validate()
        return mesh

    # -- derived quantities -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def area(self) -> float:
        return float(np.sum(self.cell_areas))

    @property
    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_edges)

    @property
    def interior_vertices(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.boundary_vertices] = False
        return np.flatnonzero(mask)

    @property
    def centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)

    def edges(self) -> np.ndarray:
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def max_edge_length(self) -> float:
        e = self.edges()
        return float(np.max(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)))

    def boundary_loops(self) -> list[list[int]]:
        """Vertex cycles traced along the oriented boundary edges."""
        nxt = {}
        for i, j in self.boundary_edges.tolist():
            if i in nxt:
                raise GeometryError(f"boundary vertex {i} has two outgoing edges")
            nxt[i] = j
        loops, seen = [], set()
        for start in nxt:
            if start in seen:
                continue
            loop, v = [], start
            while v not in seen:
                seen.add(v)
                loop.append(v)
                if v not in nxt:
                    raise GeometryError("boundary edges do not close into loops")
                v = nxt[v]
            if v != start:
                raise GeometryError("boundary edges do not close into loops")
            loops.append(loop)
        return loops

    def validate(self) -> None:
        if np.any(_signed_areas(self.vertices, self.triangles) <= 0):
            raise DeformationError("mesh has non-positive triangle areas")
        self.boundary_loops()
        if np.any(np.abs(np.linalg.norm(self.normals, axis=1) - 1.0) > NORMAL_TOL):
            raise GeometryError("boundary normals are not unit vectors")

    def with_vertices(self, vertices) -> "MeshedDomain":
        """Same connectivity, new vertex positions."""
        return MeshedDomain.from_arrays(vertices, self.triangles)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.vertices).tobytes())
        h.update(np.ascontiguousarray(self.triangles).tobytes())
        return h.hexdigest()

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "triangles": self.triangles.tolist(),
            "boundary_edges": self.boundary_edges.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MeshedDomain":
        mesh = cls.from_arrays(doc["vertices"], doc["triangles"])
        if "boundary_edges" in doc:
            given = {tuple(sorted(e)) for e in doc["boundary_edges"]}
            found = {tuple(sorted(e)) for e in mesh.boundary_edges.tolist()}
            if given != found:
                raise GeometryError("stored boundary_edges disagree with the triangulation")
        return mesh


# ---------------------------------------------------------------------------
# Domain descriptions and meshing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polygon:
    vertices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen(self.vertices))


@dataclass(frozen=True)
class MappedBall:
    """Image of the unit disk under ``mapping`` (a map of (P, 2) arrays)."""

    mapping: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Disk:
    """Disk of given radius centred at the origin, meshed as an inscribed polygon."""

    radius: float = 1.0

    def polygon(self, h: float) -> Polygon:
        return regular_polygon(max(8, int(math.ceil(2 * np.pi * self.radius / h - 1e-12))), self.radius)


def identity_map() -> MappedBall:
    return MappedBall(mapping=lambda p: np.array(p, dtype=float), name="identity")


def ellipse_map(a: float, b: float) -> MappedBall:
    if a <= 0 or b <= 0:
        raise InvalidParameterError("ellipse axes must be positive")
    scale = np.array([a, b], dtype=float)
    return MappedBall(mapping=lambda p: np.asarray(p) * scale, name="ellipse", params={"axes": [a, b]})


def affine_map(matrix, offset=(0.0, 0.0)) -> MappedBall:
    A = np.asarray(matrix, dtype=float)
    c = np.asarray(offset, dtype=float)
    if A.shape != (2, 2) or np.linalg.det(A) <= 0:
        raise InvalidParameterError("affine map needs an orientation-preserving 2x2 matrix")
    return MappedBall(
        mapping=lambda p: np.asarray(p) @ A.T + c,
        name="affine",
        params={"matrix": A.tolist(), "offset": c.tolist()},
    )


def regular_polygon(n_sides: int, radius: float = 1.0) -> Polygon:
    theta = 2 * np.pi * np.arange(n_sides) / n_sides
    return Polygon(radius * np.column_stack([np.cos(theta), np.sin(theta)]))


def polygon_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_intersect(p, q) -> bool:
    """True if any two non-adjacent closed polygon edges touch."""
    n = len(p)
    a, b = p, q

    def orient(u, v, w):
        return np.sign((v[..., 0] - u[..., 0]) * (w[..., 1] - u[..., 1])
                       - (v[..., 1] - u[..., 1]) * (w[..., 0] - u[..., 0]))

    A1, B1 = a[:, None, :], b[:, None, :]
    A2, B2 = a[None, :, :], b[None, :, :]
    o1, o2 = orient(A1, B1, A2), orient(A1, B1, B2)
    o3, o4 = orient(A2, B2, A1), orient(A2, B2, B1)
    cross = (o1 * o2 <= 0) & (o3 * o4 <= 0)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    adjacent = (i == j) | ((i + 1) % n == j) | ((j + 1) % n == i)
    return bool(np.any(cross & ~adjacent))


def _points_in_polygon(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    x, y = points[:, 0][:, None], points[:, 1][:, None]
    x0, y0 = poly[:, 0][None, :], poly[:, 1][None, :]
    x1, y1 = np.roll(poly[:, 0], -1)[None, :], np.roll(poly[:, 1], -1)[None, :]
    straddle = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    return np.sum(straddle & (x < xcross), axis=1) % 2 == 1


def _distance_to_polygon(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    a = poly[None, :, :]
    b = np.roll(poly, -1, axis=0)[None, :, :]
    p = points[:, None, :]
    ab = b - a
    s = np.clip(np.sum((p - a) * ab, axis=2) / np.sum(ab * ab, axis=2), 0.0, 1.0)
    closest = a + s[..., None] * ab
    return np.min(np.linalg.norm(p - closest, axis=2), axis=1)


def _check_polygon(vertices) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise GeometryError("a polygon needs at least three 2D vertices")
    if len(v) > 1 and np.allclose(v[0], v[-1]):
        v = v[:-1]
    diff = v[:, None, :] - v[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    np.fill_diagonal(dist, np.inf)
    if np.min(dist) < MIN_VERTEX_SEPARATION:
        raise GeometryError("polygon has vertices closer than 1e-9")
    if _segments_intersect(v, np.roll(v, -1, axis=0)):
        raise GeometryError("polygon is self-intersecting")
    area = polygon_area(v)
    if area < 0:
        v = v[::-1]
    return v


def _subdivide_boundary(poly: np.ndarray, h: float) -> np.ndarray:
    pts = []
    for a, b in zip(poly, np.roll(poly, -1, axis=0)):
        k = max(1, int(math.ceil(np.linalg.norm(b - a) / h - 1e-12)))
        s = np.arange(k)[:, None] / k
        pts.append(a + s * (b - a))
    return np.concatenate(pts)


def _triangulate(points: np.ndarray, poly: np.ndarray, n_boundary: int) -> np.ndarray:
    tri = Delaunay(points).simplices
    c = points[tri].mean(axis=1)
    keep = _points_in_polygon(c, poly)
    # a kept triangle must not straddle a concave notch: its edge midpoints lie inside or on the boundary
    for i, j in ((0, 1), (1, 2), (2, 0)):
        m = 0.5 * (points[tri[:, i]] + points[tri[:, j]])
        inside = _points_in_polygon(m, poly)
        out = np.flatnonzero(~inside)
        if len(out):
            inside[out] = _distance_to_polygon(m[out], poly) < 1e-10
        keep &= inside
    tri = tri[keep]
    areas = _signed_areas(points, tri)
    tri[areas < 0] = tri[areas < 0][:, [0, 2, 1]]
    return tri[np.abs(areas) > 1e-14 * np.max(np.abs(areas))]


def _mesh_polygon(poly: np.ndarray, h: float, smooth_iters: int = 6) -> MeshedDomain:
    ext = poly.max(axis=0) - poly.min(axis=0)
    if h <= 0 or not np.isfinite(h):
        raise InvalidParameterError("h must be positive")
    if h > 0.5 * float(np.min(ext)):
        raise ResolutionError(f"h={h} is too large to resolve a polygon of extent {ext.tolist()}")
    bpts = _subdivide_boundary(poly, h)
    nb = len(bpts)
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    dy = h * np.sqrt(3) / 2
    rows = np.arange(lo[1], hi[1] + dy, dy)
    lattice = []
    for r, y in enumerate(rows):
        xs = np.arange(lo[0] + (0.5 * h if r % 2 else 0.0), hi[0] + h, h)
        lattice.append(np.column_stack([xs, np.full_like(xs, y)]))
    lattice = np.concatenate(lattice)
    inside = _points_in_polygon(lattice, poly)
    lattice = lattice[inside]
    lattice = lattice[_distance_to_polygon(lattice, poly) > 0.55 * h]
    points = np.concatenate([bpts, lattice])
    tri = _triangulate(points, poly, nb)

    # Laplacian smoothing of interior points, boundary samples held fixed
    for _ in range(smooth_iters):
        e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
        e = np.concatenate([e, e[:, ::-1]])
        acc = np.zeros_like(points)
        cnt = np.zeros(len(points))
        np.add.at(acc, e[:, 0], points[e[:, 1]])
        np.add.at(cnt, e[:, 0], 1.0)
        new = points.copy()
        move = np.arange(len(points)) >= nb
        move &= cnt > 0
        new[move] = acc[move] / cnt[move, None]
        ok = _points_in_polygon(new[nb:], poly)
        new[nb:][~ok] = points[nb:][~ok]
        points = new
        tri = _triangulate(points, poly, nb)

    # refinement: split edges longer than the contract allows
    for _ in range(20):
        mesh_edges = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
        mesh_edges = np.unique(np.sort(mesh_edges, axis=1), axis=0)
        lengths = np.linalg.norm(points[mesh_edges[:, 0]] - points[mesh_edges[:, 1]], axis=1)
        long = lengths > 1.45 * h
        if not np.any(long):
            break
        mids = 0.5 * (points[mesh_edges[long, 0]] + points[mesh_edges[long, 1]])
        mids = mids[_distance_to_polygon(mids, poly) > 1e-9]
        if len(mids) == 0:
            break
        points = np.concatenate([points, mids])
        tri = _triangulate(points, poly, nb)

    used = np.unique(tri)
    remap = -np.ones(len(points), dtype=np.int64)
    remap[used] = np.arange(len(used))
    mesh = MeshedDomain.from_arrays(points[used], remap[tri])
    if len(mesh.boundary_edges) != nb or len(mesh.boundary_loops()) != 1:
        raise GeometryError("triangulation failed to recover the polygon boundary")
    if len(mesh.interior_vertices) == 0:
        raise ResolutionError("mesh has no interior vertices; decrease h")
    return mesh


def _mesh_orthotope(ortho: Orthotope, h: float, divisions: Sequence[int] | None = None) -> MeshedDomain:
    if ortho.d != 2:
        raise InvalidParameterError("the numeric solver is two-dimensional; orthotope must have d=2")
    L = ortho.lengths
    if divisions is None:
        if h <= 0 or not np.isfinite(h):
            raise InvalidParameterError("h must be positive")
        divisions = [max(1, int(math.ceil(Li / h - 1e-12))) for Li in L]
    nx, ny = (int(k) for k in divisions)
    if nx < 2 or ny < 2:
        raise ResolutionError(f"h={h} is too large to resolve the orthotope {ortho.mu}")
    x = np.linspace(0.0, L[0], nx + 1)
    y = np.linspace(0.0, L[1], ny + 1)
    X, Y = np.meshgrid(x, y, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange((nx + 1) * (ny + 1)).reshape(ny + 1, nx + 1)
    v00, v10 = idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()
    v01, v11 = idx[1:, :-1].ravel(), idx[1:, 1:].ravel()
    # every cell is split along its lower-left to upper-right diagonal
    tri = np.concatenate([np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])])
    return MeshedDomain.from_arrays(vertices, tri)


def mesh_domain(spec, h: float, *, divisions: Sequence[int] | None = None) -> MeshedDomain:
    """Triangulate a domain description.

    Parameters
    ----------
    spec : Orthotope, Polygon, (n, 2) array, MappedBall or dict
        Domain description. Dicts follow the JSON domain schema
        (see :func:`domain_from_dict`).
    h : float
        Target edge length; every mesh edge is at most ``1.5 * h``
        (mapped balls: before mapping).
    divisions : pair of int, optional
        Explicit cell counts for orthotopes, overriding ``h``. Meshes of
        different orthotopes with equal divisions share connectivity.
    """
    if isinstance(spec, dict):
        spec = domain_from_dict(spec)
    if isinstance(spec, Orthotope):
        return _mesh_orthotope(spec, h, divisions)
    if isinstance(spec, Disk):
        if h <= 0 or not np.isfinite(h):
            raise InvalidParameterError("h must be positive")
        spec = spec.polygon(h)
    if isinstance(spec, MappedBall):
        if h <= 0 or not np.isfinite(h):
            raise InvalidParameterError("h must be positive")
        disk = _mesh_polygon(_check_polygon(Disk(1.0).polygon(h).vertices), h)
        if spec.name == "identity":
            return disk
        return map_mesh(disk, spec.mapping)
    if isinstance(spec, Polygon):
        spec = spec.vertices
    poly = _check_polygon(spec)
    return _mesh_polygon(poly, h)


def map_mesh(mesh: MeshedDomain, mapping: Callable[[np.ndarray], np.ndarray]) -> MeshedDomain:
    """Apply a vertex map, keeping connectivity (raises on inversion)."""
    return mesh.with_vertices(np.asarray(mapping(np.array(mesh.vertices)), dtype=float))


def domain_from_dict(doc: dict):
    """Parse a JSON domain document.

    ``{"type": "orthotope", "mu": [...]}``,
    ``{"type": "polygon", "vertices": [[x, y], ...]}`` or
    ``{"type": "mapped_ball", "map": "identity" | "ellipse" | "affine", ...}``
    (``axes`` for ellipses; ``matrix`` and ``offset`` for affine maps).
    """
    kind = doc.get("type")
    if kind == "orthotope":
        exact = doc.get("inv_mu_sq")
        if exact is not None:
            exact = [QuadSurd(*e) if isinstance(e, (list, tuple)) else QuadSurd(e) for e in exact]
        return make_orthotope(doc["mu"], inv_mu_sq=exact)
    if kind == "polygon":
        return Polygon(np.asarray(doc["vertices"], dtype=float))
    if kind == "mapped_ball":
        m = doc.get("map", "identity")
        if m == "identity":
            return identity_map()
        if m == "ellipse":
            a, b = doc["axes"]
            return ellipse_map(a, b)
        if m == "affine":
            return affine_map(doc["matrix"], doc.get("offset", (0.0, 0.0)))
        raise InvalidParameterError(f"unknown ball map {m!r}")
    raise InvalidParameterError(f"unknown domain type {kind!r}")


def domain_to_dict(spec) -> dict:
    if isinstance(spec, Orthotope):
        doc = {"type": "orthotope", "mu": list(spec.mu)}
        if spec.inv_mu_sq is not None:
            doc["inv_mu_sq"] = [[str(q.a), str(q.b), q.D] for q in spec.inv_mu_sq]
        return doc
    if isinstance(spec, Polygon):
        return {"type": "polygon", "vertices": spec.vertices.tolist()}
    if isinstance(spec, MappedBall):
        return {"type": "mapped_ball", "map": spec.name, **spec.params}
    raise InvalidParameterError(f"cannot serialize domain {spec!r}")


# ---------------------------------------------------------------------------
# Vector fields and flows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorField2D:
    """A compactly supported planar vector field.

    ``support_radius`` is a radius outside which the field is identically
    zero, which makes the field complete.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    name: str = "custom"

    def __call__(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return self.evaluator(p)


def smoothstep5(s):
    """Quintic smoothstep on [0, 1]: C2, zero first and second derivatives at both ends."""
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (s * (6.0 * s - 15.0) + 10.0)


def radial_cutoff(points, inner_sq: float, outer_sq: float) -> np.ndarray:
    """1 for ``|x|^2 <= inner_sq``, 0 for ``|x|^2 >= outer_sq``, quintic in ``|x|^2`` between."""
    r2 = np.sum(np.asarray(points) ** 2, axis=1)
    return 1.0 - smoothstep5((r2 - inner_sq) / (outer_sq - inner_sq))


def squashing_core(points) -> np.ndarray:
    """``(x1 xd, ..., x_{d-1} xd, xd^2 - (|x|^2 + 1)/2)``; any dimension."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    xd = p[:, -1]
    out = p * xd[:, None]
    out[:, -1] = xd * xd - 0.5 * (np.sum(p * p, axis=1) + 1.0)
    return out


def squashing_field(rho: float = 4.0) -> VectorField2D:
    """Field with zeros at (0, +-1) that squashes the unit disk onto (0, -1).

    Equal to :func:`squashing_core` where ``|x|^2 < rho``, zero where
    ``|x|^2 > rho + 1``, blended by a quintic smoothstep in ``|x|^2``.
    """
    if not rho > 1:
        raise InvalidParameterError(f"rho must exceed 1, got {rho}")

    def ev(p):
        return squashing_core(p) * radial_cutoff(p, rho, rho + 1.0)[:, None]

    return VectorField2D(evaluator=ev, support_radius=math.sqrt(rho + 1.0), name=f"squashing(rho={rho})")


def stretch_field(axis: int, rate: float, support_radius: float = 10.0) -> VectorField2D:
    """Linear stretch ``x_axis * rate`` along one axis, cut off beyond ``support_radius``.

    On the orthotope with the far face at ``x_axis = L`` this gives normal
    speed ``rate * L`` on that face and zero on the opposite face.
    """
    inner = 0.8 * support_radius

    def ev(p):
        out = np.zeros_like(p)
        out[:, axis] = rate * p[:, axis]
        return out * radial_cutoff(p, inner**2, support_radius**2)[:, None]

    return VectorField2D(evaluator=ev, support_radius=support_radius, name=f"stretch(axis={axis},rate={rate})")


def flow_points(points, field: VectorField2D, t: float, *, rtol: float = 1e-10, atol: float = 1e-12):
    """Transport points by the flow of ``field`` for time ``t`` (DOP853)."""
    p0 = np.asarray(points, dtype=float)
    if not np.isfinite(t):
        raise InvalidParameterError("flow time must be finite")
    if t == 0:
        return p0.copy()
    shape = p0.shape

    def rhs(_, y):
        return field(y.reshape(shape)).ravel()

    sol = solve_ivp(rhs, (0.0, float(t)), p0.ravel(), method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise DeformationError(f"flow integration failed: {sol.message}")
    return sol.y[:, -1].reshape(shape)


def flow_deform(dom: MeshedDomain, field: VectorField2D, t: float, **kw) -> MeshedDomain:
    """Image of ``dom`` under the time-``t`` flow; connectivity is preserved."""
    moved = flow_points(dom.vertices, field, t, **kw)
    try:
        return dom.with_vertices(moved)
    except DeformationError as exc:
        raise DeformationError(f"flow for t={t} inverted the mesh; remesh or shorten t") from exc


# ---------------------------------------------------------------------------
# Deformation paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeformationPath:
    """Discrete family of meshes sharing connectivity, indexed by ``t_grid``."""

    base: MeshedDomain
    generator: object
    t_grid: np.ndarray
    meshes: tuple[MeshedDomain, ...]

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        if len(t) < 1 or t[0] != 0 or np.any(np.diff(t) <= 0):
            raise InvalidParameterError("t_grid must start at 0 and be strictly increasing")
        if len(self.meshes) != len(t):
            raise InvalidParameterError("one mesh per t value is required")
        if np.max(np.abs(self.meshes[0].vertices - self.base.vertices)) > 1e-12:
            raise InvalidParameterError("the time-0 mesh must equal the base mesh")
        object.__setattr__(self, "t_grid", _frozen(t))

    def __len__(self):
        return len(self.meshes)

    def reversed(self) -> "DeformationPath":
        """Same meshes traversed backwards, reparametrized to start at 0."""
        t = self.t_grid[-1] - self.t_grid[::-1]
        meshes = tuple(reversed(self.meshes))
        return DeformationPath(base=meshes[0], generator=("reversed", self.generator), t_grid=t, meshes=meshes)


def _check_compatible(dom0: MeshedDomain, dom1: MeshedDomain) -> None:
    if dom0.vertices.shape != dom1.vertices.shape or not np.array_equal(dom0.triangles, dom1.triangles):
        raise IncompatibleMeshError("meshes must share vertex count and connectivity")


def interpolation_path(dom0: MeshedDomain, dom1: MeshedDomain, steps: int) -> DeformationPath:
    """Vertexwise linear interpolation between two compatible meshes."""
    if steps < 1:
        raise InvalidParameterError("steps must be at least 1")
    _check_compatible(dom0, dom1)
    t = np.linspace(0.0, 1.0, steps + 1)
    meshes = []
    for s in t:
        if s == 0:
            meshes.append(dom0)
            continue
        v = (1.0 - s) * dom0.vertices + s * dom1.vertices
        try:
            meshes.append(dom0.with_vertices(v))
        except DeformationError as exc:
            raise DeformationError(f"interpolated mesh at t={s:.6g} is inverted") from exc
    return DeformationPath(base=dom0, generator={"type": "interpolation", "steps": steps}, t_grid=t, meshes=tuple(meshes))


def flow_path(dom: MeshedDomain, field: VectorField2D, t_grid: Sequence[float]) -> DeformationPath:
    """Meshes ``exp(t V)(dom)`` for each ``t`` in ``t_grid``, integrated step by step."""
    t = np.asarray(t_grid, dtype=float)
    meshes = [dom]
    for a, b in zip(t[:-1], t[1:]):
        meshes.append(flow_deform(meshes[-1], field, b - a))
    return DeformationPath(base=dom, generator=field, t_grid=t, meshes=tuple(meshes))
