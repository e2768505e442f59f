"""Convex geometry kernels for low-dimensional polytopes and ellipsoids.

Polytopes come in two flavours.  :class:`HPolytope` stores a system of
half-spaces ``x . normal <= offset`` with unit normals and positive offsets,
so the origin is always interior.  :class:`VPolytope` stores the extreme
points together with the facet structure and a boundary triangulation,
which is what volume, centroid and surface-area computations run on.

Hull computation is delegated to Qhull (via :mod:`scipy.spatial`); the
triangulated boundary it returns is regrouped into true facets here.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial, gamma, pi, sqrt

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DegenerateInput, OriginNotInterior, UnboundedBody

MAX_DIM = 6
FACET_TOL = 1e-10  # facet membership / coplanarity
SNAP_DECIMALS = 12  # canonical ordering snaps coordinates to 1e-12
UNIT_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _lex_order(rows: np.ndarray) -> np.ndarray:
    snapped = np.round(rows, SNAP_DECIMALS) + 0.0  # +0.0 folds -0.0
    return np.lexsort(snapped.T[::-1])


@dataclass(frozen=True, eq=False)
class FacetData:
    normal: np.ndarray
    area: float
    support: float


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Full-dimensional polytope given by its extreme points.

    Build instances with :func:`convex_hull`; the constructor trusts that
    ``vertices`` are extreme and that the facet data is consistent.
    ``simplices`` is a triangulation of the boundary into (n-1)-simplices,
    ``simplex_facet[k]`` names the facet containing simplex ``k``.
    """

    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    facet_vertices: tuple
    simplices: np.ndarray
    simplex_facet: np.ndarray

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_facets(self) -> int:
        return self.normals.shape[0]

    @cached_property
    def _fan(self):
        # cone volumes and centroids of the fan from the vertex mean
        apex = self.vertices.mean(axis=0)
        pts = self.vertices[self.simplices]  # (k, n, n)
        vols = np.abs(np.linalg.det(pts - apex)) / factorial(self.dim)
        cents = (pts.sum(axis=1) + apex) / (self.dim + 1)
        return vols, cents

    @cached_property
    def volume(self) -> float:
        return float(self._fan[0].sum())

    @cached_property
    def centroid(self) -> np.ndarray:
        vols, cents = self._fan
        return _frozen(vols @ cents / vols.sum())

    def support(self, u) -> float:
        return float(np.max(self.vertices @ np.asarray(u, dtype=float)))

    def contains_origin(self, tol: float = FACET_TOL) -> bool:
        return bool(np.all(self.offsets > tol))

    def transform(self, T) -> "VPolytope":
        return convex_hull(self.vertices @ np.asarray(T, dtype=float).T)

    def translate(self, v) -> "VPolytope":
        return convex_hull(self.vertices + np.asarray(v, dtype=float))

    def scale(self, lam: float) -> "VPolytope":
        return convex_hull(lam * self.vertices)


@dataclass(frozen=True, eq=False)
class HPolytope:
    """Bounded intersection of half-spaces ``{x : x . normals[i] <= offsets[i]}``.

    Normals must be unit vectors and offsets positive; boundedness is checked
    on construction.  Use :meth:`from_inequalities` for unnormalized data.
    """

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.normals, dtype=float))
        b = np.asarray(self.offsets, dtype=float).ravel()
        if a.shape[0] != b.shape[0]:
            raise ValueError("normals and offsets differ in length")
        n = a.shape[1]
        if not 2 <= n <= MAX_DIM:
            raise ValueError(f"dimension {n} outside supported range 2..{MAX_DIM}")
        norms = np.linalg.norm(a, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            bad = int(np.argmax(np.abs(norms - 1.0)))
            raise ValueError(f"normal {bad} is not a unit vector (norm {norms[bad]!r})")
        if np.any(b <= 0):
            raise OriginNotInterior("every offset must be positive")
        object.__setattr__(self, "normals", _frozen(a))
        object.__setattr__(self, "offsets", _frozen(b))
        # boundedness <=> origin interior to conv{a_i / b_i}; keep the hull
        try:
            dual = convex_hull(a / b[:, None])
        except DegenerateInput as exc:
            raise UnboundedBody("normals do not positively span R^n") from exc
        if not dual.contains_origin():
            raise UnboundedBody("normals do not positively span R^n")
        object.__setattr__(self, "_dual", dual)

    @classmethod
    def from_inequalities(cls, A, b) -> "HPolytope":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        norms = np.linalg.norm(A, axis=1)
        return cls(A / norms[:, None], b / norms)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all(x @ self.normals.T <= self.offsets + tol, axis=-1)

    def canonical(self) -> "HPolytope":
        """Irredundant half-spaces in lexicographic order of normals."""
        keep = _dual_vertex_rows(self)
        a, b = self.normals[keep], self.offsets[keep]
        order = _lex_order(a)
        return HPolytope(a[order], b[order])


def _dual_vertex_rows(P: HPolytope) -> np.ndarray:
    """Indices of the irredundant half-spaces of ``P``."""
    pts = P.normals / P.offsets[:, None]
    dual_v = P._dual.vertices
    d = np.linalg.norm(pts[:, None, :] - dual_v[None, :, :], axis=2)
    return np.flatnonzero(d.min(axis=1) <= 1e-9 * max(1.0, np.abs(dual_v).max()))


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """``{x : (x - center)^T shape^{-1} (x - center) <= 1}``, shape SPD."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.shape, dtype=float)
        c = np.asarray(self.center, dtype=float).ravel()
        if A.shape != (c.size, c.size):
            raise ValueError("shape must be n x n with n = len(center)")
        if np.max(np.abs(A - A.T)) > 1e-12 * max(1.0, np.abs(A).max()):
            raise ValueError("shape matrix is not symmetric")
        A = 0.5 * (A + A.T)
        if np.linalg.eigvalsh(A)[0] <= 0:
            raise ValueError("shape matrix is not positive definite")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "shape", _frozen(A))

    @classmethod
    def ball(cls, n: int, radius: float = 1.0) -> "Ellipsoid":
        return cls(np.zeros(n), radius**2 * np.eye(n))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def volume(self) -> float:
        return ellipsoid_volume(self.shape)

    def support(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(self.center @ u + sqrt(u @ self.shape @ u))

    def contains(self, x, tol: float = 0.0) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.center
        q = np.einsum("...i,ij,...j->...", d, np.linalg.inv(self.shape), d)
        return q <= 1.0 + tol

    def transform(self, T) -> "Ellipsoid":
        T = np.asarray(T, dtype=float)
        return Ellipsoid(T @ self.center, T @ self.shape @ T.T)

    def polar(self) -> "Ellipsoid":
        """Polar of an origin-centred ellipsoid."""
        if np.linalg.norm(self.center) > 1e-12:
            raise OriginNotInterior("polar of an off-centre ellipsoid is not an ellipsoid of this form")
        return Ellipsoid(np.zeros(self.dim), np.linalg.inv(self.shape))


# ---------------------------------------------------------------------------
# hulls and representation changes


def _check_full_dimensional(pts: np.ndarray) -> None:
    npts, n = pts.shape
    if n < 2 or n > MAX_DIM:
        raise DegenerateInput(f"dimension {n} outside supported range 2..{MAX_DIM}")
    if npts < n + 1:
        raise DegenerateInput(f"need at least {n + 1} points in R^{n}, got {npts}")
    centered = pts - pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    if s[-1] <= FACET_TOL * max(1.0, s[0]):
        raise DegenerateInput("points lie in a proper affine subspace")


def convex_hull(points) -> VPolytope:
    """Extreme points and facets of ``conv(points)``.

    Raises :class:`DegenerateInput` when the points do not span R^n
    affinely.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    _check_full_dimensional(pts)
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateInput(str(exc).splitlines()[0]) from exc

    # regroup Qhull's triangulated facets into geometric facets
    scale = max(1.0, float(np.abs(pts).max()))
    normals, offsets, members = [], [], []
    simplex_facet = np.empty(len(hull.simplices), dtype=int)
    for k, eq in enumerate(hull.equations):
        nrm, off = eq[:-1], -eq[-1]
        for j, (m, o) in enumerate(zip(normals, offsets)):
            if np.abs(m - nrm).max() <= 1e-9 and abs(o - off) <= 1e-9 * scale:
                simplex_facet[k] = j
                members[j].update(hull.simplices[k].tolist())
                break
        else:
            simplex_facet[k] = len(normals)
            normals.append(nrm)
            offsets.append(off)
            members.append(set(hull.simplices[k].tolist()))

    vidx = np.array(sorted(hull.vertices))
    vidx = vidx[_lex_order(pts[vidx])]
    remap = {int(old): new for new, old in enumerate(vidx)}
    verts = pts[vidx]

    normals = np.array(normals)
    offsets = np.array(offsets)
    # tighten offsets against the actual facet vertices
    for j, mem in enumerate(members):
        offsets[j] = float(np.mean(pts[sorted(mem)] @ normals[j]))
    forder = _lex_order(normals)
    frank = np.empty_like(forder)
    frank[forder] = np.arange(len(forder))

    simplices = np.vectorize(remap.__getitem__)(hull.simplices)
    facet_vertices = tuple(
        tuple(sorted(remap[i] for i in members[j])) for j in forder
    )
    return VPolytope(
        vertices=_frozen(verts),
        normals=_frozen(normals[forder] + 0.0),
        offsets=_frozen(offsets[forder]),
        facet_vertices=facet_vertices,
        simplices=simplices,
        simplex_facet=frank[simplex_facet],
    )


def halfspace_to_vertices(P: HPolytope) -> VPolytope:
    """Vertex representation of ``P`` computed through polar duality.

    Each facet ``y . nu <= d`` of ``conv{a_i / b_i}`` yields the vertex
    ``nu / d`` of ``P``.
    """
    dual = P._dual
    if not dual.contains_origin():
        raise UnboundedBody("origin is not interior to the dual hull")
    return convex_hull(dual.normals / dual.offsets[:, None])


def vertices_to_halfspaces(V: VPolytope) -> HPolytope:
    if not V.contains_origin():
        raise OriginNotInterior("H-representation with positive offsets needs the origin inside")
    return HPolytope(V.normals, V.offsets)


def as_vpolytope(body) -> VPolytope:
    if isinstance(body, VPolytope):
        return body
    if isinstance(body, HPolytope):
        return halfspace_to_vertices(body)
    return convex_hull(body)


def volume(P) -> float:
    """n-dimensional volume, by fanning the boundary triangulation from the
    vertex mean."""
    return as_vpolytope(P).volume


def centroid(P) -> np.ndarray:
    return as_vpolytope(P).centroid


def polar(body):
    """Polar body in the opposite representation.

    ``{x . a_i <= b_i}`` maps to ``conv{a_i / b_i}`` and ``conv{v_j}`` maps
    to ``{x . v_j <= 1}``.  Redundant data is dropped.
    """
    if isinstance(body, HPolytope):
        return body._dual
    if isinstance(body, VPolytope):
        if not body.contains_origin():
            raise OriginNotInterior("origin is not interior to the body")
        v = body.vertices
        r = np.linalg.norm(v, axis=1)
        return HPolytope(v / r[:, None], 1.0 / r)
    raise TypeError(f"cannot take the polar of {type(body).__name__}")


def surface_area_measure(P) -> list[FacetData]:
    """Facet normals, (n-1)-volumes and support values of ``P``."""
    V = as_vpolytope(P)
    n = V.dim
    pts = V.vertices[V.simplices]  # (k, n, n)
    edges = pts[:, 1:, :] - pts[:, :1, :]  # (k, n-1, n)
    frames = np.concatenate([V.normals[V.simplex_facet][:, None, :], edges], axis=1)
    areas = np.abs(np.linalg.det(frames)) / factorial(n - 1)
    per_facet = np.bincount(V.simplex_facet, weights=areas, minlength=V.n_facets)
    return [
        FacetData(normal=V.normals[j], area=float(per_facet[j]), support=float(V.offsets[j]))
        for j in range(V.n_facets)
    ]


def support_function(body, u) -> float:
    """``h(body, u) = max_{y in body} u . y``."""
    if isinstance(body, (VPolytope, Ellipsoid)):
        return body.support(u)
    return as_vpolytope(body).support(u)


def unit_ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball in R^n."""
    if n < 1:
        raise ValueError("n must be positive")
    return pi ** (n / 2) / gamma(n / 2 + 1)


def ellipsoid_volume(shape) -> float:
    A = np.asarray(shape, dtype=float)
    return unit_ball_volume(A.shape[0]) * sqrt(np.linalg.det(A))


def same_vertices(P, Q, tol: float = 1e-9) -> bool:
    """True when the two vertex sets match one-to-one within ``tol``."""
    a = as_vpolytope(P).vertices
    b = as_vpolytope(Q).vertices
    if a.shape != b.shape:
        return False
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return bool(np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol))


def same_halfspaces(P: HPolytope, Q: HPolytope, tol: float = 1e-9) -> bool:
    a = np.column_stack([P.normals, P.offsets])
    b = np.column_stack([Q.normals, Q.offsets])
    if a.shape != b.shape:
        return False
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return bool(np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol))
