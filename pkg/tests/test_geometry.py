from math import factorial, pi, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from conftest import random_rotation
from wulffkit.errors import DegenerateInput, OriginNotInterior, UnboundedBody
from wulffkit.geometry import (
    Ellipsoid,
    HPolytope,
    convex_hull,
    halfspace_to_vertices,
    polar,
    same_halfspaces,
    same_vertices,
    support_function,
    surface_area_measure,
    unit_ball_volume,
    vertices_to_halfspaces,
    volume,
)


def triangle_halfspaces(offset):
    ang = np.deg2rad([0.0, 120.0, 240.0])
    return HPolytope(np.c_[np.cos(ang), np.sin(ang)], np.full(3, offset))


def is_extreme_lp(points, k):
    """Brute-force extremality: ``points[k]`` is not a convex combination of the others."""
    others = np.delete(points, k, axis=0)
    m = others.shape[0]
    A_eq = np.vstack([others.T, np.ones(m)])
    b_eq = np.append(points[k], 1.0)
    res = linprog(np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res.status == 2  # infeasible


def random_polytope(seed, n, npts=None):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((npts or 3 * n + 5, n))
    P = convex_hull(pts)
    return convex_hull(P.vertices - P.centroid)


# --- hulls -----------------------------------------------------------------


def test_cross_polytope_hull():
    P = convex_hull([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert P.vertices.shape == (4, 2)
    assert P.n_facets == 4
    assert P.volume == pytest.approx(2.0, rel=1e-12)


def test_cube_hull_from_sign_vectors():
    signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * 3)).reshape(3, -1).T
    P = convex_hull(signs)
    assert P.vertices.shape == (8, 3)
    assert P.n_facets == 6
    assert P.volume == pytest.approx(8.0, rel=1e-12)


def test_symmetric_sphere_points_are_all_extreme():
    rng = np.random.default_rng(42)
    u = rng.standard_normal((100, 3))
    u /= np.linalg.norm(u, axis=1)[:, None]
    pts = np.vstack([u, -u])
    P = convex_hull(pts)
    assert P.vertices.shape[0] == 200
    # independent oracle: every input point is extreme by LP
    assert all(is_extreme_lp(pts, k) for k in range(0, 200, 7))


def test_hull_drops_interior_points_like_lp_oracle():
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((30, 3))
    P = convex_hull(pts)
    extreme = {k for k in range(30) if is_extreme_lp(pts, k)}
    assert len(extreme) == P.vertices.shape[0]
    assert same_vertices(P, convex_hull(pts[sorted(extreme)]), 1e-12)


def test_degenerate_inputs_raise():
    with pytest.raises(DegenerateInput):
        convex_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    with pytest.raises(DegenerateInput):
        convex_hull([[0, 0], [1, 1]])


def test_unbounded_halfspaces_rejected():
    with pytest.raises(UnboundedBody):
        HPolytope([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]], [1.0, 1.0, 1.0])


def test_halfspace_validation():
    with pytest.raises(OriginNotInterior):
        HPolytope([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], [1.0, 0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        HPolytope([[2.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], [1.0, 1.0, 1.0, 1.0])


# --- representation changes --------------------------------------------------


def test_square_halfspaces_to_vertices():
    H = HPolytope(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))
    V = halfspace_to_vertices(H)
    assert same_vertices(V, convex_hull([[1, 1], [1, -1], [-1, 1], [-1, -1]]), 1e-12)


def test_triangle_halfspaces_to_vertices():
    V = halfspace_to_vertices(triangle_halfspaces(1 / sqrt(2)))
    assert V.vertices.shape == (3, 2)
    # circumradius is twice the inradius
    assert np.allclose(np.linalg.norm(V.vertices, axis=1), sqrt(2), atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_halfspace_round_trip(seed):
    P = random_polytope(seed, 3)
    H = vertices_to_halfspaces(P)
    H2 = vertices_to_halfspaces(halfspace_to_vertices(H))
    assert same_halfspaces(H.canonical(), H2.canonical(), 1e-9)


def test_canonical_drops_redundant_halfspaces():
    a = np.vstack([np.eye(2), -np.eye(2), [[1 / sqrt(2), 1 / sqrt(2)]]])
    H = HPolytope(a, [1, 1, 1, 1, 5.0])
    assert H.canonical().normals.shape[0] == 4


# --- volumes and centroids ---------------------------------------------------


def test_reference_volumes():
    assert volume(convex_hull([[1, 1], [1, -1], [-1, 1], [-1, -1]])) == pytest.approx(4.0, rel=1e-12)
    assert volume(triangle_halfspaces(1 / sqrt(2))) == pytest.approx(3 * sqrt(3) / 2, rel=1e-12)
    r2 = sqrt(2)
    assert volume(convex_hull([[r2, 0], [-r2, 0], [0, r2], [0, -r2]])) == pytest.approx(4.0, rel=1e-12)


def test_reference_centroids():
    assert np.allclose(convex_hull([[0, 0], [1, 0], [0, 1]]).centroid, [1 / 3, 1 / 3], atol=1e-15)
    from wulffkit.measures import simplex_vertices

    for n in (2, 3, 4):
        S = convex_hull(sqrt(n) * simplex_vertices(n))
        assert np.linalg.norm(S.centroid) <= 1e-12


@pytest.mark.parametrize("seed", range(8))
def test_volume_matches_qhull(seed):
    for n in (2, 3, 4):
        P = random_polytope(seed, n)
        assert P.volume == pytest.approx(ConvexHull(P.vertices).volume, rel=1e-10)


def test_centroid_monte_carlo():
    P = random_polytope(11, 3)
    rng = np.random.default_rng(0)
    lo, hi = P.vertices.min(0), P.vertices.max(0)
    x = rng.uniform(lo, hi, (400_000, 3))
    inside = x[np.all(x @ P.normals.T <= P.offsets, axis=1)]
    assert np.allclose(inside.mean(0), P.centroid, atol=0.01)
    assert inside.shape[0] / x.shape[0] * np.prod(hi - lo) == pytest.approx(P.volume, rel=0.01)


@given(seed=st.integers(0, 10**6), n=st.integers(2, 4))
def test_volume_linear_covariance(seed, n):
    rng = np.random.default_rng(seed)
    P = random_polytope(seed, n)
    T = rng.standard_normal((n, n)) + 2 * np.eye(n)
    if abs(np.linalg.det(T)) < 1e-2:
        return
    assert P.transform(T).volume == pytest.approx(abs(np.linalg.det(T)) * P.volume, rel=1e-9)


@given(seed=st.integers(0, 10**6), n=st.integers(2, 4))
def test_rotation_invariance(seed, n):
    rng = np.random.default_rng(seed)
    P = convex_hull(rng.standard_normal((3 * n + 4, n)))
    Q = random_rotation(rng, n)
    R = P.transform(Q)
    assert R.volume == pytest.approx(P.volume, rel=1e-9)
    assert np.linalg.norm(R.centroid) == pytest.approx(np.linalg.norm(P.centroid), rel=1e-9, abs=1e-12)


@given(seed=st.integers(0, 10**6), n=st.integers(2, 4))
def test_volume_independent_of_conversion_path(seed, n):
    P = random_polytope(seed, n)
    H = vertices_to_halfspaces(P)
    via_h = halfspace_to_vertices(H).volume
    via_double_polar = halfspace_to_vertices(polar(polar(H))).volume
    assert via_h == pytest.approx(P.volume, rel=1e-9)
    assert via_double_polar == pytest.approx(P.volume, rel=1e-9)


# --- polarity ----------------------------------------------------------------


def test_polar_of_square_is_cross_polytope():
    H = HPolytope(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))
    assert same_vertices(polar(H), convex_hull([[1, 0], [-1, 0], [0, 1], [0, -1]]), 1e-12)


def test_polar_of_triangle():
    ang = np.deg2rad([0.0, 120.0, 240.0])
    u = np.c_[np.cos(ang), np.sin(ang)]
    assert same_vertices(polar(triangle_halfspaces(1 / sqrt(2))), convex_hull(sqrt(2) * u), 1e-12)


@given(seed=st.integers(0, 10**6), n=st.integers(2, 4))
def test_polar_involution(seed, n):
    P = random_polytope(seed, n)
    assert same_vertices(polar(polar(P)), P, 1e-9)
    H = vertices_to_halfspaces(P)
    assert same_halfspaces(polar(polar(H)).canonical(), H.canonical(), 1e-9)


def test_polar_requires_interior_origin():
    P = convex_hull([[1, 1], [2, 1], [1, 2]])
    with pytest.raises(OriginNotInterior):
        polar(P)


# --- surface area measure and support function -------------------------------


def test_square_surface_area_measure():
    facets = surface_area_measure(convex_hull([[1, 1], [1, -1], [-1, 1], [-1, -1]]))
    assert len(facets) == 4
    for fd in facets:
        assert fd.area == pytest.approx(2.0)
        assert fd.support == pytest.approx(1.0)
        assert np.isclose(np.abs(fd.normal).max(), 1.0)


def test_triangle_facets_equal():
    r = 0.7
    facets = surface_area_measure(triangle_halfspaces(r))
    assert np.allclose([fd.area for fd in facets], 2 * sqrt(3) * r)
    assert np.allclose([fd.support for fd in facets], r)


def test_cube_facet_areas_3d():
    signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * 3)).reshape(3, -1).T
    areas = [fd.area for fd in surface_area_measure(convex_hull(signs))]
    assert np.allclose(areas, 4.0)


@given(seed=st.integers(0, 10**6), n=st.integers(2, 5))
def test_minkowski_relation(seed, n):
    P = convex_hull(np.random.default_rng(seed).standard_normal((3 * n + 4, n)))
    facets = surface_area_measure(P)
    total = sum(fd.area for fd in facets)
    assert np.linalg.norm(sum(fd.area * fd.normal for fd in facets)) <= 1e-9 * total


def test_minkowski_relation_seed_7():
    P = convex_hull(np.random.default_rng(7).standard_normal((20, 3)))
    assert np.linalg.norm(sum(fd.area * fd.normal for fd in surface_area_measure(P))) <= 1e-9


@given(seed=st.integers(0, 10**6), n=st.integers(2, 4))
def test_divergence_theorem_volume(seed, n):
    """V = (1/n) sum_j h_j S_j, an independent volume formula."""
    P = random_polytope(seed, n)
    facets = surface_area_measure(P)
    assert sum(fd.support * fd.area for fd in facets) / n == pytest.approx(P.volume, rel=1e-9)


def test_support_function_values():
    sq = convex_hull([[1, 1], [1, -1], [-1, 1], [-1, -1]])
    assert support_function(sq, [1, 0]) == pytest.approx(1.0)
    assert support_function(sq, np.array([1, 1]) / sqrt(2)) == pytest.approx(sqrt(2))


def test_ellipsoid_support_by_boundary_sampling(rng):
    M = rng.standard_normal((3, 3))
    A = M @ M.T + np.eye(3)
    E = Ellipsoid(np.zeros(3), A)
    # boundary points A^{1/2} v for unit v
    w, Q = np.linalg.eigh(A)
    root = Q @ np.diag(np.sqrt(w)) @ Q.T
    v = rng.standard_normal((200_000, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    bnd = v @ root
    for _ in range(5):
        u = rng.standard_normal(3)
        u /= np.linalg.norm(u)
        assert E.support(u) == pytest.approx(sqrt(u @ A @ u))
        assert (bnd @ u).max() == pytest.approx(E.support(u), rel=1e-3)


# --- balls and ellipsoids ----------------------------------------------------


def test_unit_ball_volumes():
    assert unit_ball_volume(2) == pytest.approx(pi)
    assert unit_ball_volume(3) == pytest.approx(4 * pi / 3)
    assert unit_ball_volume(4) == pytest.approx(pi**2 / 2)
    for n in range(3, 8):
        assert unit_ball_volume(n) == pytest.approx(unit_ball_volume(n - 2) * 2 * pi / n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ellipsoid_volume_monte_carlo(n):
    rng = np.random.default_rng(n)
    M = rng.standard_normal((n, n))
    E = Ellipsoid(rng.standard_normal(n), M @ M.T + 0.5 * np.eye(n))
    half = np.sqrt(np.diag(E.shape))
    x = rng.uniform(E.center - half, E.center + half, (10**6, n))
    est = E.contains(x).mean() * np.prod(2 * half)
    assert est == pytest.approx(E.volume, rel=0.01)


def test_ellipsoid_validation():
    with pytest.raises(ValueError):
        Ellipsoid(np.zeros(2), [[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(ValueError):
        Ellipsoid(np.zeros(2), [[1.0, 0.0], [0.0, -1.0]])


def test_ellipsoid_transform_and_polar(rng):
    A = np.diag([4.0, 1.0])
    E = Ellipsoid(np.zeros(2), A)
    T = rng.standard_normal((2, 2)) + 3 * np.eye(2)
    assert E.transform(T).volume == pytest.approx(abs(np.linalg.det(T)) * E.volume)
    P = E.polar()
    assert np.allclose(P.shape, np.diag([0.25, 1.0]))
    # origin-symmetric ellipsoids: V(E) V(E*) = kappa_n^2
    assert E.volume * P.volume == pytest.approx(pi**2)


def test_inscribed_simplex_volume():
    from wulffkit.measures import simplex_vertices

    for n in (2, 3, 4):
        S = convex_hull(simplex_vertices(n))
        # regular simplex inscribed in the unit sphere
        expected = (n + 1) ** ((n + 1) / 2) / (factorial(n) * n ** (n / 2))
        assert S.volume == pytest.approx(expected, rel=1e-12)
