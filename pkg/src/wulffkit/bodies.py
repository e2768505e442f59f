"""Convex bodies, their L_p surface area measures and extremal ellipsoids.

A :class:`ConvexBody` is a polytope with the origin in its interior, held in
both representations.  On top of it this module provides

* ``S_p(K, .)`` and the L_p mixed volume ``V_p(K, L)``;
* the John, Loewner and L_p John ellipsoids (``p`` in 1, 2, inf);
* position certificates (isotropy of ``S_2`` and John contact measures);
* the volume-ratio inequalities for bodies and for 1-centered isotropic
  measures, as :class:`~wulffkit.reports.InequalityReport` objects.

For the L_2 John ellipsoid a closed form is used: maximizing ``log det A``
under ``(1/n) tr(A M) <= V(K)`` with ``M = sum_j h_j^{-1} S_j u_j u_j^T``
gives ``A = V(K) M^{-1}`` by the Lagrange condition ``A^{-1} = lambda M``.
:func:`e2_ellipsoid_numeric` solves the same problem with a generic optimizer
as an independent check.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial, sqrt

import numpy as np
from scipy.optimize import minimize, nnls

from .ellipsoids import john_inscribed, loewner_enclosing, petty_factor
from .errors import (
    CentroidNotAtOrigin,
    HypothesisViolated,
    NotInJohnPosition,
    OriginNotInterior,
    SingularM,
    SolverFailure,
)
from .geometry import (
    Ellipsoid,
    FacetData,
    HPolytope,
    VPolytope,
    convex_hull,
    halfspace_to_vertices,
    polar,
    same_vertices,
    surface_area_measure,
    unit_ball_volume,
)
from .measures import DEFAULT_TOL, DiscreteMeasure, _constraint_system, f_center_defect, isotropy_defect
from .reports import InequalityReport
from .wulff import build_wulff, is_regular_simplex_support

CENTROID_TOL = 1e-9
JOHN_POSITION_TOL = 1e-5
CONTACT_TOL = 1e-5
CERT_RESIDUAL = 1e-5
SYMMETRY_TOL = 1e-9
COROLLARY_EQ_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Polytope with the origin in its interior, in both representations."""

    vbody: VPolytope
    hbody: HPolytope

    def __post_init__(self):
        if not self.vbody.contains_origin():
            raise OriginNotInterior("the origin must be interior to the body")

    @classmethod
    def from_vpolytope(cls, P: VPolytope) -> "ConvexBody":
        if not P.contains_origin():
            raise OriginNotInterior("the origin must be interior to the body")
        return cls(P, HPolytope(P.normals, P.offsets))

    @classmethod
    def from_points(cls, points) -> "ConvexBody":
        return cls.from_vpolytope(convex_hull(points))

    @classmethod
    def from_halfspaces(cls, normals, offsets) -> "ConvexBody":
        H = HPolytope.from_inequalities(normals, offsets)
        V = halfspace_to_vertices(H)
        return cls(V, HPolytope(V.normals, V.offsets))

    @property
    def dim(self) -> int:
        return self.vbody.dim

    @cached_property
    def facets(self) -> list[FacetData]:
        return surface_area_measure(self.vbody)

    @property
    def normals(self) -> np.ndarray:
        return self.vbody.normals

    @property
    def supports(self) -> np.ndarray:
        return self.vbody.offsets

    @cached_property
    def areas(self) -> np.ndarray:
        return np.array([fd.area for fd in self.facets])

    @property
    def volume(self) -> float:
        return self.vbody.volume

    @property
    def centroid(self) -> np.ndarray:
        return self.vbody.centroid

    def support(self, u) -> float:
        return self.vbody.support(u)

    def translate(self, v) -> "ConvexBody":
        return ConvexBody.from_points(self.vbody.vertices + np.asarray(v, dtype=float))

    def transform(self, T) -> "ConvexBody":
        return ConvexBody.from_points(self.vbody.vertices @ np.asarray(T, dtype=float).T)

    def centered(self) -> "ConvexBody":
        """Translate of the body with centroid at the origin."""
        return ConvexBody.from_points(self.vbody.vertices - self.centroid)

    def polar(self) -> "ConvexBody":
        return ConvexBody.from_vpolytope(polar(self.hbody))

    def is_origin_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        return same_vertices(self.vbody, convex_hull(-self.vbody.vertices), tol)


def gen_random_body(n: int, npts: int | None = None, seed: int = 0, symmetric: bool = False) -> ConvexBody:
    """Hull of Gaussian points, translated to centroid zero.

    With ``symmetric`` the points are reflected through the origin first, so
    the body is origin-symmetric.
    """
    rng = np.random.default_rng(seed)
    npts = npts if npts is not None else 4 * n + 4
    pts = rng.standard_normal((npts, n))
    if symmetric:
        return ConvexBody.from_points(np.vstack([pts, -pts]))
    P = convex_hull(pts)
    return ConvexBody.from_points(P.vertices - P.centroid)


def regular_simplex_body(n: int, inradius: float = 1.0) -> ConvexBody:
    """Regular simplex with centroid at the origin and the given inradius."""
    from .measures import simplex_vertices

    return ConvexBody.from_points(inradius * n * simplex_vertices(n))


def cube_body(n: int, half_side: float = 1.0) -> ConvexBody:
    eye = np.eye(n)
    return ConvexBody.from_halfspaces(np.vstack([eye, -eye]), np.full(2 * n, half_side))


# ---------------------------------------------------------------------------
# L_p surface area measures and mixed volumes


@dataclass(frozen=True, eq=False)
class SpMeasure:
    """``S_p(K, .) = h(K, .)^{1-p} S(K, .)`` on the facet normals of ``K``."""

    p: float
    normals: np.ndarray
    weights: np.ndarray

    @property
    def entries(self) -> list[tuple[np.ndarray, float]]:
        return list(zip(self.normals, self.weights.tolist()))

    def as_measure(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.normals, self.weights)


def sp_measure(K: ConvexBody, p: float) -> SpMeasure:
    if not p >= 1:
        raise ValueError(f"p = {p!r} must be at least 1")
    return SpMeasure(float(p), K.normals, K.supports ** (1.0 - p) * K.areas)


def _support_values(L, normals: np.ndarray) -> np.ndarray:
    if isinstance(L, Ellipsoid):
        if not L.contains(np.zeros(L.dim), tol=-1e-12):
            raise OriginNotInterior("the ellipsoid must contain the origin in its interior")
        return normals @ L.center + np.sqrt(np.einsum("ij,jk,ik->i", normals, L.shape, normals))
    if isinstance(L, ConvexBody):
        return (normals @ L.vbody.vertices.T).max(axis=1)
    raise TypeError(f"unsupported body type {type(L).__name__}")


def vp_mixed_volume(K: ConvexBody, L, p: float) -> float:
    """``(1/n) sum_j h(L, u_j)^p h(K, u_j)^{1-p} S_j`` over the facets of ``K``."""
    S = sp_measure(K, p)
    h = _support_values(L, S.normals)
    return float(S.weights @ h**p) / K.dim


def wulff_reconstruction_check(K: ConvexBody, p: float, tol: float = 1e-9) -> bool:
    """Wulff shape of ``(S_p(K, .), h(K, .))`` compared with ``K``."""
    S = sp_measure(K, p)
    W = build_wulff(S.as_measure(), K.supports, check_isotropy=False)
    scale = max(1.0, float(np.abs(K.vbody.vertices).max()))
    return same_vertices(W.vbody, K.vbody, tol * scale)


# ---------------------------------------------------------------------------
# ellipsoids


def john_ellipsoid(K: ConvexBody) -> Ellipsoid:
    """Maximal-volume ellipsoid contained in ``K``."""
    return john_inscribed(K.normals, K.supports, center0=K.vbody.vertices.mean(axis=0))


def loewner_ellipsoid(K: ConvexBody) -> Ellipsoid:
    """Minimal-volume ellipsoid containing ``K``."""
    return loewner_enclosing(K.vbody.vertices)


def _m_matrix(K: ConvexBody) -> np.ndarray:
    w = K.areas / K.supports
    return np.einsum("j,ji,jk->ik", w, K.normals, K.normals)


def e2_ellipsoid(K: ConvexBody) -> Ellipsoid:
    """L_2 John ellipsoid, ``A = V(K) M^{-1}``."""
    M = _m_matrix(K)
    ev = np.linalg.eigvalsh(M)
    if ev[0] <= 1e-12 * ev[-1]:
        raise SingularM(f"M is numerically singular (eigenvalues {ev[0]:.3g} .. {ev[-1]:.3g})")
    A = K.volume * np.linalg.inv(M)
    return Ellipsoid(np.zeros(K.dim), 0.5 * (A + A.T))


def _chol_from(theta: np.ndarray, n: int) -> np.ndarray:
    L = np.zeros((n, n))
    L[np.tril_indices(n)] = theta
    L[np.diag_indices(n)] = np.exp(np.diag(L))
    return L


def e2_ellipsoid_numeric(K: ConvexBody, ftol: float = 1e-13) -> Ellipsoid:
    """L_2 John ellipsoid by SLSQP on a log-Cholesky parameterization.

    Maximizes ``log det A`` subject to ``V_2(K, E_A) <= V(K)`` without using
    the closed form; intended as an oracle for :func:`e2_ellipsoid`.
    """
    n = K.dim
    M = _m_matrix(K)
    V = K.volume
    # start from the ball that makes the constraint active
    s = n * V / np.trace(M)
    theta0 = np.zeros(n * (n + 1) // 2)
    theta0[[i * (i + 1) // 2 + i for i in range(n)]] = 0.5 * np.log(s)

    tril = np.tril_indices(n)
    on_diag = tril[0] == tril[1]

    def neg_logdet(theta):
        return -2.0 * theta[on_diag].sum()

    def neg_logdet_grad(theta):
        return np.where(on_diag, -2.0, 0.0)

    def slack(theta):
        L = _chol_from(theta, n)
        return 1.0 - np.trace(L @ L.T @ M) / (n * V)

    def slack_grad(theta):
        L = _chol_from(theta, n)
        G = -2.0 * (M @ L)[tril] / (n * V)
        return np.where(on_diag, G * np.diag(L)[tril[0]], G)  # chain rule through exp

    res = minimize(
        neg_logdet,
        theta0,
        jac=neg_logdet_grad,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": slack, "jac": slack_grad}],
        options={"ftol": ftol, "maxiter": 1000},
    )
    # status 8 = line search stalled at the noise floor; fine if feasible
    if not (res.success or (res.status == 8 and slack(res.x) >= -1e-10)):
        raise SolverFailure(f"SLSQP failed: {res.message}")
    L = _chol_from(res.x, n)
    return Ellipsoid(np.zeros(n), L @ L.T)


def e1_ellipsoid(K: ConvexBody) -> Ellipsoid:
    """L_1 John ellipsoid: max ``det A`` subject to ``V_1(K, E_A) <= V(K)``.

    Writing ``A = B^2`` the constraint reads ``sum_j S_j |B u_j| <= n V(K)``.
    The unconstrained minimizer ``B*`` of ``sum_j S_j |B u_j| - log det B``
    satisfies ``sum_j S_j |B* u_j| = n``, and ``V(K) B*`` solves the
    constrained problem (the constraint is 1-homogeneous in ``B``).
    """
    B = petty_factor(K.normals, K.areas)
    # Euler's relation holds only to solver accuracy; rescale onto the level exactly
    B *= K.dim * K.volume / float(K.areas @ np.linalg.norm(K.normals @ B, axis=1))
    A = B @ B
    return Ellipsoid(np.zeros(K.dim), 0.5 * (A + A.T))


def ep_ellipsoid(K: ConvexBody, p) -> Ellipsoid:
    """L_p John ellipsoid for ``p`` in ``{1, 2, inf}``."""
    if p == 1:
        return e1_ellipsoid(K)
    if p == 2:
        return e2_ellipsoid(K)
    if p == np.inf or p == "inf":
        return john_inscribed(K.normals, K.supports, origin_centred=True)
    raise ValueError(f"p must be 1, 2 or inf, got {p!r}")


# ---------------------------------------------------------------------------
# positions and certificates


def s2_isotropy_defect(K: ConvexBody) -> float:
    """Frobenius distance of ``S_2(K, .) / V(K)`` from isotropy."""
    return float(np.linalg.norm(_m_matrix(K) / K.volume - np.eye(K.dim)))


def e2_position(K: ConvexBody) -> ConvexBody:
    """Linear image ``A^{-1/2} K`` whose L_2 John ellipsoid is the unit ball."""
    A = e2_ellipsoid(K).shape
    w, Q = np.linalg.eigh(A)
    return K.transform(Q @ np.diag(w**-0.5) @ Q.T)


def john_position(K: ConvexBody) -> ConvexBody:
    """Affine image of ``K`` whose John ellipsoid is the unit ball."""
    E = john_ellipsoid(K)
    w, Q = np.linalg.eigh(E.shape)
    T = Q @ np.diag(w**-0.5) @ Q.T
    return ConvexBody.from_points((K.vbody.vertices - E.center) @ T.T)


def john_contact_measure(K: ConvexBody, tol: float = JOHN_POSITION_TOL) -> tuple[DiscreteMeasure | None, float]:
    """Contact normals of ``K`` with the unit ball and NNLS weights on them.

    Returns the weighted contact measure (``None`` if every weight vanished)
    and the residual of the isotropy and 1-centering equations.
    """
    E = john_ellipsoid(K)
    off = max(np.linalg.norm(E.center), np.linalg.norm(E.shape - np.eye(K.dim), 2))
    if off > tol:
        raise NotInJohnPosition(f"John ellipsoid differs from the unit ball by {off:.3g}")
    contact = np.abs(K.supports - 1.0) <= CONTACT_TOL
    u = K.normals[contact]
    if u.shape[0] == 0:
        return None, float(sqrt(K.dim))
    A, b = _constraint_system(u, np.ones(u.shape[0]))
    c, residual = nnls(A, b)
    keep = c > 0
    if not keep.any():
        return None, float(residual)
    return DiscreteMeasure(u[keep], c[keep]), float(residual)


def john_contact_certificate(K: ConvexBody, tol: float = JOHN_POSITION_TOL) -> bool:
    """True iff the contact points carry a 1-centered isotropic measure."""
    _, residual = john_contact_measure(K, tol)
    return residual <= CERT_RESIDUAL


# ---------------------------------------------------------------------------
# volume-ratio inequalities


def ball_vr_constant(n: int) -> float:
    """``n^{n/2} (n+1)^{(n+1)/2} / (kappa_n n!)``."""
    return n ** (n / 2) * (n + 1) ** ((n + 1) / 2) / (unit_ball_volume(n) * factorial(n))


def dual_vr_constant(n: int) -> float:
    """``(n+1)^{(n+1)/2} kappa_n / (n^{n/2} n!)``."""
    return (n + 1) ** ((n + 1) / 2) * unit_ball_volume(n) / (n ** (n / 2) * factorial(n))


def outer_vr_constant(n: int) -> float:
    """``(n+1)^{(n+1)/2} / (n^{n/2} n! kappa_n)``."""
    return (n + 1) ** ((n + 1) / 2) / (n ** (n / 2) * factorial(n) * unit_ball_volume(n))


def polar_hull_constant(n: int) -> float:
    """``n^{n/2} (n+1)^{(n+1)/2} / n!``."""
    return n ** (n / 2) * (n + 1) ** ((n + 1) / 2) / factorial(n)


def hull_constant(n: int) -> float:
    """``(n+1)^{(n+1)/2} / (n^{n/2} n!)``."""
    return (n + 1) ** ((n + 1) / 2) / (n ** (n / 2) * factorial(n))


def corollary_reports(
    K: ConvexBody,
    eq_tol: float = COROLLARY_EQ_TOL,
    centroid_tol: float = CENTROID_TOL,
    skip_conditional: bool = False,
) -> list[InequalityReport]:
    """Every volume-ratio inequality that applies to ``K``.

    Always evaluated: Ball's ratio ``V(K)/V(JK)``, the outer ratio
    ``V(K)/V(LK)``, Barthe's dual ratio ``V(K*)V(JK)`` and the dual L_2 and
    L_1 products ``V(K*)V(E_pK)``.  The L_2 and L_1 ratios ``V(K)/V(E_pK)``
    need the centroid at the origin: an off-centre body raises
    :class:`CentroidNotAtOrigin`, or drops them when ``skip_conditional`` is
    set.  The L_inf pair is added for origin-symmetric bodies, where the
    John ellipsoid is centred at the origin.
    """
    n = K.dim
    V = K.volume
    Vpolar = K.polar().volume
    J = john_ellipsoid(K)
    L = loewner_ellipsoid(K)
    E2 = e2_ellipsoid(K)
    E1 = e1_ellipsoid(K)
    c1, c2, c3 = ball_vr_constant(n), dual_vr_constant(n), outer_vr_constant(n)
    meta = {"n": n, "vertices": int(K.vbody.vertices.shape[0]), "facets": int(K.vbody.n_facets)}

    reports = [
        InequalityReport.upper("ball_vr", V / J.volume, c1, eq_tol, **meta),
        InequalityReport.lower("outer_vr", V / L.volume, c3, eq_tol, **meta),
        InequalityReport.lower("dual_vr", Vpolar * J.volume, c2, eq_tol, **meta),
        InequalityReport.lower("cor_1_1", Vpolar * E2.volume, c2, eq_tol, **meta),
        InequalityReport.lower("l1_dual_vr", Vpolar * E1.volume, c2, eq_tol, **meta),
    ]
    off = float(np.linalg.norm(K.centroid))
    if off <= centroid_tol:
        reports += [
            InequalityReport.upper("l2_vr", V / E2.volume, c1, eq_tol, **meta),
            InequalityReport.upper("l1_vr", V / E1.volume, c1, eq_tol, **meta),
        ]
    elif not skip_conditional:
        raise CentroidNotAtOrigin(f"centroid is {off:.3g} from the origin; translate the body first")
    if K.is_origin_symmetric():
        Einf = ep_ellipsoid(K, np.inf)
        reports += [
            InequalityReport.upper("linf_vr", V / Einf.volume, c1, eq_tol, **meta),
            InequalityReport.lower("linf_dual_vr", Vpolar * Einf.volume, c2, eq_tol, **meta),
        ]
    return reports


def corollary_6_1_and_6_3_reports(
    m: DiscreteMeasure, hyp_tol: float = DEFAULT_TOL, eq_tol: float = COROLLARY_EQ_TOL
) -> tuple[InequalityReport, InequalityReport]:
    """Volumes of ``(conv supp m)*`` and ``conv supp m`` for 1-centered isotropic ``m``."""
    iso = isotropy_defect(m)
    if iso > hyp_tol:
        raise HypothesisViolated(f"measure is not isotropic (defect {iso:.3g})")
    cen = f_center_defect(m, np.ones(m.size))
    if cen > hyp_tol:
        raise HypothesisViolated(f"measure is not 1-centered (defect {cen:.3g})")
    n = m.dim
    hull = convex_hull(m.points)
    polar_volume = halfspace_to_vertices(polar(hull)).volume
    meta = {"n": n, "support": m.size, "simplex_detected": is_regular_simplex_support(m)}
    return (
        InequalityReport.upper("cor_6_1", polar_volume, polar_hull_constant(n), eq_tol, **meta),
        InequalityReport.lower("cor_6_3", hull.volume, hull_constant(n), eq_tol, **meta),
    )
