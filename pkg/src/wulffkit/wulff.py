"""Wulff shapes of discrete measures and the volume bounds they satisfy.

For a discrete measure with support ``u_i`` and positive values ``f_i`` the
Wulff shape is the polytope ``{x : x . u_i <= f_i}``; its polar is
``conv{u_i / f_i}``.  The ``thm_*`` evaluators below return
:class:`~wulffkit.reports.InequalityReport` objects for the sharp upper
bound on the Wulff volume (with and without displacement), the lower bound
on the polar volume, and their origin-symmetric counterparts.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial, sqrt

import numpy as np

from .errors import DisplacementNotZero, HypothesisViolated, NotEven, NotIsotropic
from .geometry import HPolytope, VPolytope, convex_hull, halfspace_to_vertices
from .measures import (
    DEFAULT_TOL,
    DiscreteMeasure,
    WeightFn,
    f_center_defect,
    fvalues,
    is_even,
    isotropy_defect,
    l2_norm,
)
from .reports import DEFAULT_EQ_TOL, InequalityReport

DISP_TOL = 1e-7
EXTREMAL_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class WulffShape:
    measure: DiscreteMeasure
    f: WeightFn
    body: HPolytope

    @cached_property
    def vbody(self) -> VPolytope:
        return halfspace_to_vertices(self.body)

    @property
    def dim(self) -> int:
        return self.measure.dim

    @property
    def volume(self) -> float:
        return self.vbody.volume


def build_wulff(m: DiscreteMeasure, f, tol: float = DEFAULT_TOL, check_isotropy: bool = True) -> WulffShape:
    """``{x : x . u_i <= f_i for every support point u_i}``.

    Raises :class:`NotIsotropic` unless ``check_isotropy`` is off, and
    :class:`~wulffkit.errors.UnboundedBody` if the half-spaces do not close up.
    """
    fv = fvalues(m, f)
    if check_isotropy:
        defect = isotropy_defect(m)
        if defect > tol:
            raise NotIsotropic(f"isotropy defect {defect:.3g} exceeds {tol:.3g}")
    return WulffShape(m, WeightFn(fv), HPolytope(m.points, fv))


def polar_wulff(m: DiscreteMeasure, f, tol: float = DEFAULT_TOL, check_isotropy: bool = True) -> VPolytope:
    """Polar Wulff shape as ``conv{u_i / f_i}``."""
    fv = fvalues(m, f)
    if check_isotropy:
        defect = isotropy_defect(m)
        if defect > tol:
            raise NotIsotropic(f"isotropy defect {defect:.3g} exceeds {tol:.3g}")
    return convex_hull(m.points / fv[:, None])


def displacement(w: WulffShape) -> float:
    """Centroid of the Wulff shape dotted with ``sum c_i u_i / f_i``."""
    v = (w.measure.weights / w.f.values) @ w.measure.points
    return float(w.vbody.centroid @ v)


def displacement_monte_carlo(w: WulffShape, samples: int = 10**6, seed: int = 0, chunk: int = 200_000) -> float:
    """Displacement as the body average of ``sum_i c_i (x . u_i) / f_i``.

    Rejection sampling from the bounding box; independent of the
    triangulation used by :func:`displacement`.
    """
    rng = np.random.default_rng(seed)
    v = (w.measure.weights / w.f.values) @ w.measure.points
    lo = w.vbody.vertices.min(axis=0)
    hi = w.vbody.vertices.max(axis=0)
    total, count = 0.0, 0
    remaining = samples
    while remaining > 0:
        k = min(chunk, remaining)
        x = rng.uniform(lo, hi, size=(k, w.dim))
        inside = x[w.body.contains(x)]
        total += float((inside @ v).sum())
        count += inside.shape[0]
        remaining -= k
    return total / count


def _check_hypotheses(m: DiscreteMeasure, fv: np.ndarray, tol: float) -> None:
    iso = isotropy_defect(m)
    if iso > tol:
        raise HypothesisViolated(f"measure is not isotropic (defect {iso:.3g})")
    cen = f_center_defect(m, fv)
    if cen > tol:
        raise HypothesisViolated(f"measure is not f-centered (defect {cen:.3g})")


def _meta(m: DiscreteMeasure, fv: np.ndarray, **extra) -> dict:
    return {"n": m.dim, "support": m.size, "f_norm": l2_norm(m, fv), **extra}


def refined_bound(n: int, disp: float, f_norm: float) -> float:
    """``(n+1-disp)^{n+1} / (n! (n+1)^{(n+1)/2}) * ||f||^n``."""
    return (n + 1 - disp) ** (n + 1) / (factorial(n) * (n + 1) ** ((n + 1) / 2)) * f_norm**n


def simplex_constant(n: int) -> float:
    """``(n+1)^{(n+1)/2} / n!``."""
    return (n + 1) ** ((n + 1) / 2) / factorial(n)


def thm_5_1_report(
    m: DiscreteMeasure, f, hyp_tol: float = DEFAULT_TOL, eq_tol: float = DEFAULT_EQ_TOL
) -> InequalityReport:
    """Wulff volume against the displacement-dependent upper bound."""
    fv = fvalues(m, f)
    _check_hypotheses(m, fv, hyp_tol)
    w = build_wulff(m, fv, tol=hyp_tol)
    disp = displacement(w)
    n = m.dim
    if disp > n + hyp_tol:
        raise AssertionError(f"displacement {disp!r} exceeds n={n}")
    rhs = refined_bound(n, disp, l2_norm(m, fv))
    return InequalityReport.upper("thm_5_1", w.volume, rhs, eq_tol, **_meta(m, fv, disp=disp))


def thm_1_report(
    m: DiscreteMeasure,
    f,
    hyp_tol: float = DEFAULT_TOL,
    eq_tol: float = DEFAULT_EQ_TOL,
    disp_tol: float = DISP_TOL,
) -> InequalityReport:
    """Wulff volume against ``(n+1)^{(n+1)/2}/n! ||f||^n``; needs zero displacement."""
    fv = fvalues(m, f)
    _check_hypotheses(m, fv, hyp_tol)
    w = build_wulff(m, fv, tol=hyp_tol)
    disp = displacement(w)
    if abs(disp) > disp_tol:
        raise DisplacementNotZero(f"displacement {disp:.3g} exceeds {disp_tol:.3g}")
    rhs = refined_bound(m.dim, 0.0, l2_norm(m, fv))
    return InequalityReport.upper("thm_1", w.volume, rhs, eq_tol, **_meta(m, fv, disp=disp))


def thm_2_report(
    m: DiscreteMeasure, f, hyp_tol: float = DEFAULT_TOL, eq_tol: float = DEFAULT_EQ_TOL
) -> InequalityReport:
    """Polar Wulff volume against ``(n+1)^{(n+1)/2}/n! ||f||^{-n}``."""
    fv = fvalues(m, f)
    _check_hypotheses(m, fv, hyp_tol)
    lhs = polar_wulff(m, fv, tol=hyp_tol).volume
    rhs = simplex_constant(m.dim) * l2_norm(m, fv) ** (-m.dim)
    return InequalityReport.lower("thm_2", lhs, rhs, eq_tol, **_meta(m, fv))


def _check_even(m: DiscreteMeasure, fv: np.ndarray, hyp_tol: float) -> None:
    iso = isotropy_defect(m)
    if iso > hyp_tol:
        raise HypothesisViolated(f"measure is not isotropic (defect {iso:.3g})")
    if not is_even(m, fv):
        raise NotEven("support, weights and f must be invariant under u -> -u")


def thm_3_1_report(
    m: DiscreteMeasure, f, hyp_tol: float = DEFAULT_TOL, eq_tol: float = DEFAULT_EQ_TOL
) -> InequalityReport:
    """Origin-symmetric case: Wulff volume against ``(2/sqrt n)^n ||f||^n``."""
    fv = fvalues(m, f)
    _check_even(m, fv, hyp_tol)
    n = m.dim
    lhs = build_wulff(m, fv, tol=hyp_tol).volume
    rhs = (2 / sqrt(n)) ** n * l2_norm(m, fv) ** n
    return InequalityReport.upper("thm_3_1", lhs, rhs, eq_tol, **_meta(m, fv))


def thm_3_2_report(
    m: DiscreteMeasure, f, hyp_tol: float = DEFAULT_TOL, eq_tol: float = DEFAULT_EQ_TOL
) -> InequalityReport:
    """Origin-symmetric case: polar volume against ``(2 sqrt n)^n / n! ||f||^{-n}``."""
    fv = fvalues(m, f)
    _check_even(m, fv, hyp_tol)
    n = m.dim
    lhs = polar_wulff(m, fv, tol=hyp_tol).volume
    rhs = (2 * sqrt(n)) ** n / factorial(n) * l2_norm(m, fv) ** (-n)
    return InequalityReport.lower("thm_3_2", lhs, rhs, eq_tol, **_meta(m, fv))


def is_regular_simplex_support(m: DiscreteMeasure, tol: float = EXTREMAL_TOL) -> bool:
    n = m.dim
    if m.size != n + 1:
        return False
    G = m.points @ m.points.T
    off = G[~np.eye(n + 1, dtype=bool)]
    return bool(np.all(np.abs(off + 1.0 / n) <= tol))


def is_cube_support(m: DiscreteMeasure, tol: float = EXTREMAL_TOL) -> bool:
    """Support equals ``{+-b_1, ..., +-b_n}`` for an orthonormal basis ``b``."""
    n = m.dim
    if m.size != 2 * n:
        return False
    G = m.points @ m.points.T
    # every row: one entry 1 (itself), one entry -1 (antipode), the rest 0
    for row in G:
        r = np.sort(row)
        if abs(r[0] + 1) > tol or abs(r[-1] - 1) > tol or np.any(np.abs(r[1:-1]) > tol):
            return False
    return True


def equality_case_detect(m: DiscreteMeasure, f) -> dict[str, bool]:
    fv = fvalues(m, f)
    return {
        "is_simplex_extremal": is_regular_simplex_support(m),
        "is_cube_extremal": is_cube_support(m),
        "f_constant_on_support": bool(fv.max() - fv.min() <= EXTREMAL_TOL * fv.mean()),
    }
