"""Finitely supported measures on the unit sphere.

A :class:`DiscreteMeasure` carries unit directions and positive weights; a
:class:`WeightFn` carries the values of a positive function on those
directions.  Only the values on the support matter for everything computed
downstream, so functions are never represented off the support.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np
from scipy.optimize import nnls

from .errors import AlignmentError, GenerationFailed, MeasureError, NotNormalized

UNIT_TOL = 1e-12
MERGE_ANGLE = 1e-9
DEFAULT_TOL = 1e-8
GEN_RESIDUAL = 1e-9
DROP_WEIGHT = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """``sum_i weights[i] * delta(points[i])`` on S^{n-1}."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.points, dtype=float))
        c = np.asarray(self.weights, dtype=float).ravel()
        if u.shape[0] != c.size:
            raise AlignmentError(f"{u.shape[0]} points but {c.size} weights")
        if u.shape[1] < 2:
            raise MeasureError("dimension must be at least 2")
        norms = np.linalg.norm(u, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
        if bad.size:
            raise MeasureError(f"unit norm violated at index {bad[0]} (norm {norms[bad[0]]!r})")
        bad = np.flatnonzero(~(c > 0))
        if bad.size:
            raise MeasureError(f"weight at index {bad[0]} is not positive ({c[bad[0]]!r})")
        i, j = _close_pair(u)
        if i >= 0:
            raise MeasureError(f"points {i} and {j} coincide; merge them with canonicalize()")
        object.__setattr__(self, "points", _frozen(u))
        object.__setattr__(self, "weights", _frozen(c))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def second_moment(self) -> np.ndarray:
        return np.einsum("i,ij,ik->jk", self.weights, self.points, self.points)


@dataclass(frozen=True, eq=False)
class LiftedMeasure(DiscreteMeasure):
    """Measure on S^n produced by :func:`lift`; every last coordinate is positive."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.points[:, -1] <= 0):
            raise MeasureError("lifted points must have positive last coordinate")


@dataclass(frozen=True, eq=False)
class WeightFn:
    """Positive values ``f(u_i)`` aligned index-wise with a measure's support."""

    values: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.values, dtype=float).ravel()
        bad = np.flatnonzero(~(f > 0) | ~np.isfinite(f))
        if bad.size:
            raise MeasureError(f"f at index {bad[0]} is not a positive finite number")
        object.__setattr__(self, "values", _frozen(f))

    def __len__(self):
        return self.values.size

    def __mul__(self, lam: float) -> "WeightFn":
        return WeightFn(lam * self.values)

    __rmul__ = __mul__


def fvalues(m: DiscreteMeasure, f) -> np.ndarray:
    vals = f.values if isinstance(f, WeightFn) else np.asarray(f, dtype=float).ravel()
    if vals.size != m.size:
        raise AlignmentError(f"f has {vals.size} values but the measure has {m.size} points")
    return vals


def _close_pair(u: np.ndarray, angle: float = MERGE_ANGLE) -> tuple[int, int]:
    if u.shape[0] < 2:
        return -1, -1
    d = np.linalg.norm(u[:, None, :] - u[None, :, :], axis=2)
    d[np.diag_indices_from(d)] = np.inf
    i, j = np.unravel_index(np.argmin(d), d.shape)
    if d[i, j] <= angle:
        return int(min(i, j)), int(max(i, j))
    return -1, -1


def canonicalize(points, weights, f=None):
    """Merge directions closer than 1e-9 and sort the support lexicographically.

    Merged weights add up; merged ``f`` values are averaged in proportion to
    weight.  Returns ``(DiscreteMeasure, WeightFn | None)``.
    """
    u = np.atleast_2d(np.asarray(points, dtype=float))
    u = u / np.linalg.norm(u, axis=1)[:, None]
    c = np.asarray(weights, dtype=float).ravel()
    fv = None if f is None else np.asarray(getattr(f, "values", f), dtype=float).ravel()

    groups: list[list[int]] = []
    for i in range(u.shape[0]):
        for g in groups:
            if np.linalg.norm(u[g[0]] - u[i]) <= MERGE_ANGLE:
                g.append(i)
                break
        else:
            groups.append([i])
    pts = np.array([u[g[0]] for g in groups])
    w = np.array([c[g].sum() for g in groups])
    fm = None if fv is None else np.array([c[g] @ fv[g] / c[g].sum() for g in groups])

    order = np.lexsort((np.round(pts, 12) + 0.0).T[::-1])
    m = DiscreteMeasure(pts[order], w[order])
    return m, (None if fm is None else WeightFn(fm[order]))


def l2_norm(m: DiscreteMeasure, f) -> float:
    """``||f||_{L^2(m)}``."""
    fv = fvalues(m, f)
    return sqrt(float(m.weights @ fv**2))


def isotropy_defect(m: DiscreteMeasure) -> float:
    """Frobenius distance between ``sum c_i u_i u_i^T`` and the identity."""
    return float(np.linalg.norm(m.second_moment() - np.eye(m.dim)))


def f_center_defect(m: DiscreteMeasure, f) -> float:
    """Euclidean norm of ``sum c_i f(u_i) u_i``."""
    fv = fvalues(m, f)
    return float(np.linalg.norm((m.weights * fv) @ m.points))


def is_even(m: DiscreteMeasure, f=None, tol: float = 1e-9) -> bool:
    """Support closed under negation with matching weights (and ``f`` values)."""
    fv = None if f is None else fvalues(m, f)
    for i, u in enumerate(m.points):
        d = np.linalg.norm(m.points + u, axis=1)
        j = int(np.argmin(d))
        if d[j] > tol or abs(m.weights[j] - m.weights[i]) > tol:
            return False
        if fv is not None and abs(fv[j] - fv[i]) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# generators


def simplex_vertices(n: int) -> np.ndarray:
    """Vertices of the regular simplex inscribed in S^{n-1}, first vertex e_1.

    Built recursively: the remaining vertices sit at height -1/n along e_1
    above a scaled regular simplex of one dimension less.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]])
    lower = simplex_vertices(n - 1)
    rest = np.column_stack([np.full(n, -1.0 / n), sqrt(1.0 - 1.0 / n**2) * lower])
    first = np.zeros((1, n))
    first[0, 0] = 1.0
    return np.vstack([first, rest])


def gen_simplex_measure(n: int) -> tuple[DiscreteMeasure, WeightFn]:
    """Regular simplex directions, weights n/(n+1), f = 1/sqrt(n)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    u = simplex_vertices(n)
    u /= np.linalg.norm(u, axis=1)[:, None]
    return DiscreteMeasure(u, np.full(n + 1, n / (n + 1))), WeightFn(np.full(n + 1, 1 / sqrt(n)))


def gen_cube_measure(n: int) -> tuple[DiscreteMeasure, WeightFn]:
    """Directions +-e_i with weight 1/2 each, f = 1/sqrt(n)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    eye = np.eye(n)
    u = np.vstack([eye, -eye])
    order = np.lexsort(u.T[::-1])
    return DiscreteMeasure(u[order], np.full(2 * n, 0.5)), WeightFn(np.full(2 * n, 1 / sqrt(n)))


def _constraint_system(u: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rows encode sum c u u^T = I (upper triangle, off-diagonals scaled by
    sqrt 2 so the residual is the Frobenius defect) and sum c f u = 0."""
    n = u.shape[1]
    iu, ju = np.triu_indices(n)
    scale = np.where(iu == ju, 1.0, sqrt(2.0))
    rows_iso = (u[:, iu] * u[:, ju] * scale).T
    rows_cen = (f[:, None] * u).T
    A = np.vstack([rows_iso, rows_cen])
    b = np.concatenate([np.where(iu == ju, 1.0, 0.0), np.zeros(n)])
    return A, b


def gen_random_isotropic_fcentered(
    n: int,
    m: int,
    f_range: tuple[float, float] = (0.5, 2.0),
    seed: int = 0,
    max_retries: int = 50,
) -> tuple[DiscreteMeasure, WeightFn]:
    """Random isotropic f-centered measure with ``f`` drawn from ``f_range``.

    Directions are uniform on the sphere and ``f`` is uniform on the range;
    weights come from nonnegative least squares on the linear isotropy and
    centering constraints.  Retry ``k`` draws from the stream
    ``SeedSequence([seed, k])``, so the output depends on ``seed`` alone.
    """
    lo, hi = f_range
    if not 0 < lo <= hi:
        raise ValueError("f_range must satisfy 0 < lo <= hi")
    if m < n * (n + 3) // 2 + n:
        raise ValueError(f"need m >= {n * (n + 3) // 2 + n} directions for n={n}")
    for retry in range(max_retries):
        rng = np.random.default_rng(np.random.SeedSequence([seed, retry]))
        u = rng.standard_normal((m, n))
        u /= np.linalg.norm(u, axis=1)[:, None]
        f = rng.uniform(lo, hi, m)
        A, b = _constraint_system(u, f)
        c, _ = nnls(A, b, maxiter=50 * m)
        keep = c > DROP_WEIGHT
        if keep.sum() < n + 1:
            continue
        meas, fn = canonicalize(u[keep], c[keep], f[keep])
        if isotropy_defect(meas) <= GEN_RESIDUAL and f_center_defect(meas, fn) <= GEN_RESIDUAL:
            return meas, fn
    raise GenerationFailed(f"no feasible instance after {max_retries} attempts (n={n}, m={m})")


def symmetrize(m: DiscreteMeasure, f) -> tuple[DiscreteMeasure, WeightFn]:
    """Split every atom evenly between ``u`` and ``-u`` (same ``f`` value)."""
    fv = fvalues(m, f)
    pts = np.vstack([m.points, -m.points])
    w = np.concatenate([m.weights, m.weights]) / 2
    return canonicalize(pts, w, np.concatenate([fv, fv]))


def lift(m: DiscreteMeasure, f, sign: int = +1, tol: float = DEFAULT_TOL) -> LiftedMeasure:
    """Isotropic embedding of ``m`` into S^n through ``u -> (sign*u, f(u))``.

    Points become ``(sign*u, f)/sqrt(1+f^2)`` with weights ``c (1+f^2)``.
    The pair must already be isotropic, f-centered and have unit L2 norm.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    fv = fvalues(m, f)
    iso, cen = isotropy_defect(m), f_center_defect(m, fv)
    nrm2 = float(m.weights @ fv**2)
    if iso > tol or cen > tol or abs(nrm2 - 1.0) > tol:
        raise NotNormalized(
            f"lift needs isotropic, f-centered, unit-norm data "
            f"(isotropy {iso:.3g}, centering {cen:.3g}, ||f||^2 {nrm2:.12g})"
        )
    g = np.column_stack([sign * m.points, fv])
    r = np.sqrt(1.0 + fv**2)
    return LiftedMeasure(g / r[:, None], m.weights * r**2)
