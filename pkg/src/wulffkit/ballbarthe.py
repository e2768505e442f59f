"""Determinant inequality for isotropic measures and the one-dimensional
transport maps between exponential and Gaussian densities.

The Gaussian here is normalized as ``exp(-pi s^2)`` (total mass one), so its
distribution function is ``Phi(x) = (1 + erf(sqrt(pi) x)) / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import erfc, exp, expm1, log, log1p, pi, sqrt
from statistics import NormalDist
from typing import Literal

import numpy as np

from .errors import DomainError, HypothesisViolated
from .measures import DEFAULT_TOL, DiscreteMeasure, isotropy_defect
from .reports import InequalityReport

_SQRT_PI = sqrt(pi)
_SQRT_2PI = sqrt(2 * pi)
_STD = NormalDist()
FD_STEP = 1e-6


def gaussian_cdf(x: float) -> float:
    """``int_{-inf}^x exp(-pi s^2) ds``."""
    return 0.5 * erfc(-_SQRT_PI * x)


def gaussian_sf(x: float) -> float:
    """``1 - gaussian_cdf(x)`` without cancellation."""
    return 0.5 * erfc(_SQRT_PI * x)


def _lower_quantile(q: float) -> float:
    # q <= 1/2; standard-normal seed, then Newton on the accurate lower tail
    x = _STD.inv_cdf(q) / _SQRT_2PI
    for _ in range(3):
        step = (gaussian_cdf(x) - q) / exp(-pi * x * x)
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return x


def gaussian_quantile(q: float) -> float:
    """Inverse of :func:`gaussian_cdf` on ``(0, 1)``."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile level {q!r} outside (0, 1)")
    if q <= 0.5:
        return _lower_quantile(q)
    return -_lower_quantile(1.0 - q)


def gaussian_isf(p: float) -> float:
    """``x`` with ``gaussian_sf(x) = p``; accurate for tiny ``p``."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"tail probability {p!r} outside (0, 1)")
    if p <= 0.5:
        return -_lower_quantile(p)
    return _lower_quantile(1.0 - p)


@dataclass(frozen=True)
class TransportSpec:
    """Monotone map attached to a lifted point with last coordinate ``a``.

    ``forward`` pushes the density ``(1/a) exp(-t/a)`` on ``(0, inf)`` to the
    Gaussian; ``inverse`` pushes the Gaussian to ``a exp(-a t)``.
    """

    a: float
    direction: Literal["forward", "inverse"] = "forward"

    def __post_init__(self):
        if not 0.0 < self.a <= 1.0:
            raise DomainError(f"a = {self.a!r} must lie in (0, 1]")
        if self.direction not in ("forward", "inverse"):
            raise DomainError(f"unknown direction {self.direction!r}")


def transport_eval(spec: TransportSpec, t: float) -> float:
    a = spec.a
    if spec.direction == "forward":
        if not t > 0:
            raise DomainError("forward transport is defined for t > 0 only")
        # target level 1 - exp(-t/a); pick the tail that keeps precision
        lower = -expm1(-t / a)
        if lower <= 0.5:
            return gaussian_quantile(lower)
        return gaussian_isf(exp(-t / a))
    # -(1/a) log(1 - Phi(t))
    if t >= 0:
        return -log(gaussian_sf(t)) / a
    return -log1p(-gaussian_cdf(t)) / a


def transport_inverse(spec: TransportSpec, x: float) -> float:
    """Exact inverse of ``transport_eval(spec, .)``.

    The inverse of the forward map is the Gaussian-to-exponential map with
    rate ``1/a``, not the ``inverse`` map of the same ``a`` (whose rate is
    ``a``); the two agree only for ``a = 1``.
    """
    a = spec.a
    if spec.direction == "forward":
        if x >= 0:
            return -a * log(gaussian_sf(x))
        return -a * log1p(-gaussian_cdf(x))
    if not x > 0:
        raise DomainError("the inverse map takes values in (0, inf)")
    lower = -expm1(-a * x)
    if lower <= 0.5:
        return gaussian_quantile(lower)
    return gaussian_isf(exp(-a * x))


def transport_derivative(spec: TransportSpec, t: float, h: float = FD_STEP) -> float:
    """Central finite difference of :func:`transport_eval`."""
    if spec.direction == "forward" and not t - h > 0:
        raise DomainError("finite-difference stencil leaves the domain t > 0")
    return (transport_eval(spec, t + h) - transport_eval(spec, t - h)) / (2 * h)


def transport_identity_check(spec: TransportSpec, t: float, h: float = FD_STEP) -> float:
    """Absolute residual of the log-derivative identity of the map.

    forward: ``log T'(t) - pi T(t)^2 = -log a - t/a``
    inverse: ``log T'(t) = T(t) a - pi t^2 - log a``
    """
    a = spec.a
    value = transport_eval(spec, t)
    lhs = log(transport_derivative(spec, t, h))
    if spec.direction == "forward":
        return abs(lhs - pi * value**2 + log(a) + t / a)
    return abs(lhs - value * a + pi * t**2 + log(a))


def bb_report(
    measure: DiscreteMeasure,
    t,
    hyp_tol: float = DEFAULT_TOL,
    eq_tol: float = 1e-9,
) -> InequalityReport:
    """``det sum c_i t_i w_i w_i^T >= exp(sum c_i log t_i)`` for isotropic ``measure``."""
    tv = np.asarray(t, dtype=float).ravel()
    if tv.size != measure.size:
        raise HypothesisViolated(f"t has {tv.size} values for {measure.size} support points")
    if np.any(tv <= 0):
        raise HypothesisViolated("t must be positive on the support")
    defect = isotropy_defect(measure)
    if defect > hyp_tol:
        raise HypothesisViolated(f"measure is not isotropic (defect {defect:.3g})")
    c, w = measure.weights, measure.points
    lhs = np.linalg.det(np.einsum("i,ij,ik->jk", c * tv, w, w))
    rhs = exp(float(c @ np.log(tv)))
    return InequalityReport.lower(
        "ball_barthe", lhs, rhs, eq_tol, dim=measure.dim, support=measure.size
    )


def lifted_trace_logcheck(
    lifted: DiscreteMeasure, hyp_tol: float = DEFAULT_TOL, eq_tol: float = 1e-9
) -> InequalityReport:
    """Geometric mean of squared last coordinates against ``1/(n+1)``.

    ``lhs = exp((1/(n+1)) sum c_i log a_i^2)`` with ``a_i`` the last
    coordinate of ``w_i``.  Isotropy forces ``sum c_i a_i^2 = 1`` and
    ``sum c_i = n + 1``, so Jensen gives ``lhs <= 1/(n+1)``, with equality
    exactly when every ``a_i`` is the same.
    """
    defect = isotropy_defect(lifted)
    if defect > hyp_tol:
        raise HypothesisViolated(f"measure is not isotropic (defect {defect:.3g})")
    a = lifted.points[:, -1]
    if np.any(a <= 0):
        raise HypothesisViolated("last coordinates must be positive")
    d = lifted.dim
    c = lifted.weights
    lhs = exp(float(c @ np.log(a**2)) / d)
    second = float(c @ a**2) / d  # equals 1/(n+1) under isotropy
    return InequalityReport.upper(
        "lifted_trace_jensen", lhs, 1.0 / d, eq_tol, dim=d, support=lifted.size, second_moment=second
    )
