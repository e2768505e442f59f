"""Extremal ellipsoids of polytopes by damped Newton / log-barrier methods.

All three problems are cast as maximizing ``log det X`` over symmetric
positive definite ``X`` (plus an optional centre vector ``z``) subject to
second-order-cone constraints ``||X a_j + alpha z|| <= b_j - beta_j . z``:

* inscribed (John):  ``X = B``, ``E = {c + B v : |v| <= 1}``, ``z = c``,
  ``alpha = 0``, ``beta_j = a_j`` for facets ``a_j . x <= b_j``;
* enclosing (Loewner):  ``E = {x : |P x + q| <= 1}``, ``X = P``, ``z = q``,
  ``a_j = v_j`` (vertices), ``alpha = 1``, ``b_j = 1``, ``beta = 0``;
* origin-centred inscribed:  the John problem with ``z`` fixed at zero.

Each cone gets the barrier ``-log(s^2 - |y|^2)`` (parameter 2), so after the
last centring step the objective is within ``2m / t`` of optimal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverFailure
from .geometry import Ellipsoid

MAX_NEWTON = 500
GAP_TOL = 1e-10
CENTER_TOL = 1e-10  # lambda^2/2 per centring step; objective error ~ CENTER_TOL / t


def sym_basis(n: int) -> np.ndarray:
    """Basis ``E_k`` of symmetric n x n matrices (unit diagonal / paired off-diagonal)."""
    iu, ju = np.triu_indices(n)
    E = np.zeros((iu.size, n, n))
    E[np.arange(iu.size), iu, ju] = 1.0
    E[np.arange(iu.size), ju, iu] = 1.0
    return E


def _sym(theta: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.einsum("k,kij->ij", theta, basis)


@dataclass
class _SocProblem:
    a: np.ndarray  # (m, n)
    b: np.ndarray  # (m,)
    alpha: float
    beta: np.ndarray | None  # (m, n) or None
    free_center: bool

    def __post_init__(self):
        self.n = self.a.shape[1]
        self.basis = sym_basis(self.n)
        self.p = self.basis.shape[0]
        self.nz = self.n if self.free_center else 0
        # dy_j / dtheta_k = E_k a_j
        self.Ya = np.einsum("kij,mj->mik", self.basis, self.a)  # (m, n, p)

    def unpack(self, x):
        theta, z = x[: self.p], x[self.p :]
        if not self.free_center:
            z = np.zeros(self.n)
        return _sym(theta, self.basis), z

    def slacks(self, x):
        X, z = self.unpack(x)
        y = self.a @ X + self.alpha * z  # X symmetric: rows are X a_j
        s = self.b.copy()
        if self.beta is not None:
            s = s - self.beta @ z
        return X, y, s

    def value(self, x, t):
        X, y, s = self.slacks(x)
        try:
            L = np.linalg.cholesky(X)
        except np.linalg.LinAlgError:
            return np.inf
        g = s * s - np.einsum("ij,ij->i", y, y)
        if np.any(s <= 0) or np.any(g <= 0):
            return np.inf
        return -t * 2.0 * np.log(np.diag(L)).sum() - np.log(g).sum()

    def derivatives(self, x, t):
        X, y, s = self.slacks(x)
        m, n, p, nz = len(self.b), self.n, self.p, self.nz
        Xi = np.linalg.inv(X)
        Bk = np.einsum("ij,kjl->kil", Xi, self.basis)
        grad = np.zeros(p + nz)
        hess = np.zeros((p + nz, p + nz))
        grad[:p] = -t * np.einsum("kii->k", Bk)
        hess[:p, :p] = t * np.einsum("kij,lji->kl", Bk, Bk)

        g = s * s - np.einsum("ij,ij->i", y, y)
        # local gradient/Hessian of -log(s^2 - |y|^2) in (s, y)
        gl = np.concatenate([(-2 * s / g)[:, None], 2 * y / g[:, None]], axis=1)
        Hl = np.zeros((m, 1 + n, 1 + n))
        Hl[:, 0, 0] = 4 * s * s / g**2 - 2 / g
        Hl[:, 0, 1:] = -4 * s[:, None] * y / g[:, None] ** 2
        Hl[:, 1:, 0] = Hl[:, 0, 1:]
        Hl[:, 1:, 1:] = 4 * np.einsum("mi,mj->mij", y, y) / g[:, None, None] ** 2
        Hl[:, 1:, 1:] += (2 / g)[:, None, None] * np.eye(n)

        J = np.zeros((m, 1 + n, p + nz))
        J[:, 1:, :p] = self.Ya
        if self.free_center:
            J[:, 1:, p:] = self.alpha * np.eye(n)
            if self.beta is not None:
                J[:, 0, p:] = -self.beta
        grad += np.einsum("mri,mr->i", J, gl)
        hess += np.einsum("mri,mrs,msj->ij", J, Hl, J)
        return grad, hess


def _damped_step(value, x, step, dec2):
    """Full Newton step inside the quadratic region (decrement < 1/4, where a
    full step is safe for self-concordant objectives), Armijo backtracking
    outside it."""
    if dec2 < 1.0 / 16:
        xn = x + step
        if np.isfinite(value(xn)):
            return xn
    f0 = value(x)
    h = 1.0
    while h >= 1e-14:
        xn = x + h * step
        if value(xn) <= f0 - 0.25 * h * dec2:
            return xn
        h *= 0.5
    raise SolverFailure("line search failed")


def _newton_barrier(prob: _SocProblem, x0: np.ndarray, gap_tol: float = GAP_TOL, max_iter: int = MAX_NEWTON):
    x = x0.copy()
    m = len(prob.b)
    t = 1.0
    iters = 0
    while True:
        prev = np.inf
        while True:
            if iters >= max_iter:
                raise SolverFailure(f"barrier method did not converge in {max_iter} Newton steps")
            iters += 1
            grad, hess = prob.derivatives(x, t)
            try:
                step = -np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError as exc:
                raise SolverFailure("singular Newton system") from exc
            dec2 = -grad @ step
            # second clause: stalled at the roundoff floor
            if dec2 / 2 <= CENTER_TOL or (dec2 < 1e-6 and dec2 >= 0.5 * prev):
                break
            prev = dec2
            x = _damped_step(lambda y: prob.value(y, t), x, step, dec2)
        if 2 * m / t <= gap_tol:
            return x, iters
        t *= 10.0


def _initial_inner(A, b, center):
    s = b - A @ center
    if np.any(s <= 0):
        raise SolverFailure("starting centre is not interior")
    return 0.5 * s.min()  # radius of a ball around ``center`` inside every slab


def john_inscribed(normals, offsets, center0=None, origin_centred: bool = False) -> Ellipsoid:
    """Maximum-volume ellipsoid inside ``{x : normals x <= offsets}`` (unit normals)."""
    A = np.asarray(normals, dtype=float)
    b = np.asarray(offsets, dtype=float)
    n = A.shape[1]
    diag_theta = np.array([1.0 if i == j else 0.0 for i, j in zip(*np.triu_indices(n))])
    if origin_centred:
        c0 = np.zeros(n)
    else:
        c0 = np.zeros(n) if center0 is None else np.asarray(center0, dtype=float)
    r0 = _initial_inner(A, b, c0)
    prob = _SocProblem(A, b, alpha=0.0, beta=A, free_center=not origin_centred)
    x0 = np.concatenate([r0 * diag_theta, c0 if not origin_centred else []])
    x, _ = _newton_barrier(prob, x0)
    B, c = prob.unpack(x)
    return Ellipsoid(c, B @ B)


def loewner_enclosing(points) -> Ellipsoid:
    """Minimum-volume ellipsoid containing ``points``."""
    V = np.asarray(points, dtype=float)
    m, n = V.shape
    c0 = V.mean(axis=0)
    R = np.linalg.norm(V - c0, axis=1).max()
    P0 = 0.5 / R
    diag_theta = np.array([1.0 if i == j else 0.0 for i, j in zip(*np.triu_indices(n))])
    prob = _SocProblem(V, np.ones(m), alpha=1.0, beta=None, free_center=True)
    x0 = np.concatenate([P0 * diag_theta, -P0 * c0])
    x, _ = _newton_barrier(prob, x0)
    P, q = prob.unpack(x)
    Pinv = np.linalg.inv(P)
    return Ellipsoid(-Pinv @ q, Pinv @ Pinv)


def petty_factor(normals, areas, tol: float = 1e-12, max_iter: int = MAX_NEWTON) -> np.ndarray:
    """Minimizer ``B`` of ``sum_j areas_j |B u_j| - log det B`` over SPD ``B``.

    At the minimum ``sum_j areas_j |B u_j| = n`` (Euler's relation for the
    1-homogeneous sum), so ``(V/1) B`` rescales it onto any constraint level.
    """
    U = np.asarray(normals, dtype=float)
    w = np.asarray(areas, dtype=float)
    n = U.shape[1]
    basis = sym_basis(n)
    EU = np.einsum("kij,mj->mik", basis, U)  # (m, n, p): E_k u_j

    def value(theta):
        B = _sym(theta, basis)
        try:
            L = np.linalg.cholesky(B)
        except np.linalg.LinAlgError:
            return np.inf
        return float(w @ np.linalg.norm(U @ B, axis=1)) - 2.0 * np.log(np.diag(L)).sum()

    scale = n / float(w @ np.linalg.norm(U, axis=1))
    theta = scale * np.array([1.0 if i == j else 0.0 for i, j in zip(*np.triu_indices(n))])
    for _ in range(max_iter):
        B = _sym(theta, basis)
        Bi = np.linalg.inv(B)
        Bk = np.einsum("ij,kjl->kil", Bi, basis)
        Y = U @ B  # rows B u_j
        r = np.linalg.norm(Y, axis=1)
        proj = np.einsum("mi,mik->mk", Y, EU)  # y . E_k u
        grad = (w / r) @ proj - np.einsum("kii->k", Bk)
        hess = np.einsum("m,mik,mil->kl", w / r, EU, EU)
        hess -= np.einsum("m,mk,ml->kl", w / r**3, proj, proj)
        hess += np.einsum("kij,lji->kl", Bk, Bk)
        step = -np.linalg.solve(hess, grad)
        dec2 = -grad @ step
        if dec2 / 2 <= tol:
            return B
        theta = _damped_step(value, theta, step, dec2)
    raise SolverFailure(f"Newton iteration did not converge in {max_iter} steps")
