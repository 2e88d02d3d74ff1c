"""Lasso instance: min 0.5||Ax - b||^2 + rho||y||_1  s.t.  x - y = 0.

The x-update solves a ridge system with the factorization cached between
iterations; when the data matrix is fat (m < n) the solve goes through the
matrix-inversion identity

    (A'A + beta I)^-1 = I/beta - A'(beta I + A A')^-1 A / beta

so only the smaller m x m Gram matrix is factorized. The y-update is
elementwise soft thresholding.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .model import SeparableProblem

#: Per-coordinate noise variance used by :func:`generate_instance`.
NOISE_VARIANCE = 1e-3


def soft_threshold(a: np.ndarray, kappa: float) -> np.ndarray:
    """Elementwise shrinkage (a - kappa)_+ - (-a - kappa)_+."""
    if kappa < 0:
        raise ValueError(f"kappa must be nonnegative, got {kappa}")
    a = np.asarray(a, dtype=float)
    return np.maximum(a - kappa, 0.0) - np.maximum(-a - kappa, 0.0)


def rho_max(A: np.ndarray, b: np.ndarray) -> float:
    """||A'b||_inf, the smallest l1 weight that forces the solution to zero."""
    return float(np.abs(np.asarray(A).T @ np.asarray(b)).max(initial=0.0))


def _l1_membership_residual(y, g, weight):
    """Distance of 0 from weight * subgradient(|y|) + g, elementwise max."""
    on = np.abs(weight * np.sign(y) + g)
    off = np.maximum(np.abs(g) - weight, 0.0)
    return float(np.where(y != 0.0, on, off).max(initial=0.0))


class LassoInstance(SeparableProblem):
    """Problem data (A, b, rho) with the identity/-identity constraint split.

    Immutable after construction apart from a single-slot factorization cache
    keyed on (beta, method); re-solving with a different beta transparently
    refactorizes.
    """

    def __init__(self, A, b, rho: float):
        A = np.ascontiguousarray(A, dtype=float)
        b = np.asarray(b, dtype=float).ravel()
        if A.ndim != 2:
            raise ValueError("A must be a 2-d array")
        if b.shape != (A.shape[0],):
            raise ValueError(f"b has shape {b.shape}, expected ({A.shape[0]},)")
        if not rho > 0:
            raise ValueError(f"rho must be positive, got {rho}")
        self.A = A
        self.b = b
        self.rho = float(rho)
        self.rows, self.cols = A.shape
        self.n1 = self.n2 = self.m = self.cols
        self._atb = A.T @ b
        self._rhs = np.zeros(self.cols)
        self._cache: tuple[float, str, object] | None = None

    # engine contract -----------------------------------------------------

    def solve_x(self, y, lam, beta):
        return self.x_update(y, lam, beta)

    def solve_y(self, x, lam, beta):
        return self.y_update(x, lam, beta)

    def apply_A(self, x):
        return x

    def apply_B(self, y):
        return -y

    @property
    def rhs_b(self):
        return self._rhs

    def objective(self, x, y):
        fit = self.A @ x - self.b
        return float(0.5 * fit @ fit + self.rho * np.abs(y).sum())

    # closed-form updates --------------------------------------------------

    def x_update(self, y, z, beta, method: str | None = None):
        """Minimizer of the ridge subproblem: (A'A + beta I)^-1 (A'b + beta y + z).

        ``method`` forces the solve path ("direct" or "woodbury"); by default
        the fat case (m < n) uses the small-Gram identity.
        """
        if not beta > 0:
            raise ValueError(f"beta must be positive, got {beta}")
        if method is None:
            method = "woodbury" if self.rows < self.cols else "direct"
        rhs = self._atb + beta * np.asarray(y) + np.asarray(z)
        factor = self._factorization(beta, method)
        if method == "woodbury":
            return rhs / beta - self.A.T @ cho_solve(factor, self.A @ rhs) / beta
        return cho_solve(factor, rhs)

    def y_update(self, x_next, z, beta):
        """Soft-threshold minimizer of the l1 subproblem."""
        if not beta > 0:
            raise ValueError(f"beta must be positive, got {beta}")
        return soft_threshold(np.asarray(x_next) - np.asarray(z) / beta, self.rho / beta)

    def _factorization(self, beta, method):
        cached = self._cache
        if cached is not None and cached[0] == beta and cached[1] == method:
            return cached[2]
        if method == "woodbury":
            gram = beta * np.eye(self.rows) + self.A @ self.A.T
        elif method == "direct":
            gram = self.A.T @ self.A + beta * np.eye(self.cols)
        else:
            raise ValueError(f"unknown x-update method {method!r}")
        factor = cho_factor(gram)
        self._cache = (beta, method, factor)
        return factor

    # optimality residuals -------------------------------------------------

    def x_subproblem_residual(self, x, y, lam, beta):
        grad = self.A.T @ (self.A @ x - self.b) - lam + beta * (x - y)
        return float(np.abs(grad).max(initial=0.0))

    def y_subproblem_residual(self, y, x, lam, beta):
        return _l1_membership_residual(y, lam + beta * (y - x), self.rho)

    def x_stationarity(self, x, lam):
        grad = self.A.T @ (self.A @ x - self.b) - lam
        return float(np.abs(grad).max(initial=0.0))

    def y_stationarity(self, y, lam):
        return _l1_membership_residual(y, lam, self.rho)


def generate_instance(m: int, n: int, seed: int, nonzeros: int | None = None):
    """Seeded synthetic regression data.

    A is i.i.d. standard Gaussian with columns scaled to unit l2 norm; the
    ground truth has min(100, n // 10) Gaussian nonzeros at random positions
    (override with ``nonzeros``); observations are b = A x_true + noise with
    per-coordinate variance 1e-3; the l1 weight is 0.1 times the critical
    value ||A'b||_inf.

    Returns
    -------
    (LassoInstance, ndarray)
        The instance and the ground-truth coefficient vector.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    A = A / np.linalg.norm(A, axis=0)
    if nonzeros is None:
        nonzeros = min(100, n // 10)
    if nonzeros > n:
        warnings.warn(f"requested {nonzeros} nonzeros for n={n}; reducing to {n}")
        nonzeros = n
    x_true = np.zeros(n)
    support = rng.choice(n, size=nonzeros, replace=False)
    x_true[support] = rng.standard_normal(nonzeros)
    noise = rng.normal(0.0, np.sqrt(NOISE_VARIANCE), size=m)
    b = A @ x_true + noise
    rho = 0.1 * rho_max(A, b)
    return LassoInstance(A, b, rho), x_true
