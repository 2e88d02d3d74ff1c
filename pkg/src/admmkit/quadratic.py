"""Dense strictly convex quadratic two-block instances.

Small closed-form problems with arbitrary constraint blocks A and B; the
built-in applications both use identity/-identity constraints, so these are
the instances that exercise the engine and the analysis matrices with general
full-column-rank B. Used heavily by the property tests and the demos.
"""

from __future__ import annotations

import numpy as np

from .model import SeparableProblem


class QuadraticProblem(SeparableProblem):
    """min 0.5 x'P1 x + q1'x + 0.5 y'P2 y + q2'y  s.t.  Ax + By = b.

    P1 and P2 must be symmetric positive definite so both subproblems are
    plain linear solves.
    """

    def __init__(self, P1, q1, P2, q2, A, B, b):
        self.P1 = np.atleast_2d(np.asarray(P1, dtype=float))
        self.P2 = np.atleast_2d(np.asarray(P2, dtype=float))
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.B = np.atleast_2d(np.asarray(B, dtype=float))
        self.q1 = np.asarray(q1, dtype=float).ravel()
        self.q2 = np.asarray(q2, dtype=float).ravel()
        self._b = np.asarray(b, dtype=float).ravel()
        self.m, self.n1 = self.A.shape
        self.n2 = self.B.shape[1]
        if self.B.shape[0] != self.m or self._b.shape != (self.m,):
            raise ValueError("constraint blocks have inconsistent shapes")
        if self.q1.shape != (self.n1,) or self.q2.shape != (self.n2,):
            raise ValueError("linear terms have inconsistent shapes")

    def solve_x(self, y, lam, beta):
        lhs = self.P1 + beta * self.A.T @ self.A
        rhs = self.A.T @ (lam - beta * (self.B @ y - self._b)) - self.q1
        return np.linalg.solve(lhs, rhs)

    def solve_y(self, x, lam, beta):
        lhs = self.P2 + beta * self.B.T @ self.B
        rhs = self.B.T @ (lam - beta * (self.A @ x - self._b)) - self.q2
        return np.linalg.solve(lhs, rhs)

    def apply_A(self, x):
        return self.A @ x

    def apply_B(self, y):
        return self.B @ y

    @property
    def rhs_b(self):
        return self._b

    def objective(self, x, y):
        return float(
            0.5 * x @ self.P1 @ x + self.q1 @ x + 0.5 * y @ self.P2 @ y + self.q2 @ y
        )

    def x_subproblem_residual(self, x, y, lam, beta):
        grad = (
            self.P1 @ x + self.q1 - self.A.T @ lam
            + beta * self.A.T @ self.constraint_residual(x, y)
        )
        return float(np.abs(grad).max(initial=0.0))

    def y_subproblem_residual(self, y, x, lam, beta):
        grad = (
            self.P2 @ y + self.q2 - self.B.T @ lam
            + beta * self.B.T @ self.constraint_residual(x, y)
        )
        return float(np.abs(grad).max(initial=0.0))

    def x_stationarity(self, x, lam):
        return float(np.abs(self.P1 @ x + self.q1 - self.A.T @ lam).max(initial=0.0))

    def y_stationarity(self, y, lam):
        return float(np.abs(self.P2 @ y + self.q2 - self.B.T @ lam).max(initial=0.0))

    @classmethod
    def random(cls, n1, n2, m, rng, feasible_shift=True):
        """Random well-conditioned instance; requires m >= max(n1, n2) so the
        constraint blocks are full column rank almost surely."""
        if m < max(n1, n2):
            raise ValueError("need m >= max(n1, n2) for full column rank")
        def spd(k):
            W = rng.standard_normal((k, k))
            return W @ W.T / k + 0.5 * np.eye(k)
        A = rng.standard_normal((m, n1))
        B = rng.standard_normal((m, n2))
        b = rng.standard_normal(m) if feasible_shift else np.zeros(m)
        return cls(spd(n1), rng.standard_normal(n1), spd(n2), rng.standard_normal(n2), A, B, b)


def scalar_chain() -> QuadraticProblem:
    """The 1-d instance 0.5 x^2 + 0.5 y^2 subject to x = y.

    Its unique saddle point is the origin, which makes it the standard smoke
    test: closed-form subproblem minimizers are x = (lam + beta y)/(1 + beta)
    and y = (beta x - lam)/(1 + beta).
    """
    return QuadraticProblem([[1.0]], [0.0], [[1.0]], [0.0], [[1.0]], [[-1.0]], [0.0])
