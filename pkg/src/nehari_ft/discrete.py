"""Variational discretization on the jump-constrained space.

Unknowns are all nodes except 0+, which is tied to tau * u(0-). In the
order (-L, ..., 0-, h, ..., L) the coupling between 0- and the first right
node stays adjacent, so every quadratic form here is tridiagonal. The flux
condition u'(0-) - tau u'(0+) = v u(0-) is not imposed; it is the natural
boundary condition of the forms.

Kinetic energy uses forward differences (exact for the piecewise-linear
interpolant), masses and powers use the trapezoid weights of ``core``.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded, LinAlgError

from .core import HalfLineGrid, PiecewiseField
from .errors import CoercivityError


class ReducedSpace:
    def __init__(self, grid: HalfLineGrid, tau: float):
        self.grid = grid
        self.tau = float(tau)
        N, h = grid.N, grid.h
        self.n = 2 * N + 1
        self.i0 = N  # index of u(0-)

        kd = np.full(self.n, 2.0 / h)
        kd[0] = kd[-1] = 1.0 / h
        kd[N] = (1.0 + tau**2) / h
        ko = np.full(self.n - 1, -1.0 / h)
        ko[N] = -tau / h
        self.stiff_diag, self.stiff_off = kd, ko

        self.mass = self.power_weights(2.0)

    def power_weights(self, power: float) -> np.ndarray:
        """Weights c with sum c |w|^power = trapezoid of |u|^power over both half-lines."""
        h, N = self.grid.h, self.grid.N
        c = np.full(self.n, h)
        c[0] = c[-1] = 0.5 * h
        c[N] = 0.5 * h * (1.0 + self.tau**power)
        return c

    # conversions
    def expand(self, w):
        N = self.grid.N
        left = w[: N + 1]
        right = np.concatenate(([self.tau * w[N]], w[N + 1:]))
        return left, right

    def to_field(self, w) -> PiecewiseField:
        left, right = self.expand(np.asarray(w))
        return PiecewiseField(self.grid, left.copy(), right.copy())

    def restrict(self, u: PiecewiseField):
        """Drop the 0+ sample (assumed equal to tau * u(0-))."""
        return np.concatenate((u.values_minus, u.values_plus[1:]))

    # forms
    def stiffness_apply(self, w):
        out = self.stiff_diag * w
        out[:-1] += self.stiff_off * w[1:]
        out[1:] += self.stiff_off * w[:-1]
        return out

    def kinetic(self, w) -> float:
        return float(np.real(np.vdot(w, self.stiffness_apply(w))))

    def mass2(self, w) -> float:
        return float(np.sum(self.mass * np.abs(w) ** 2))

    def lp(self, w, mu: float) -> float:
        pw = 2 * mu + 2
        return float(np.sum(self.power_weights(pw) * np.abs(w) ** pw))

    def defect(self, w) -> float:
        return float(abs(w[self.i0]) ** 2)

    def banded(self, v: float, omega: float, potential=None):
        """Upper banded storage (2, n) of K - v e0 e0^T + diag(mass * (omega - potential))."""
        diag = self.stiff_diag + omega * self.mass
        if potential is not None:
            diag = diag - self.mass * potential
        diag = diag.copy()
        diag[self.i0] -= v
        ab = np.zeros((2, self.n), dtype=np.result_type(diag, float))
        ab[0, 1:] = self.stiff_off
        ab[1] = diag
        return ab

    def linear_factor(self, v: float, omega: float):
        """Cholesky factor of the coercive quadratic part K - v e0 e0^T + omega M."""
        try:
            return cholesky_banded(self.banded(v, omega))
        except LinAlgError as exc:
            raise CoercivityError(
                "discrete quadratic form is not positive definite; omega too close to omega*"
            ) from exc

    @staticmethod
    def solve(factor, rhs):
        return cho_solve_banded((factor, False), rhs)

    def energy(self, w, v: float, mu: float) -> float:
        """Semi-discrete energy conserved by the discrete flow."""
        return 0.5 * (self.kinetic(w) - v * self.defect(w)) - self.lp(w, mu) / (2 * mu + 2)
