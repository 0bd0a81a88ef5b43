"""Problem parameters, half-line grids and piecewise fields.

Fields live on R minus the origin. Each half-line is sampled on its own
uniform grid, so the origin appears twice: once as the left limit 0- and
once as the right limit 0+. The jump condition u(0+) = tau u(0-) is a
relation between these two samples, never a shared node.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import InvalidGridError, InvalidParameterError

MIN_NODES = 16


@dataclass(frozen=True)
class DefectParams:
    """One problem instance: jump factor tau, defect strength v, power mu, frequency omega."""

    tau: float
    v: float
    mu: float
    omega: float = 1.0

    def __post_init__(self):
        for name in ("tau", "v", "mu", "omega"):
            val = getattr(self, name)
            if not math.isfinite(val):
                raise InvalidParameterError(f"{name} must be finite, got {val!r}")
        if self.tau <= 0:
            raise InvalidParameterError(
                f"tau must be positive (sign of tau is a symmetry), got {self.tau!r}"
            )
        if self.tau == 1:
            raise InvalidParameterError("tau = 1 is the pure delta interaction; need tau != 1")
        if self.v <= 0:
            raise InvalidParameterError(f"only attractive defects are supported: v > 0, got {self.v!r}")
        if self.mu <= 0:
            raise InvalidParameterError(f"mu must be positive, got {self.mu!r}")
        if self.omega <= 0:
            raise InvalidParameterError(f"omega must be positive, got {self.omega!r}")

    def with_omega(self, omega: float) -> "DefectParams":
        return replace(self, omega=float(omega))

    @property
    def omega_star(self) -> float:
        return self.v**2 / (self.tau**2 + 1) ** 2

    @property
    def omega_dstar(self) -> float:
        return self.v**2 / (self.tau**2 - 1) ** 2


@dataclass(frozen=True)
class HalfLineGrid:
    """Uniform sampling of [-L, 0-] and [0+, L] with N intervals per half-line."""

    L: float
    N: int

    def __post_init__(self):
        if not (self.L > 0 and math.isfinite(self.L)):
            raise InvalidGridError(f"L must be positive, got {self.L!r}")
        if int(self.N) != self.N or self.N < MIN_NODES:
            raise InvalidGridError(f"N must be an integer >= {MIN_NODES}, got {self.N!r}")

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def x_minus(self) -> np.ndarray:
        """Nodes -L, ..., -h, 0- (last entry is the left limit at the origin)."""
        return np.linspace(-self.L, 0.0, self.N + 1)

    @property
    def x_plus(self) -> np.ndarray:
        """Nodes 0+, h, ..., L (first entry is the right limit at the origin)."""
        return np.linspace(0.0, self.L, self.N + 1)

    def refined(self, factor: int = 2) -> "HalfLineGrid":
        return HalfLineGrid(self.L, self.N * factor)


def default_half_width(omega: float, mu: float) -> float:
    """Default truncation half-width max(40, 12/sqrt(omega)) max(1, 1/mu).

    Tails are below 1e-12 when the constant 40 dominates; on the 12/sqrt(omega)
    branch they decay only to about exp(-12) of the peak.
    """
    return max(40.0, 12.0 / math.sqrt(omega)) * max(1.0, 1.0 / mu)


def suggest_grid(p: DefectParams, shifts=(), h: float = 0.01) -> HalfLineGrid:
    """Grid wide enough for solitons translated by ``shifts`` at p.omega.

    ``h`` is the spacing for a unit-width soliton; it is shrunk by mu*sqrt(omega)
    when the soliton is narrower than that.
    """
    extra = max((abs(s) for s in shifts), default=0.0)
    L = default_half_width(p.omega, p.mu) + extra
    h_eff = h / max(1.0, p.mu * math.sqrt(p.omega))
    return HalfLineGrid(L, max(MIN_NODES, int(math.ceil(L / h_eff))))


def _log_cosh(z):
    z = np.abs(z)
    return z + np.log1p(np.exp(-2.0 * z)) - math.log(2.0)


def soliton_profile(omega: float, mu: float, s):
    """(omega (mu+1))^(1/2mu) cosh^(-1/mu)(mu sqrt(omega) s), overflow-safe."""
    s = np.asarray(s, dtype=float)
    amp = (omega * (mu + 1.0)) ** (0.5 / mu)
    return amp * np.exp(-_log_cosh(mu * math.sqrt(omega) * s) / mu)


def soliton_slope(omega: float, mu: float, s):
    s = np.asarray(s, dtype=float)
    return -math.sqrt(omega) * np.tanh(mu * math.sqrt(omega) * s) * soliton_profile(omega, mu, s)


@dataclass(frozen=True)
class SolitonPair:
    """Closed form u(x) = amplitude * phi(x + shift_minus) on R-, amplitude * phi(x + shift_plus) on R+."""

    omega: float
    mu: float
    shift_minus: float
    shift_plus: float
    amplitude: float = 1.0

    def values(self, x, side: str):
        shift = self.shift_minus if side == "minus" else self.shift_plus
        return self.amplitude * soliton_profile(self.omega, self.mu, np.asarray(x) + shift)

    def derivatives(self, x, side: str):
        shift = self.shift_minus if side == "minus" else self.shift_plus
        return self.amplitude * soliton_slope(self.omega, self.mu, np.asarray(x) + shift)


@dataclass(frozen=True, eq=False)
class PiecewiseField:
    """Samples of a function on R minus {0}; ``values_minus[-1]`` is u(0-), ``values_plus[0]`` is u(0+)."""

    grid: HalfLineGrid
    values_minus: np.ndarray
    values_plus: np.ndarray
    analytic: Optional[SolitonPair] = field(default=None)

    def __post_init__(self):
        n = self.grid.N + 1
        vm = np.asarray(self.values_minus)
        vp = np.asarray(self.values_plus)
        if vm.shape != (n,) or vp.shape != (n,):
            raise InvalidGridError(
                f"value arrays must have shape ({n},), got {vm.shape} and {vp.shape}"
            )
        vm.setflags(write=False)
        vp.setflags(write=False)
        object.__setattr__(self, "values_minus", vm)
        object.__setattr__(self, "values_plus", vp)

    @classmethod
    def from_analytic(cls, grid: HalfLineGrid, pair: SolitonPair) -> "PiecewiseField":
        return cls(grid, pair.values(grid.x_minus, "minus"), pair.values(grid.x_plus, "plus"), pair)

    @classmethod
    def zeros(cls, grid: HalfLineGrid, dtype=float) -> "PiecewiseField":
        return cls(grid, np.zeros(grid.N + 1, dtype), np.zeros(grid.N + 1, dtype))

    @property
    def at_0minus(self):
        return self.values_minus[-1]

    @property
    def at_0plus(self):
        return self.values_plus[0]

    def __mul__(self, c):
        pair = self.analytic
        # a real multiple of a soliton pair keeps its closed-form derivatives
        if pair is not None and np.isrealobj(c) and np.ndim(c) == 0:
            pair = replace(pair, amplitude=pair.amplitude * float(c))
        else:
            pair = None
        return PiecewiseField(self.grid, c * self.values_minus, c * self.values_plus, pair)

    __rmul__ = __mul__

    def __add__(self, other: "PiecewiseField") -> "PiecewiseField":
        if other.grid != self.grid:
            raise InvalidGridError("cannot add fields on different grids")
        return PiecewiseField(self.grid, self.values_minus + other.values_minus,
                              self.values_plus + other.values_plus)

    def __sub__(self, other: "PiecewiseField") -> "PiecewiseField":
        return self + (-1.0) * other

    def derivatives(self):
        """(u' on R-, u' on R+): analytic if available, else finite differences."""
        if self.analytic is not None:
            return (self.analytic.derivatives(self.grid.x_minus, "minus"),
                    self.analytic.derivatives(self.grid.x_plus, "plus"))
        return fd_derivative(self.values_minus, self.grid.h), fd_derivative(self.values_plus, self.grid.h)


def fd_derivative(values, h):
    """Centered differences inside, second-order one-sided 3-point stencils at both ends."""
    return np.gradient(values, h, edge_order=2)


def trapezoid(values, h):
    values = np.asarray(values)
    return h * (values.sum() - 0.5 * (values[0] + values[-1]))


def vertex_residual(u: PiecewiseField, p: DefectParams):
    """(|u(0+) - tau u(0-)|, |u'(0-) - tau u'(0+) - v u(0-)|).

    One-sided derivatives come from the analytic descriptor when present,
    otherwise from second-order 3-point stencils that never cross the origin.
    """
    if u.grid.N < 3:
        raise InvalidGridError("need at least 3 nodes on each side of the origin")
    u0m, u0p = u.at_0minus, u.at_0plus
    if u.analytic is not None:
        d_minus = u.analytic.derivatives(0.0, "minus")
        d_plus = u.analytic.derivatives(0.0, "plus")
    else:
        h = u.grid.h
        vm, vp = u.values_minus, u.values_plus
        d_minus = (3.0 * vm[-1] - 4.0 * vm[-2] + vm[-3]) / (2.0 * h)
        d_plus = (-3.0 * vp[0] + 4.0 * vp[1] - vp[2]) / (2.0 * h)
    jump = abs(u0p - p.tau * u0m)
    flux = abs(d_minus - p.tau * d_plus - p.v * u0m)
    return float(jump), float(flux)


def h1tau_inner(u: PiecewiseField, w: PiecewiseField) -> complex:
    """<u, w> = int u conj(w) + int u' conj(w') over both half-lines (no tau weighting)."""
    h = u.grid.h
    total = 0.0
    for a, b in ((u.values_minus, w.values_minus), (u.values_plus, w.values_plus)):
        da, db = fd_derivative(a, h), fd_derivative(b, h)
        total = total + trapezoid(a * np.conj(b), h) + trapezoid(da * np.conj(db), h)
    return total


def h1tau_norm(u: PiecewiseField) -> float:
    return float(math.sqrt(max(h1tau_inner(u, u).real, 0.0)))
