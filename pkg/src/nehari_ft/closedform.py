"""Closed-form stationary states of the NLS with a Fulop-Tsutsui delta defect.

Every stationary state is a pair of soliton pieces, phi(x + x_-) on R- and
phi(x + x_+) on R+, with T_+- = tanh(mu sqrt(omega) x_+-) solving

    T_+ = (T_- + v / sqrt(omega)) / tau^2                 (line)
    T_-^2 / (1 - tau^(-2mu)) - T_+^2 / (tau^(2mu) - 1) = 1  (hyperbola)

inside the open unit square. The line meets the hyperbola in at most two
points, the "tilde" root (the ground state) and the "hat" root.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import DefectParams, HalfLineGrid, PiecewiseField, SolitonPair, soliton_profile
from .errors import NoSolutionError, TruncationError


class Branch(str, enum.Enum):
    TILDE = "tilde"
    HAT = "hat"


def soliton(omega: float, mu: float, x):
    """phi_omega(x) = (omega (mu+1))^(1/2mu) cosh^(-1/mu)(mu sqrt(omega) x)."""
    return soliton_profile(omega, mu, x)


def linear_threshold(p: DefectParams) -> float:
    """Energy v^2/(tau^2+1)^2 of the linear bound state; no nonlinear states at or below it."""
    return p.omega_star


@dataclass(frozen=True)
class ExistenceRegime:
    omega_star: float
    omega_dstar: float
    count: int


def regime(p: DefectParams) -> ExistenceRegime:
    if p.omega <= p.omega_star:
        count = 0
    elif p.omega <= p.omega_dstar:
        count = 1
    else:
        count = 2
    return ExistenceRegime(p.omega_star, p.omega_dstar, count)


@dataclass(frozen=True)
class StationaryBranch:
    label: Branch
    T_minus: float
    T_plus: float
    x_minus: float
    x_plus: float
    params: DefectParams

    @property
    def analytic(self) -> SolitonPair:
        return SolitonPair(self.params.omega, self.params.mu, self.x_minus, self.x_plus)


def _pow_m1(tau, k):
    """tau^k - 1 without cancellation for tau near 1."""
    return math.expm1(k * math.log(tau))


def _diff_of(a, b, a2_minus_b2):
    """a - b, switching to (a^2 - b^2)/(a + b) when a and b nearly cancel."""
    if a * b > 0 and abs(a + b) > abs(a - b):
        return a2_minus_b2 / (a + b)
    return a - b


def _matching_roots(tau, r, mu, label):
    """(T_-, T_+, 1+T_-, 1-T_-, 1+T_+, 1-T_+) for one root of the matching system.

    ``r`` is v/sqrt(omega) and may be 0 (no defect strength, dipole state).
    The 1 +- T factors use exact factorizations of the conjugate products so
    they keep full relative accuracy when the root approaches a corner of the
    unit square; positions x_+- are computed from them.
    """
    t2 = tau * tau
    t2m1 = _pow_m1(tau, 2)              # tau^2 - 1
    q = tau ** (2 * mu)
    qm1 = _pow_m1(tau, 2 * mu)          # tau^(2mu) - 1
    d = _pow_m1(tau, 2 * mu + 4)        # tau^(2mu+4) - 1
    # A = r^2 tau^(2mu) + (tau^(2mu+4)-1)(tau^(2mu)-1): both factors share a sign
    A = r * r * q + d * qm1
    assert A >= 0.0, "discriminant must be non-negative"
    s = math.sqrt(A)
    sg = -1.0 if label is Branch.TILDE else 1.0

    T_m = (r + sg * t2 * s) / d
    T_p = (t2 * q * r + sg * s) / d
    # 1 + T_- = (d + r + sg tau^2 s)/d ; conjugate product d (tau^2-1+r)(tau^2+1-r)
    one_p_Tm = _diff_of(d + r, -sg * t2 * s, d * (t2m1 + r) * (t2 + 1 - r)) / d
    # 1 - T_- = (d - r - sg tau^2 s)/d ; conjugate product d (tau^2-1-r)(tau^2+1+r)
    one_m_Tm = _diff_of(d - r, sg * t2 * s, d * (t2m1 - r) * (t2 + 1 + r)) / d
    # 1 + T_+ = (d + tau^2 q r + sg s)/d ; conjugate product d q (tau^2+r-1)(tau^2+r+1)
    one_p_Tp = _diff_of(d + t2 * q * r, -sg * s, d * q * (t2m1 + r) * (t2 + r + 1)) / d
    # 1 - T_+ = (d - tau^2 q r - sg s)/d ; conjugate product d q (tau^2-r-1)(tau^2-r+1)
    one_m_Tp = _diff_of(d - t2 * q * r, sg * s, d * q * (t2m1 - r) * (t2 - r + 1)) / d
    return T_m, T_p, one_p_Tm, one_m_Tm, one_p_Tp, one_m_Tp


def _position(one_plus, one_minus, mu, omega):
    # arctanh(T) = 0.5 ln((1+T)/(1-T))
    return (math.log(one_plus) - math.log(one_minus)) / (2.0 * mu * math.sqrt(omega))


def _make_branch(p: DefectParams, label: Branch, r: float) -> StationaryBranch:
    T_m, T_p, opm, omm, opp, omp = _matching_roots(p.tau, r, p.mu, label)
    if min(opm, omm, opp, omp) <= 0.0:
        raise NoSolutionError(
            f"{label.value} root lies outside the open unit square",
            p.omega, p.omega_star, p.omega_dstar,
        )
    x_m = _position(opm, omm, p.mu, p.omega)
    x_p = _position(opp, omp, p.mu, p.omega)
    return StationaryBranch(label, T_m, T_p, x_m, x_p, p)


def branch_tilde(p: DefectParams) -> StationaryBranch:
    """The ground-state root; exists for omega > v^2/(tau^2+1)^2."""
    if p.omega <= p.omega_star:
        raise NoSolutionError("no stationary state", p.omega, p.omega_star, p.omega_dstar)
    return _make_branch(p, Branch.TILDE, p.v / math.sqrt(p.omega))


def branch_hat(p: DefectParams) -> StationaryBranch:
    """The second root; exists only for omega > v^2/(tau^2-1)^2."""
    if p.omega <= p.omega_dstar:
        raise NoSolutionError("hat branch does not exist", p.omega, p.omega_star, p.omega_dstar)
    return _make_branch(p, Branch.HAT, p.v / math.sqrt(p.omega))


def branches(p: DefectParams) -> list:
    """All stationary branches existing at p.omega (tilde first)."""
    reg = regime(p)
    out = []
    if reg.count >= 1:
        out.append(branch_tilde(p))
    if reg.count == 2:
        out.append(branch_hat(p))
    return out


def _check_width(grid: HalfLineGrid, shifts, omega):
    need = max(abs(s) for s in shifts) + 10.0 / math.sqrt(omega)
    if grid.L < need:
        raise TruncationError(f"grid half-width L={grid.L:g} too small; need L >= {need:.6g}")


def build_stationary(b: StationaryBranch, grid: HalfLineGrid) -> PiecewiseField:
    """Sample u(x) = phi(x + x_-) on R-, phi(x + x_+) on R+ with its analytic descriptor."""
    _check_width(grid, (b.x_minus, b.x_plus), b.params.omega)
    return PiecewiseField.from_analytic(grid, b.analytic)


def soliton_field(grid: HalfLineGrid, omega: float, mu: float) -> PiecewiseField:
    """The free soliton centred at the origin (continuous, so not in the jump space)."""
    return PiecewiseField.from_analytic(grid, SolitonPair(omega, mu, 0.0, 0.0))


def dipole_tanh(p: DefectParams):
    """Magnitudes (sqrt((1-tau^2mu)/(1-tau^(2mu+4))), tau^2 times that).

    These are |tanh(mu sqrt(omega) zeta)| of the two pieces of the zero-strength
    stationary state; the smaller one belongs to the piece at 0+ (see
    ``dipole_state``).
    """
    small = math.sqrt(_pow_m1(p.tau, 2 * p.mu) / _pow_m1(p.tau, 2 * p.mu + 4))
    return small, p.tau**2 * small


def dipole_branch(p: DefectParams) -> StationaryBranch:
    """Zero-strength (v = 0) minimizing stationary state at p.omega, as a branch record."""
    return _make_branch(p, Branch.TILDE, 0.0)


def dipole_state(p: DefectParams, grid: HalfLineGrid) -> PiecewiseField:
    """Comparison state for the problem without the delta part (v = 0).

    It satisfies u(0+) = tau u(0-) and u'(0-) = tau u'(0+). For tau > 1 the
    piece on R- is a soliton tail with |tanh| = tau^2 * sqrt((1-tau^2mu)/(1-tau^(2mu+4)))
    at the origin and the piece on R+ carries the peak.
    """
    b = dipole_branch(p)
    _check_width(grid, (b.x_minus, b.x_plus), p.omega)
    return PiecewiseField.from_analytic(grid, b.analytic)


def tilde_slopes(p: DefectParams):
    """(dT_-/domega, dT_+/domega) along the tilde branch, from the explicit formulas."""
    tau, v, mu, w = p.tau, p.v, p.mu, p.omega
    d = _pow_m1(tau, 2 * mu + 4)
    A = v * v / w * tau ** (2 * mu) + d * _pow_m1(tau, 2 * mu)
    c = -v / (2.0 * d)
    dTm = c * (w**-1.5 - v * tau ** (2 * mu + 2) / (w * w * math.sqrt(A)))
    dTp = c * (tau ** (2 * mu + 2) * w**-1.5 - v * tau ** (2 * mu) / (w * w * math.sqrt(A)))
    return dTm, dTp


def kernel_obstruction(tau: float, mu: float) -> float:
    """(tau^2mu - 1)/(tau^2mu (1 - tau^(2mu+4))): value T_-^2 would need for a kernel of L1."""
    return _pow_m1(tau, 2 * mu) / (tau ** (2 * mu) * -_pow_m1(tau, 2 * mu + 4))


__all__ = [
    "Branch", "ExistenceRegime", "StationaryBranch", "soliton", "linear_threshold",
    "regime", "branch_tilde", "branch_hat", "branches", "build_stationary",
    "soliton_field", "dipole_state", "dipole_branch", "dipole_tanh", "tilde_slopes",
    "kernel_obstruction",
]
