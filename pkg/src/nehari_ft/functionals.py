"""Energy, action, Nehari functional and their closed forms on stationary states."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closedform import StationaryBranch
from .core import DefectParams, PiecewiseField, trapezoid
from .errors import CoercivityError, UndefinedScaleError
from .quadrature import full_t_integral, t_integral

# |I_omega(u)| <= NEHARI_RTOL * max(1, lp) counts as "on the Nehari manifold"
NEHARI_RTOL = 1e-8


@dataclass(frozen=True)
class FunctionalReport:
    kinetic: float   # ||u'||^2 over both half-lines
    mass2: float     # ||u||_2^2
    lp: float        # ||u||_{2mu+2}^{2mu+2}
    defect: float    # |u(0-)|^2
    energy: float
    action: float
    nehari: float
    reduced: float

    @classmethod
    def from_norms(cls, kinetic, mass2, lp, defect, p: DefectParams) -> "FunctionalReport":
        mu, v, w = p.mu, p.v, p.omega
        energy = 0.5 * kinetic - lp / (2 * mu + 2) - 0.5 * v * defect
        return cls(
            kinetic=float(kinetic), mass2=float(mass2), lp=float(lp), defect=float(defect),
            energy=float(energy),
            action=float(energy + 0.5 * w * mass2),
            nehari=float(kinetic - lp - v * defect + w * mass2),
            reduced=float(mu / (2 * (mu + 1)) * lp),
        )

    def on_manifold(self) -> bool:
        return abs(self.nehari) <= NEHARI_RTOL * max(1.0, self.lp)


def evaluate(u: PiecewiseField, p: DefectParams) -> FunctionalReport:
    """All functionals of u by per-half-line trapezoid quadrature."""
    h = u.grid.h
    du_m, du_p = u.derivatives()
    pw = 2 * p.mu + 2
    kinetic = mass2 = lp = 0.0
    for vals, dv in ((u.values_minus, du_m), (u.values_plus, du_p)):
        a2 = np.abs(vals) ** 2
        kinetic += trapezoid(np.abs(dv) ** 2, h)
        mass2 += trapezoid(a2, h)
        lp += trapezoid(a2 ** (pw / 2), h)
    return FunctionalReport.from_norms(kinetic, mass2, lp, abs(u.at_0minus) ** 2, p)


def closed_form_norms(T_minus, T_plus, omega, mu):
    """(kinetic, mass2, lp, defect) of the soliton-pair state with endpoints T_-, T_+."""
    a = 1.0 / mu
    c = (mu + 1) ** a
    full_a, full_am1 = full_t_integral(a), full_t_integral(a - 1)
    inner_a = t_integral(T_minus, T_plus, a)
    inner_am1 = t_integral(T_minus, T_plus, a - 1)
    edge_p = T_plus * (1 - T_plus**2) ** a
    edge_m = T_minus * (1 - T_minus**2) ** a
    kinetic = 0.5 * c * omega ** (a + 0.5) * (full_a - inner_a + edge_p - edge_m)
    mass2 = c / mu * omega ** (a - 0.5) * (full_am1 - inner_am1)
    lp = c * (mu + 1) / mu * omega ** (a + 0.5) * (full_a - inner_a)
    defect = c * omega**a * (1 - T_minus**2) ** a
    return float(kinetic), float(mass2), float(lp), float(defect)


def closed_form_report(b: StationaryBranch) -> FunctionalReport:
    p = b.params
    return FunctionalReport.from_norms(*closed_form_norms(b.T_minus, b.T_plus, p.omega, p.mu), p)


def nehari_scale(u: PiecewiseField, p: DefectParams) -> float:
    """alpha(u) such that I_omega(alpha u) = 0."""
    rep = evaluate(u, p)
    if rep.lp == 0.0:
        raise UndefinedScaleError("Nehari scale undefined for the zero field")
    num = rep.kinetic - p.v * rep.defect + p.omega * rep.mass2
    if num <= 0.0:
        raise CoercivityError(
            f"quadratic part is non-positive ({num:.3e}); omega={p.omega} <= omega*={p.omega_star}?"
        )
    return (num / rep.lp) ** (1.0 / (2 * p.mu))


def coercivity_constant(p: DefectParams) -> float:
    """C with ||u'||^2 - v|u(0-)|^2 + omega ||u||^2 >= C ||u||^2_{H1tau}.

    Uses the splitting parameter a = sqrt(omega), the geometric mean of the
    admissible interval (v/(tau^2+1), omega (tau^2+1)/v).
    """
    lo, hi = p.v / (p.tau**2 + 1), p.omega * (p.tau**2 + 1) / p.v
    if not lo < hi:
        raise CoercivityError(
            f"empty splitting interval ({lo:.6g}, {hi:.6g}): omega must exceed {p.omega_star:.6g}"
        )
    a = math.sqrt(p.omega)
    return min(1.0 - p.v / (a * (p.tau**2 + 1)), p.omega - p.v * a / (p.tau**2 + 1))
