"""Mass curve M(omega), phi(omega), the stability verdict and sweep tables.

Along the tilde branch

    phi(omega) = int_{T_-}^{T_+} (1 - t^2)^(1/mu - 1) dt
    M(omega)   = ((mu+1)^(1/mu) / mu) omega^(1/mu - 1/2) (B - phi(omega))

with B the same integral over (-1, 1). Orbital stability follows from the
spectral conditions on L1, L2 together with M'(omega) > 0.
"""
from __future__ import annotations

import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .closedform import branch_hat, branch_tilde, regime, tilde_slopes
from .core import DefectParams, HalfLineGrid, suggest_grid
from .errors import NehariFTError, ThresholdProximityError
from .functionals import closed_form_report
from .quadrature import full_t_integral, t_integral

log = logging.getLogger(__name__)

FD_REL_STEP = 1e-3
# |M'| <= VERDICT_RTOL * M / omega is too close to call
VERDICT_RTOL = 1e-8


class Verdict(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


def phi(p: DefectParams) -> float:
    b = branch_tilde(p)
    return t_integral(b.T_minus, b.T_plus, 1.0 / p.mu - 1.0)


def _mass_prefactor(p: DefectParams) -> float:
    a = 1.0 / p.mu
    return (p.mu + 1) ** a / p.mu


def mass(p: DefectParams) -> float:
    """M(omega) = ||u_tilde||_2^2 from the closed form."""
    a = 1.0 / p.mu
    return _mass_prefactor(p) * p.omega ** (a - 0.5) * (full_t_integral(a - 1.0) - phi(p))


def dphi(p: DefectParams) -> float:
    """phi'(omega) from the explicit slopes of T_-(omega), T_+(omega)."""
    b = branch_tilde(p)
    e = 1.0 / p.mu - 1.0
    dTm, dTp = tilde_slopes(p)
    return (1 - b.T_plus**2) ** e * dTp - (1 - b.T_minus**2) ** e * dTm


def dmass_analytic(p: DefectParams) -> float:
    a = 1.0 / p.mu
    w = p.omega
    rest = full_t_integral(a - 1.0) - phi(p)
    return _mass_prefactor(p) * ((a - 0.5) * w ** (a - 1.5) * rest - w ** (a - 0.5) * dphi(p))


def dmass_fd(p: DefectParams, rel_step: float = FD_REL_STEP) -> float:
    """Five-point centered difference of M with step rel_step * omega."""
    h = rel_step * p.omega
    if p.omega - 5 * h <= p.omega_star:
        raise ThresholdProximityError(
            f"omega={p.omega:.6g} is within 5 steps (h={h:.3g}) of omega*={p.omega_star:.6g}; "
            "use a smaller relative step"
        )
    m = [mass(p.with_omega(p.omega + k * h)) for k in (-2, -1, 1, 2)]
    return (m[0] - 8 * m[1] + 8 * m[2] - m[3]) / (12 * h)


@dataclass
class StabilityVerdict:
    omega: float
    mass: float
    dmass: float
    phi: float
    dphi: float
    spectral_ok: bool
    verdict: Verdict
    dmass_analytic: float = math.nan
    richardson_ok: bool = True


def proximity_step(p: DefectParams, rel_step: float = FD_REL_STEP) -> float:
    """Largest relative step <= rel_step that keeps the stencil well above omega*."""
    room = (p.omega - p.omega_star) / (10.0 * p.omega)
    return min(rel_step, room)


def gss_verdict(
    p: DefectParams,
    run_spectral: bool = False,
    rel_step: float = FD_REL_STEP,
    grid: Optional[HalfLineGrid] = None,
) -> StabilityVerdict:
    """Stability verdict from the sign of M'(omega) and the spectral conditions.

    Without ``run_spectral`` the spectral conditions are taken as given
    (they hold for every admissible parameter set); with it they are
    checked numerically on ``grid`` (default from ``suggest_grid``).
    """
    m = mass(p)
    d1 = dmass_fd(p, rel_step)
    d2 = dmass_fd(p, rel_step / 2)
    tol = VERDICT_RTOL * m / p.omega
    richardson_ok = abs(d1 - d2) <= 0.01 * abs(d2) + tol
    if not richardson_ok:
        log.warning("Richardson check failed at omega=%g: %g vs %g", p.omega, d1, d2)
    spectral_ok = True
    if run_spectral:
        from .spectral import gss_spectral_conditions

        b = branch_tilde(p)
        if grid is None:
            grid = suggest_grid(p, (b.x_minus, b.x_plus))
        spectral_ok = gss_spectral_conditions(p, grid)[0]

    if abs(d2) <= tol:
        verdict = Verdict.INCONCLUSIVE
    elif not spectral_ok:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.STABLE if d2 > 0 else Verdict.UNSTABLE
    return StabilityVerdict(
        omega=p.omega, mass=m, dmass=d2, phi=phi(p), dphi=dphi(p),
        spectral_ok=spectral_ok, verdict=verdict,
        dmass_analytic=dmass_analytic(p), richardson_ok=richardson_ok,
    )


def locate_critical_omegas(p: DefectParams, omega_max: float, samples: int = 400):
    """All sign changes of M' on (omega*, omega_max], refined by brentq on the analytic M'."""
    lo = p.omega_star * (1 + 1e-6)
    grid = np.geomspace(lo, omega_max, samples)
    vals = np.array([dmass_analytic(p.with_omega(w)) for w in grid])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(lambda w: dmass_analytic(p.with_omega(w)), grid[i], grid[i + 1],
                            xtol=1e-14, rtol=4 * np.finfo(float).eps))
    return roots


# tables


def default_threads() -> int:
    raw = os.environ.get("NEHARI_FT_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _parallel_map(fn, items, threads):
    threads = default_threads() if threads is None else max(1, threads)
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        # map preserves input order, so rows stay sorted by omega
        return list(ex.map(fn, items))


BIFURCATION_COLUMNS = (
    "omega", "count",
    "T_tilde_minus", "T_tilde_plus", "x_tilde_minus", "x_tilde_plus",
    "T_hat_minus", "T_hat_plus", "x_hat_minus", "x_hat_plus",
    "mass_tilde", "mass_hat", "s_reduced_tilde", "s_reduced_hat",
)

MASSCURVE_COLUMNS = ("omega", "mass", "dmass_domega", "phi", "verdict")


def _safe_verdict(p: DefectParams):
    try:
        return gss_verdict(p, rel_step=proximity_step(p))
    except NehariFTError as exc:
        log.info("no verdict at omega=%g: %s", p.omega, exc)
        return None


def _bifurcation_row(p: DefectParams) -> dict:
    row = dict.fromkeys(BIFURCATION_COLUMNS)
    row["omega"] = p.omega
    reg = regime(p)
    row["count"] = reg.count
    row["verdict"] = None
    row["error"] = None
    try:
        if reg.count >= 1:
            b = branch_tilde(p)
            rep = closed_form_report(b)
            row.update(T_tilde_minus=b.T_minus, T_tilde_plus=b.T_plus,
                       x_tilde_minus=b.x_minus, x_tilde_plus=b.x_plus,
                       mass_tilde=rep.mass2, s_reduced_tilde=rep.reduced)
            v = _safe_verdict(p)
            row["verdict"] = v.verdict.value if v else None
        if reg.count == 2:
            b = branch_hat(p)
            rep = closed_form_report(b)
            row.update(T_hat_minus=b.T_minus, T_hat_plus=b.T_plus,
                       x_hat_minus=b.x_minus, x_hat_plus=b.x_plus,
                       mass_hat=rep.mass2, s_reduced_hat=rep.reduced)
    except NehariFTError as exc:
        row["error"] = str(exc)
    return row


def bifurcation_sweep(base: DefectParams, omega_grid, threads: Optional[int] = None) -> list:
    """One row per omega: branch count, both branches' data, masses, reduced actions."""
    omegas = [float(w) for w in omega_grid]
    if any(w <= 0 for w in omegas) or omegas != sorted(omegas):
        raise ValueError("omega_grid must be sorted and positive")
    return _parallel_map(lambda w: _bifurcation_row(base.with_omega(w)), omegas, threads)


def _masscurve_row(p: DefectParams) -> dict:
    row = dict.fromkeys(MASSCURVE_COLUMNS)
    row["omega"] = p.omega
    if p.omega <= p.omega_star:
        return row
    row["mass"] = mass(p)
    row["phi"] = phi(p)
    v = _safe_verdict(p)
    if v is not None:
        row["dmass_domega"] = v.dmass
        row["verdict"] = v.verdict.value
    return row


def mass_curve(base: DefectParams, omega_grid, threads: Optional[int] = None) -> list:
    omegas = [float(w) for w in omega_grid]
    if any(w <= 0 for w in omegas) or omegas != sorted(omegas):
        raise ValueError("omega_grid must be sorted and positive")
    return _parallel_map(lambda w: _masscurve_row(base.with_omega(w)), omegas, threads)
