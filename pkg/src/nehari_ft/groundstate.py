"""Ground-state identification and an independent variational check.

``identify`` compares the reduced action of the closed-form branches.
``variational_minimize`` never looks at the closed forms: it minimizes the
reduced action over {I_omega <= 0} on a grid, rescaling each iterate onto
the Nehari manifold and stepping along a Sobolev gradient.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .closedform import Branch, branch_hat, branch_tilde, dipole_state, regime
from .core import DefectParams, HalfLineGrid, PiecewiseField, h1tau_norm
from .discrete import ReducedSpace
from .errors import NoSolutionError
from .functionals import closed_form_report
from .quadrature import t_integral

log = logging.getLogger(__name__)


class Winner(str, enum.Enum):
    TILDE = "tilde"
    HAT = "hat"
    ONLY_TILDE = "only_tilde"


@dataclass
class GroundStateResult:
    winner: Winner
    d_omega: float
    reports: dict
    variational_value: Optional[float] = None
    variational_field: Optional[PiecewiseField] = None


def identify(p: DefectParams) -> GroundStateResult:
    reg = regime(p)
    if reg.count == 0:
        raise NoSolutionError("no ground state", p.omega, p.omega_star, p.omega_dstar)
    tilde = branch_tilde(p)
    reports = {Branch.TILDE: closed_form_report(tilde)}
    if reg.count == 1:
        return GroundStateResult(Winner.ONLY_TILDE, reports[Branch.TILDE].reduced, reports)
    hat = branch_hat(p)
    reports[Branch.HAT] = closed_form_report(hat)
    a = 1.0 / p.mu
    # the ground state has the positive t-integral, the hat state the negative one
    assert t_integral(tilde.T_minus, tilde.T_plus, a) > 0 > t_integral(hat.T_minus, hat.T_plus, a)
    s_tilde, s_hat = reports[Branch.TILDE].reduced, reports[Branch.HAT].reduced
    winner = Winner.TILDE if s_tilde < s_hat else Winner.HAT
    if winner is not Winner.TILDE:
        log.warning("hat branch has lower reduced action at %s", p)
    return GroundStateResult(winner, min(s_tilde, s_hat), reports)


@dataclass
class MinimizerResult:
    value: float                 # reduced action of the final iterate
    field: PiecewiseField
    converged: bool
    iterations: int
    gradient_norm: float
    nehari_residual: float       # discrete I_omega of the final iterate
    lp: float
    history: list = field(default_factory=list)

    def __iter__(self):
        # unpacks as (value, field)
        return iter((self.value, self.field))


class _NehariProblem:
    """Discrete S_omega, I_omega and reduced action on the constrained space."""

    def __init__(self, p: DefectParams, grid: HalfLineGrid):
        self.p = p
        self.space = ReducedSpace(grid, p.tau)
        self.factor = self.space.linear_factor(p.v, p.omega)
        self.ab = self.space.banded(p.v, p.omega)
        self.cpow = self.space.power_weights(2 * p.mu + 2)

    def quad(self, w):
        Aw = self.ab[1] * w
        Aw[:-1] += self.ab[0, 1:] * w[1:]
        Aw[1:] += self.ab[0, 1:] * w[:-1]
        return Aw

    def lp(self, w):
        return float(np.sum(self.cpow * np.abs(w) ** (2 * self.p.mu + 2)))

    def reduced(self, w):
        mu = self.p.mu
        return mu / (2 * (mu + 1)) * self.lp(w)

    def nehari(self, w):
        return float(w @ self.quad(w)) - self.lp(w)

    def project(self, w):
        q = float(w @ self.quad(w))
        return w * (q / self.lp(w)) ** (1.0 / (2 * self.p.mu))

    def riesz_gradient(self, w):
        """Representative of S_omega'(w) in the inner product of the quadratic part."""
        nl = self.cpow * np.abs(w) ** (2 * self.p.mu) * w
        return w - self.space.solve(self.factor, nl)

    def a_norm(self, w):
        return float(np.sqrt(max(w @ self.quad(w), 0.0)))


def _random_positive(grid: HalfLineGrid, p: DefectParams, rng) -> PiecewiseField:
    xs = (grid.x_minus, grid.x_plus)
    width = 1.0 / np.sqrt(p.omega)
    vals = []
    for x in xs:
        f = np.zeros_like(x)
        # bumps straddling the defect; far-away mass drifts in exponentially slowly
        for _ in range(4):
            c = rng.uniform(-width, width)
            f += rng.uniform(0.2, 1.0) * np.exp(-(((x - c) / (width * rng.uniform(1.0, 3.0))) ** 2))
        vals.append(f)
    # the jump condition is restored by the parameterization (0+ := tau * 0-)
    return PiecewiseField(grid, vals[0], vals[1])


def variational_minimize(
    p: DefectParams,
    grid: HalfLineGrid,
    max_iter: int = 2000,
    init: Optional[PiecewiseField] = None,
    gtol: float = 1e-6,
    seed: Optional[int] = None,
) -> MinimizerResult:
    """Minimize the reduced action over {I_omega <= 0} by projected Sobolev descent.

    ``init`` may be any nonzero field on ``grid``; its 0+ sample is replaced
    by tau * u(0-). The default is the zero-strength dipole state. With
    ``init="random"`` a random positive field is drawn from ``seed``.
    Stops when the relative gradient norm drops below ``gtol`` (the rounding
    floor of the line search is near 1e-7). On budget exhaustion or a stalled
    line search the result is returned with ``converged=False``.
    """
    prob = _NehariProblem(p, grid)
    sp = prob.space
    if init is None:
        init = dipole_state(p, grid)
    elif isinstance(init, str) and init == "random":
        init = _random_positive(grid, p, np.random.default_rng(seed))
    w = np.real(sp.restrict(init)).astype(float)
    if not np.any(w):
        raise ValueError("initial field must be nonzero")
    w = prob.project(w)
    value = prob.reduced(w)
    history = [value]
    converged = False
    gnorm = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        d = prob.riesz_gradient(w)
        gnorm = prob.a_norm(d) / prob.a_norm(w)
        if gnorm < gtol:
            converged = True
            it -= 1
            break
        step = 1.0
        while step > 1e-12:
            trial = prob.project(w - step * d)
            tval = prob.reduced(trial)
            if tval < value:
                break
            step *= 0.5
        else:
            # no descent at rounding level although the gradient is above gtol
            break
        w, value = trial, tval
        history.append(value)
    else:
        d = prob.riesz_gradient(w)
        gnorm = prob.a_norm(d) / prob.a_norm(w)
        converged = gnorm < gtol
    return MinimizerResult(
        value=value,
        field=sp.to_field(w),
        converged=converged,
        iterations=it,
        gradient_norm=gnorm,
        nehari_residual=prob.nehari(w),
        lp=prob.lp(w),
        history=history,
    )


def aligned_distance(u: PiecewiseField, ref: PiecewiseField) -> float:
    """H1tau distance between u and ref after the better of the signs +1, -1."""
    return min(h1tau_norm(u - ref), h1tau_norm(u + ref))
