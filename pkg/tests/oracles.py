"""Independent reference computations used by the tests.

Nothing here imports the package's closed forms: the matching system is
solved by a damped 2D Newton iteration from a grid of starts, and norms are
computed by adaptive quadrature of the soliton profile in x.
"""
import math

import numpy as np
from scipy.integrate import quad


def matching_system(T, tau, v, mu, omega):
    """Residual of the line and hyperbola equations in (T_-, T_+)."""
    tm, tp = T
    q = tau ** (2 * mu)
    line = tp - (tm + v / math.sqrt(omega)) / tau**2
    hyper = tm**2 / (1 - 1 / q) - tp**2 / (q - 1) - 1
    return np.array([line, hyper])


def _jacobian(T, tau, mu):
    tm, tp = T
    q = tau ** (2 * mu)
    return np.array([[-1 / tau**2, 1.0],
                     [2 * tm / (1 - 1 / q), -2 * tp / (q - 1)]])


def newton_roots(tau, v, mu, omega, starts=4, tol=1e-14, max_iter=200):
    """All roots in the open unit square, from a starts x starts grid of initial points.

    Returns a list of (T_-, T_+) sorted by T_+ - T_- descending, so the root
    with positive T_+ - T_- (the ground state) comes first.
    """
    g = np.linspace(-1, 1, starts + 2)[1:-1]
    roots = []
    for a in g:
        for b in g:
            T = np.array([a, b], dtype=float)
            for _ in range(max_iter):
                F = matching_system(T, tau, v, mu, omega)
                try:
                    step = np.linalg.solve(_jacobian(T, tau, mu), F)
                except np.linalg.LinAlgError:
                    break
                lam = 1.0
                f0 = np.linalg.norm(F)
                # damping: halve until the residual does not grow
                while lam > 1e-8:
                    trial = T - lam * step
                    if np.linalg.norm(matching_system(trial, tau, v, mu, omega)) <= f0 or f0 < 1e-13:
                        break
                    lam *= 0.5
                T = trial
                if np.max(np.abs(lam * step)) < tol:
                    break
            if np.all(np.abs(T) < 1) and np.linalg.norm(matching_system(T, tau, v, mu, omega)) < 1e-11:
                if not any(np.max(np.abs(T - r)) < 1e-8 for r in roots):
                    roots.append(T)
    roots.sort(key=lambda r: -(r[1] - r[0]))
    return [tuple(map(float, r)) for r in roots]


def _profile(omega, mu, s):
    z = abs(mu * math.sqrt(omega) * s)
    log_cosh = z + math.log1p(math.exp(-2 * z)) - math.log(2)
    return (omega * (mu + 1)) ** (0.5 / mu) * math.exp(-log_cosh / mu)


def _slope(omega, mu, s):
    z = mu * math.sqrt(omega) * s
    return -math.sqrt(omega) * math.tanh(z) * _profile(omega, mu, s)


def quadrature_norms(T_minus, T_plus, omega, mu):
    """(kinetic, mass2, lp, defect) of phi(x + x_-) on x<0, phi(x + x_+) on x>0 by adaptive quadrature."""
    c = mu * math.sqrt(omega)
    xm, xp = math.atanh(T_minus) / c, math.atanh(T_plus) / c
    pw = 2 * mu + 2
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=400)

    def both(f):
        # integrate in the soliton variable s = x + shift
        left = quad(f, -np.inf, xm, **opts)[0]
        right = quad(f, xp, np.inf, **opts)[0]
        return left + right

    kinetic = both(lambda s: _slope(omega, mu, s) ** 2)
    mass2 = both(lambda s: _profile(omega, mu, s) ** 2)
    lp = both(lambda s: _profile(omega, mu, s) ** pw)
    defect = _profile(omega, mu, xm) ** 2
    return kinetic, mass2, lp, defect
