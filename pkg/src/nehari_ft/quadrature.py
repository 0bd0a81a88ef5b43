"""Integrals of (1 - t^2)^p over sub-intervals of [-1, 1].

For p in (-1, 0) the integrand has integrable endpoint singularities. The
antiderivative is an incomplete beta function after t = 2s - 1, which
handles every p > -1 uniformly without endpoint-weighted quadrature rules.
"""
import numpy as np
from scipy.special import beta, betainc


def full_t_integral(p):
    """int_{-1}^{1} (1 - t^2)^p dt = 2^(2p+1) B(p+1, p+1)."""
    if p <= -1:
        raise ValueError(f"(1-t^2)^{p} is not integrable on [-1, 1]")
    return 2.0 ** (2 * p + 1) * beta(p + 1, p + 1)


def _primitive(t, p):
    # int_{-1}^{t}; symmetric form keeps precision for t near +1
    t = np.clip(t, -1.0, 1.0)
    half = 0.5 * full_t_integral(p)
    tail = full_t_integral(p) * betainc(p + 1, p + 1, (1.0 - np.abs(t)) / 2.0)
    return np.where(t >= 0, 2.0 * half - tail, tail)


def t_integral(a, b, p):
    """int_a^b (1 - t^2)^p dt for -1 <= a, b <= 1 and p > -1 (signed)."""
    if p <= -1:
        raise ValueError(f"(1-t^2)^{p} is not integrable on [-1, 1]")
    if p == 0:
        return np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    return _primitive(b, p) - _primitive(a, p)
