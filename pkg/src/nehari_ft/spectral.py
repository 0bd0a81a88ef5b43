"""Linearized operators L1, L2 around the ground state and their low spectrum.

L1 a = -a'' + omega a - (2mu+1)|u|^(2mu) a and L2 b = -b'' + omega b - |u|^(2mu) b,
both with the Fulop-Tsutsui vertex conditions, discretized by finite
differences with Dirichlet ends at +-L.

Unknowns are the interior nodes of each half-line (N-1 per side). The two
interface samples are eliminated: u(0+) = tau u(0-), and the flux condition,
written with third-order one-sided derivative stencils, expresses u(0-)
through three neighbours on each side. The elimination makes the matrix
non-symmetric, so a general sparse shift-invert eigensolver is used.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigs

from .closedform import branch_tilde, build_stationary, kernel_obstruction
from .core import DefectParams, HalfLineGrid, PiecewiseField, trapezoid
from .discrete import ReducedSpace
from .errors import DiscretizationError, EigenSolverError

# third-order one-sided first derivative, coefficients on f(0), f(h), f(2h), f(3h) times 1/(6h)
_D3 = np.array([-11.0, 18.0, -9.0, 2.0])


class OperatorKind(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"


@dataclass(eq=False)
class LinearizedOperator:
    kind: OperatorKind
    matrix: sparse.csc_matrix
    potential_minus: np.ndarray   # on left interior nodes
    potential_plus: np.ndarray    # on right interior nodes
    params: DefectParams
    grid: HalfLineGrid
    ground_state: PiecewiseField
    interface_coeffs: np.ndarray  # u(0-) = coeffs . (a1, a2, a3, b1, b2, b3)

    def sample(self, u: PiecewiseField) -> np.ndarray:
        """Interior-node vector of a field (interface and end samples dropped)."""
        return np.concatenate((u.values_minus[1:-1], u.values_plus[1:-1]))

    def to_field(self, vec) -> PiecewiseField:
        """Rebuild a full field: zeros at +-L, u(0-) from the elimination, u(0+) = tau u(0-)."""
        N = self.grid.N
        vec = np.asarray(vec)
        left, right = vec[: N - 1], vec[N - 1:]
        nb = np.array([left[-1], left[-2], left[-3], right[0], right[1], right[2]])
        u0m = self.interface_coeffs @ nb
        zero = np.zeros(1, dtype=vec.dtype)
        vm = np.concatenate((zero, left, [u0m]))
        vp = np.concatenate(([self.params.tau * u0m], right, zero))
        return PiecewiseField(self.grid, vm, vp)

    def apply(self, u: PiecewiseField) -> np.ndarray:
        return self.matrix @ self.sample(u)

    def quadratic_form(self, phi) -> float:
        """(L phi, phi) in weak form: ||phi'||^2 - v|phi(0-)|^2 + int (omega - V)|phi|^2.

        ``phi`` is a field or an interior vector. The boundary term of the
        integration by parts is exactly -v|phi(0-)|^2 under the vertex
        conditions; the forms are evaluated on the piecewise-linear
        interpolant, which is second order accurate.
        """
        if not isinstance(phi, PiecewiseField):
            phi = self.to_field(phi)
        space = ReducedSpace(self.grid, self.params.tau)
        w = space.restrict(phi)
        factor = 2 * self.params.mu + 1 if self.kind is OperatorKind.L1 else 1.0
        pot = 0.0
        # V jumps across the defect, so weight each half-line separately
        for f, u in ((phi.values_minus, self.ground_state.values_minus),
                     (phi.values_plus, self.ground_state.values_plus)):
            V = factor * np.abs(u) ** (2 * self.params.mu)
            pot += trapezoid((self.params.omega - V) * np.abs(f) ** 2, self.grid.h)
        return space.kinetic(w) - self.params.v * space.defect(w) + pot


def build_operator(kind, p: DefectParams, grid: HalfLineGrid) -> LinearizedOperator:
    kind = OperatorKind(kind)
    b = branch_tilde(p)
    u = build_stationary(b, grid)
    N, h = grid.N, grid.h
    if h * p.mu * math.sqrt(p.omega) > 0.25:
        raise DiscretizationError(
            f"grid spacing h={h:g} does not resolve the soliton width 1/(mu sqrt(omega))"
        )
    power = 2 * p.mu
    factor = 2 * p.mu + 1 if kind is OperatorKind.L1 else 1.0
    pot_m = factor * np.abs(u.values_minus[1:-1]) ** power
    pot_p = factor * np.abs(u.values_plus[1:-1]) ** power

    tau, v = p.tau, p.v
    den = -_D3[0] * (1 + tau**2) - 6.0 * h * v
    if abs(den) < 1e-8:
        raise DiscretizationError("interface elimination is singular for this grid")
    # u(0-) * den = 18 a1 - 9 a2 + 2 a3 + tau (18 b1 - 9 b2 + 2 b3)
    coeffs = np.concatenate((_D3[1:], tau * _D3[1:])) / den

    n = 2 * (N - 1)
    ih2 = 1.0 / h**2
    diag = np.concatenate((2 * ih2 + p.omega - pot_m, 2 * ih2 + p.omega - pot_p))
    off = np.full(n - 1, -ih2)
    off[N - 2] = 0.0  # no direct coupling across the defect
    A = sparse.diags([off, diag, off], [-1, 0, 1], shape=(n, n), format="lil")

    # neighbour indices feeding u(0-): a1, a2, a3 (left), b1, b2, b3 (right)
    nb_idx = [N - 2, N - 3, N - 4, N - 1, N, N + 1]
    for row, weight in ((N - 2, 1.0), (N - 1, tau)):
        # row N-2 is x = -h (uses u(0-)); row N-1 is x = +h (uses u(0+) = tau u(0-))
        for j, c in zip(nb_idx, coeffs):
            A[row, j] += -ih2 * weight * c
    return LinearizedOperator(kind, A.tocsc(), pot_m, pot_p, p, grid, u, coeffs)


@dataclass
class SpectralReport:
    kind: OperatorKind
    n_negative: int
    lambda_min: float
    lambda_kernel: float
    kernel_vector_residual: Optional[float]
    n_kernel: int
    zero_tol: float
    eigenvalues: np.ndarray
    max_imag: float


def _eigs_near(A, sigma, k):
    try:
        vals, vecs = eigs(A, k=k, sigma=sigma, which="LM", tol=1e-12, maxiter=5000)
    except ArpackNoConvergence as exc:
        raise EigenSolverError(
            f"shift-invert iteration did not converge at shift {sigma:g}", iterations=5000
        ) from exc
    except ArpackError as exc:
        raise EigenSolverError(f"eigensolver failure at shift {sigma:g}: {exc}") from exc
    return vals, vecs


def spectrum_lower_bound(op: LinearizedOperator) -> float:
    """Safe lower bound: omega - omega* - max potential, with a 10% margin."""
    p = op.params
    vmax = max(op.potential_minus.max(), op.potential_plus.max())
    return p.omega - 1.1 * (p.omega_star + vmax) - 0.1 * p.omega


def spectral_report(op: LinearizedOperator, k: int = 10) -> SpectralReport:
    """Lowest eigenvalues via shift-invert at -2 omega and 0, plus gap-filling shifts.

    Shifts are added until the disks {|lambda - sigma| < r} of the returned
    eigenpairs cover [lower bound, zero tolerance], so the negative count is
    complete rather than a guess.
    """
    p, h = op.params, op.grid.h
    A = op.matrix
    zero_tol = 10.0 * h**2 * p.omega
    lo, hi = spectrum_lower_bound(op), zero_tol
    k = min(k, A.shape[0] - 2)

    found_vals, found_vecs, disks = [], [], []
    shifts = [-2.0 * p.omega, 0.0]
    for _ in range(40):
        if not shifts:
            gap = _first_gap(disks, lo, hi)
            if gap is None:
                break
            shifts.append(gap)
        sigma = shifts.pop(0)
        vals, vecs = _eigs_near(A, sigma, k)
        radius = np.max(np.abs(vals - sigma))
        disks.append((sigma - radius, sigma + radius))
        for i, lam in enumerate(vals):
            if not any(abs(lam - m) <= 1e-8 * max(1.0, abs(m)) for m in found_vals):
                found_vals.append(lam)
                found_vecs.append(vecs[:, i])
    else:
        raise EigenSolverError("could not certify the low spectrum", iterations=40)

    vals = np.array(found_vals)
    order = np.argsort(vals.real)
    vals = vals[order]
    vecs = [found_vecs[i] for i in order]
    real = vals.real
    i0 = int(np.argmin(np.abs(real)))
    residual = None
    if op.kind is OperatorKind.L2:
        kv = np.real_if_close(vecs[i0] / vecs[i0][np.argmax(np.abs(vecs[i0]))])
        residual = _sine_angle(np.real(kv), op.sample(op.ground_state))
    return SpectralReport(
        kind=op.kind,
        n_negative=int(np.sum(real < -zero_tol)),
        lambda_min=float(real[0]),
        lambda_kernel=float(real[i0]),
        kernel_vector_residual=residual,
        n_kernel=int(np.sum(np.abs(real) <= zero_tol)),
        zero_tol=zero_tol,
        eigenvalues=real,
        max_imag=float(np.max(np.abs(vals.imag))),
    )


def _first_gap(disks, lo, hi):
    """Midpoint of the first part of [lo, hi] not covered by the disks, or None."""
    pos = lo
    for a, b in sorted(disks):
        if a > pos:
            break
        pos = max(pos, b)
        if pos >= hi:
            return None
    if pos >= hi:
        return None
    nxt = min([a for a, _ in disks if a > pos] + [hi])
    return 0.5 * (pos + nxt)


def _sine_angle(a, b) -> float:
    cos = abs(np.dot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(math.sqrt(max(0.0, 1.0 - cos * cos)))


def kernel_obstruction_check(p: DefectParams) -> float:
    """Right-hand side T_-^2 would have to equal for L1 to have a kernel; always negative."""
    return kernel_obstruction(p.tau, p.mu)


def _counts(r: SpectralReport):
    return r.n_negative, r.n_kernel


def gss_spectral_conditions(p: DefectParams, grid: HalfLineGrid, refine: bool = True):
    """(ok, L1 report, L2 report): ok iff L2 >= 0 with a simple kernel and L1 has one negative eigenvalue.

    With ``refine`` the counts must also agree on the grid with half the
    spacing; coarse grids near omega* can transiently report extra eigenvalues.
    """
    r1 = spectral_report(build_operator(OperatorKind.L1, p, grid))
    r2 = spectral_report(build_operator(OperatorKind.L2, p, grid))
    ok = r2.n_negative == 0 and r2.n_kernel == 1 and r1.n_negative == 1 and r1.n_kernel == 0
    if refine:
        fine = grid.refined(2)
        f1 = spectral_report(build_operator(OperatorKind.L1, p, fine))
        f2 = spectral_report(build_operator(OperatorKind.L2, p, fine))
        ok = ok and _counts(f1) == _counts(r1) and _counts(f2) == _counts(r2)
    return ok, r1, r2
