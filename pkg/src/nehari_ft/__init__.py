"""Ground states of the focusing NLS with a Fulop-Tsutsui point defect.

Closed-form stationary branches, their functionals, a variational check,
spectral and mass-curve stability criteria, and time evolution.
"""
__version__ = "0.1.0"

from .core import DefectParams, HalfLineGrid, PiecewiseField, h1tau_inner, h1tau_norm, vertex_residual
from .closedform import Branch, branch_hat, branch_tilde, branches, build_stationary, regime
from .functionals import FunctionalReport, closed_form_report, evaluate
from .groundstate import identify, variational_minimize
from .stability import gss_verdict, mass, phi
from .errors import NehariFTError

__all__ = [
    "DefectParams", "HalfLineGrid", "PiecewiseField", "h1tau_inner", "h1tau_norm",
    "vertex_residual", "Branch", "branch_tilde", "branch_hat", "branches",
    "build_stationary", "regime", "FunctionalReport", "closed_form_report", "evaluate",
    "identify", "variational_minimize", "gss_verdict", "mass", "phi", "NehariFTError",
]
