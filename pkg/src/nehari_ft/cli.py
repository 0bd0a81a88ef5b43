"""Command-line entry point: nehari-ft <subcommand> [flags].

Every subcommand writes one table (CSV with a leading config comment, or
JSON) to --output or stdout. Exit codes: 0 success, 2 invalid parameters,
3 numerical failure; errors go to stderr as a JSON record.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .closedform import branches, build_stationary
from .core import DefectParams, HalfLineGrid, default_half_width, suggest_grid
from .dynamics import EvolutionConfig, evolve, perturbed_state
from .errors import ConfigurationError, InvalidParameterError, NehariFTError
from .functionals import closed_form_report
from .groundstate import identify, variational_minimize
from .spectral import build_operator, spectral_report
from .stability import BIFURCATION_COLUMNS, MASSCURVE_COLUMNS, bifurcation_sweep, mass_curve

log = logging.getLogger("nehari_ft")

# option name -> (type, default); defaults are applied after merging the config file
OPTIONS = {
    "tau": (float, 2.0),
    "v": (float, 1.0),
    "mu": (float, 1.0),
    "omega": (float, 1.0),
    "grid_L": (float, None),
    "grid_N": (int, None),
    "dt": (float, 1e-3),
    "t_final": (float, None),
    "omega_min": (float, 0.01),
    "omega_max": (float, 2.0),
    "omega_steps": (int, 200),
    "log_omega": (bool, False),
    "output": (str, "-"),
    "format": (str, "csv"),
    "seed": (int, 0),
    "perturbation": (float, 0.01),
    "stride": (int, 100),
    "variational": (bool, False),
    "threads": (int, None),
}

STATIONARY_COLUMNS = ("branch", "T_minus", "T_plus", "x_minus", "x_plus",
                      "mass", "lp", "kinetic", "defect", "energy", "reduced", "nehari")
SPECTRAL_COLUMNS = ("operator", "index", "eigenvalue")
TRAJECTORY_COLUMNS = ("t", "mass_drift", "energy_drift", "orbital_distance")
GROUNDSTATE_COLUMNS = ("omega", "winner", "d_omega", "s_reduced_tilde", "s_reduced_hat",
                       "variational_value", "variational_converged")


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def render(rows, columns, config, fmt) -> str:
    if fmt == "json":
        doc = {"version": __version__, "config": config,
               "rows": [{c: _jsonable(r.get(c)) for c in columns} for r in rows]}
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# nehari_ft {__version__} config={json.dumps(config, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def read_config_file(path) -> dict:
    """key = value lines; '#' starts a comment; keys may use '-' or '_'."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{n}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ConfigurationError(f"{path}:{n}: unknown key {key!r}")
        typ = OPTIONS[key][0]
        try:
            if typ is bool:
                out[key] = val.lower() in ("1", "true", "yes", "on")
            else:
                out[key] = typ(val)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{n}: bad value for {key}: {val!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nehari-ft", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"nehari_ft {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p, omega=True):
        p.add_argument("--tau", type=float)
        p.add_argument("--v", type=float)
        p.add_argument("--mu", type=float)
        if omega:
            p.add_argument("--omega", type=float)
        p.add_argument("--output", "-o", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--config", help="file of 'key = value' lines; flags win")
        p.add_argument("--verbose", "-v", action="store_true", dest="verbose")

    def grid_opts(p):
        p.add_argument("--grid-L", type=float, dest="grid_L")
        p.add_argument("--grid-N", type=int, dest="grid_N")

    def sweep_opts(p):
        p.add_argument("--omega-min", type=float)
        p.add_argument("--omega-max", type=float)
        p.add_argument("--omega-steps", type=int)
        p.add_argument("--log-omega", action="store_const", const=True)
        p.add_argument("--threads", type=int, help="worker threads (default NEHARI_FT_THREADS)")

    p = sub.add_parser("stationary", help="closed-form branches at one omega")
    common(p)
    p = sub.add_parser("bifurcation", help="branch table over an omega grid")
    common(p, omega=False)
    sweep_opts(p)
    p = sub.add_parser("mass-curve", help="M(omega), M'(omega), phi and the verdict")
    common(p, omega=False)
    sweep_opts(p)
    p = sub.add_parser("spectral", help="low eigenvalues of L1 and L2")
    common(p)
    grid_opts(p)
    p = sub.add_parser("ground-state", help="identify the ground state")
    common(p)
    grid_opts(p)
    p.add_argument("--variational", action="store_const", const=True,
                   help="also run the Nehari minimizer from random data")
    p.add_argument("--seed", type=int)
    p = sub.add_parser("evolve", help="perturbed ground-state evolution")
    common(p)
    grid_opts(p)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-final", type=float, dest="t_final")
    p.add_argument("--perturbation", type=float, help="relative size of the random perturbation")
    p.add_argument("--seed", type=int)
    p.add_argument("--stride", type=int, help="steps between snapshots")
    return ap


def merge_config(args) -> dict:
    cfg = read_config_file(args.config) if getattr(args, "config", None) else {}
    out = {}
    for key, (_, default) in OPTIONS.items():
        if not hasattr(args, key):
            continue
        val = getattr(args, key)
        if val is None:
            val = cfg.get(key, default)
        out[key] = val
    return out


def _params(c) -> DefectParams:
    return DefectParams(c["tau"], c["v"], c["mu"], c.get("omega", 1.0))


def _grid(c, p: DefectParams, shifts=()) -> HalfLineGrid:
    if c.get("grid_L") is None and c.get("grid_N") is None:
        return suggest_grid(p, shifts)
    L = c["grid_L"] if c.get("grid_L") is not None else default_half_width(p.omega, p.mu)
    N = c["grid_N"] if c.get("grid_N") is not None else int(round(L / 0.01))
    return HalfLineGrid(L, N)


def _omega_grid(c):
    lo, hi, n = c["omega_min"], c["omega_max"], c["omega_steps"]
    if not (0 < lo < hi) or n < 2:
        raise InvalidParameterError("need 0 < omega-min < omega-max and omega-steps >= 2")
    return np.geomspace(lo, hi, n) if c["log_omega"] else np.linspace(lo, hi, n)


def cmd_stationary(c):
    p = _params(c)
    bs = branches(p)
    if not bs:
        from .errors import NoSolutionError

        raise NoSolutionError("no stationary state", p.omega, p.omega_star, p.omega_dstar)
    rows = []
    for b in bs:
        r = closed_form_report(b)
        rows.append(dict(branch=b.label.value, T_minus=b.T_minus, T_plus=b.T_plus,
                         x_minus=b.x_minus, x_plus=b.x_plus, mass=r.mass2, lp=r.lp,
                         kinetic=r.kinetic, defect=r.defect, energy=r.energy,
                         reduced=r.reduced, nehari=r.nehari))
    return rows, STATIONARY_COLUMNS


def cmd_bifurcation(c):
    p = _params(dict(c, omega=1.0))
    return bifurcation_sweep(p, _omega_grid(c), c.get("threads")), BIFURCATION_COLUMNS


def cmd_mass_curve(c):
    p = _params(dict(c, omega=1.0))
    return mass_curve(p, _omega_grid(c), c.get("threads")), MASSCURVE_COLUMNS


def _tilde_grid(c, p):
    from .closedform import branch_tilde

    b = branch_tilde(p)
    return _grid(c, p, (b.x_minus, b.x_plus)), b


def cmd_spectral(c):
    p = _params(c)
    grid, _ = _tilde_grid(c, p)
    rows = []
    for kind in ("L1", "L2"):
        rep = spectral_report(build_operator(kind, p, grid))
        rows += [dict(operator=kind, index=i, eigenvalue=lam) for i, lam in enumerate(rep.eigenvalues)]
    return rows, SPECTRAL_COLUMNS


def cmd_ground_state(c):
    p = _params(c)
    res = identify(p)
    from .closedform import Branch

    row = dict(omega=p.omega, winner=res.winner.value, d_omega=res.d_omega,
               s_reduced_tilde=res.reports[Branch.TILDE].reduced,
               s_reduced_hat=res.reports[Branch.HAT].reduced if Branch.HAT in res.reports else None)
    if c["variational"]:
        grid, _ = _tilde_grid(c, p)
        m = variational_minimize(p, grid, init="random", seed=c["seed"])
        row.update(variational_value=m.value, variational_converged=m.converged)
    return [row], GROUNDSTATE_COLUMNS


def cmd_evolve(c):
    p = _params(c)
    grid, b = _tilde_grid(c, p)
    U = build_stationary(b, grid)
    t_final = c["t_final"] if c["t_final"] is not None else 50.0 / p.omega
    cfg = EvolutionConfig(dt=c["dt"], t_final=t_final, snapshot_stride=c["stride"])
    u0 = perturbed_state(U, p, c["perturbation"], seed=c["seed"]) if c["perturbation"] else U
    rep = evolve(u0, p, cfg, reference=U)
    if rep.blowup:
        log.warning("run stopped by blow-up at t=%g", rep.blowup_time)
    rows = [dict(t=t, mass_drift=m, energy_drift=e, orbital_distance=d)
            for t, m, e, d in zip(rep.times, rep.mass_drift, rep.energy_drift, rep.orbital_distance)]
    return rows, TRAJECTORY_COLUMNS


COMMANDS = {
    "stationary": cmd_stationary,
    "bifurcation": cmd_bifurcation,
    "mass-curve": cmd_mass_curve,
    "spectral": cmd_spectral,
    "ground-state": cmd_ground_state,
    "evolve": cmd_evolve,
}


def _fail(exc, code):
    payload = exc.payload() if isinstance(exc, NehariFTError) else {
        "error": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        c = merge_config(args)
        if c["format"] not in ("csv", "json"):
            raise ConfigurationError(f"unknown format {c['format']!r}")
        rows, columns = COMMANDS[args.subcommand](c)
    except (InvalidParameterError, ConfigurationError) as exc:
        return _fail(exc, 2)
    except NehariFTError as exc:
        return _fail(exc, 3)
    config = dict(c, subcommand=args.subcommand)
    text = render(rows, columns, config, c["format"])
    if c["output"] in ("-", None):
        sys.stdout.write(text)
    else:
        with open(c["output"], "w", newline="") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
