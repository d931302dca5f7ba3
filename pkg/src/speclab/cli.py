"""Command-line front end: ``speclab <command> [options]``.

Each command reads a :class:`RunConfig` built from an optional JSON config
file overridden by flags, writes its artifacts atomically into ``--out``
and prints a one-line JSON summary. Exit status is 0 on success, 2 for a
configuration error and 3 for a numerical failure.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import damping_opt, eigensolver, geometry, perturbation, schrodinger_check, spectral_props
from .errors import (
    BudgetError,
    ConvergenceError,
    DeformationError,
    GeometryError,
    InvalidParameterError,
    NumericalError,
    PairingError,
    PreconditionError,
    SimplicityError,
    SpecLabError,
    ValidityError,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

COMMANDS = (
    "spectrum", "converge", "deform", "track", "check-simplicity", "check-independence",
    "check-resonance", "shape-derivative", "potential-derivative", "optimize-damping",
    "decay-rate", "schrodinger-check",
)

# flags that belong to the solver block of a RunConfig; everything else is a command parameter
SOLVER_KEYS = ("h", "n", "solver", "gap_tol", "residual_tol", "cells", "quad_order")


class ConfigError(SpecLabError):
    pass


@dataclass
class RunConfig:
    command: str
    domain: dict | None = None
    solver: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str = "."
    threads: int | None = None
    timestamp: bool = True

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for key in ("h", "gap_tol", "residual_tol"):
            v = self.solver.get(key)
            if v is not None and not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"solver.{key} must be a positive number")
        if self.solver.get("n") is not None and int(self.solver["n"]) < 1:
            raise ConfigError("solver.n must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {"command", "domain", "solver", "params", "seed", "out", "threads", "timestamp"}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "command" not in doc:
            raise ConfigError("config needs a command")
        return cls(**doc)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def parse_domain(text: str) -> dict:
    """Domain shorthand or JSON.

    ``orthotope:1,0.8409``, ``square``, ``canonical`` (the rectangle with
    ``mu = (1, 2^{-1/4})`` and exact side data), ``disk:R``, ``ellipse:a,b``,
    ``polygon:x,y;x,y;...``, an inline JSON object or ``@file.json``.
    """
    text = text.strip()
    if text.startswith("@"):
        return json.loads(Path(text[1:]).read_text())
    if text.startswith("{"):
        return json.loads(text)
    kind, _, rest = text.partition(":")
    if kind == "orthotope":
        return {"type": "orthotope", "mu": _floats(rest)}
    if kind == "square":
        return {"type": "orthotope", "mu": [1.0, 1.0]}
    if kind == "canonical":
        return geometry.domain_to_dict(geometry.canonical_rectangle())
    if kind == "disk":
        return {"type": "disk", "radius": float(rest or 1.0)}
    if kind == "ellipse":
        return {"type": "mapped_ball", "map": "ellipse", "axes": _floats(rest)}
    if kind == "polygon":
        pts = [_floats(p) for p in rest.split(";") if p.strip()]
        return {"type": "polygon", "vertices": pts}
    raise ConfigError(f"cannot parse domain {text!r}")


def build_domain(doc: dict):
    if doc is None:
        raise ConfigError("a domain is required (--domain)")
    if doc.get("type") == "disk":
        return geometry.Disk(float(doc.get("radius", 1.0)))
    return geometry.domain_from_dict(doc)


def parse_potential(text, d: int):
    """Potential shorthand: a number, ``x1`` .. ``xd``, inline JSON or ``@file.json``."""
    if isinstance(text, dict):
        return schrodinger_check.potential_from_dict(text)
    if isinstance(text, (int, float)):
        return schrodinger_check.PolynomialPotential.constant(float(text), d)
    text = str(text).strip()
    if text.startswith("@"):
        return schrodinger_check.potential_from_dict(json.loads(Path(text[1:]).read_text()))
    if text.startswith("{"):
        return schrodinger_check.potential_from_dict(json.loads(text))
    if text.startswith("x") and text[1:].isdigit():
        axis = int(text[1:]) - 1
        if not 0 <= axis < d:
            raise ConfigError(f"coordinate {text} out of range for dimension {d}")
        return schrodinger_check.PolynomialPotential.coordinate(axis, d)
    try:
        return schrodinger_check.PolynomialPotential.constant(float(text), d)
    except ValueError as exc:
        raise ConfigError(f"cannot parse potential {text!r}") from exc


def parse_mode(text):
    """``3`` (1-based index) or ``1,2`` (multi-index)."""
    if isinstance(text, (list, tuple)):
        return tuple(int(k) for k in text)
    if isinstance(text, int):
        return text
    text = str(text)
    if "," in text:
        return tuple(int(k) for k in text.split(","))
    return int(text)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc) -> str:
    """Deterministic JSON; floats use the shortest repr that round-trips exactly."""
    return json.dumps(doc, sort_keys=True, indent=2, default=_json_default, allow_nan=True) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Run:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.files: list[str] = []
        self.summary: dict = {}

    def emit(self, name: str, doc: dict) -> None:
        body = {"command": self.cfg.command, "seed": self.cfg.seed, "config": self.cfg.to_dict(), "result": doc}
        if self.cfg.timestamp:
            body["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        write_atomic(self.out / name, dumps(body))
        self.files.append(str(self.out / name))

    def emit_text(self, name: str, text: str) -> None:
        write_atomic(self.out / name, text)
        self.files.append(str(self.out / name))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _threads(cfg: RunConfig) -> int:
    if cfg.threads:
        return int(cfg.threads)
    env = os.environ.get("SPECLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"SPECLAB_THREADS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def _system(cfg: RunConfig, n: int | None = None):
    dom = build_domain(cfg.domain)
    n = int(n or cfg.solver.get("n", 6))
    solver = cfg.solver.get("solver", "auto")
    if isinstance(dom, geometry.Orthotope) and solver in ("auto", "closed"):
        kw = {}
        if cfg.solver.get("cells"):
            kw["cells"] = int(cfg.solver["cells"])
        if cfg.solver.get("quad_order"):
            kw["quad_order"] = int(cfg.solver["quad_order"])
        return eigensolver.orthotope_spectrum(dom, n, **kw)
    if solver == "closed":
        raise ConfigError("closed-form solver needs an orthotope")
    mesh = geometry.mesh_domain(dom, float(cfg.solver.get("h", 0.05)))
    return eigensolver.fem_spectrum(mesh, n, gap_tol=float(cfg.solver.get("gap_tol", eigensolver.GAP_TOL)))


def cmd_spectrum(run: Run) -> None:
    sys_ = _system(run.cfg)
    run.emit("spectrum.json", sys_.to_dict())
    run.emit_text("spectrum.csv", sys_.to_csv())
    run.summary = {"lambdas": sys_.lambdas.tolist()}


def cmd_converge(run: Run) -> None:
    dom = build_domain(run.cfg.domain)
    h_list = run.cfg.params.get("h_list") or [0.2, 0.1, 0.05]
    n = int(run.cfg.solver.get("n", 4 if isinstance(dom, geometry.Orthotope) else 1))
    table = eigensolver.convergence_study(dom, h_list, n)
    doc = {"h": table.h, "mesh_h": table.mesh_h, "lambda_errors": table.lambda_errors,
           "eigenfunction_errors": table.eigenfunction_errors, "orders": table.orders}
    run.emit("convergence.json", doc)
    run.emit_text("convergence.csv", table.to_csv())
    run.summary = {"orders": table.orders.tolist()}


def _field(params: dict) -> geometry.VectorField2D:
    kind = params.get("field", "squashing")
    if kind == "squashing":
        return geometry.squashing_field(float(params.get("rho", 4.0)))
    if kind == "stretch":
        return geometry.stretch_field(int(params.get("axis", 1)), float(params.get("rate", 1.0)))
    raise ConfigError(f"unknown vector field {kind!r}")


def cmd_deform(run: Run) -> None:
    dom = build_domain(run.cfg.domain)
    mesh = geometry.mesh_domain(dom, float(run.cfg.solver.get("h", 0.05)))
    t = float(run.cfg.params.get("t", 0.1))
    moved = geometry.flow_deform(mesh, _field(run.cfg.params), t)
    n = run.cfg.solver.get("n")
    doc = {"t": t, "field": run.cfg.params.get("field", "squashing"), "mesh": moved.to_dict(),
           "fingerprint": moved.fingerprint(), "area": moved.area}
    if n:
        doc["lambdas"] = eigensolver.fem_spectrum(moved, int(n)).lambdas
    run.emit("deform.json", doc)
    run.summary = {"area": moved.area, "fingerprint": moved.fingerprint()}


def cmd_track(run: Run) -> None:
    p = run.cfg.params
    n = int(run.cfg.solver.get("n", 4))
    h = float(run.cfg.solver.get("h", 0.05))
    steps = int(p.get("steps", 100))
    if p.get("mu0") is not None:
        path = perturbation.rectangle_family_path(p["mu0"], p["mu1"], steps, h)
    else:
        mesh = geometry.mesh_domain(build_domain(run.cfg.domain), h)
        t_grid = np.linspace(0.0, float(p.get("t_max", 0.5)), steps + 1)
        path = geometry.flow_path(mesh, _field(p), t_grid)
    ep = perturbation.track_path(path, n)
    run.emit("track.json", ep.to_dict())
    run.emit_text("track.csv", ep.to_csv())
    run.summary = {"crossings": [e.to_dict() for e in ep.crossings()]}


def cmd_check_simplicity(run: Run) -> None:
    sys_ = _system(run.cfg)
    rep = spectral_props.check_simplicity(sys_, float(run.cfg.solver.get("gap_tol", 1e-6)))
    run.emit("simplicity.json", rep.to_dict())
    run.summary = {"verdict": rep.verdict, "witness": rep.witness}


def cmd_check_independence(run: Run) -> None:
    sys_ = _system(run.cfg)
    trials = int(run.cfg.params.get("trials", 200))
    rep = spectral_props.squared_independence_search(sys_, trials, seed=run.cfg.seed)
    gram = spectral_props.squared_gram(sys_)
    doc = {"search": rep.to_dict(), "gram_min_eigenvalue": gram.min_eigenvalue,
           "gram_quadrature_error": gram.quadrature_error, "gram": gram.matrix}
    run.emit("independence.json", doc)
    run.summary = {"verdict": rep.verdict, "gram_min_eigenvalue": gram.min_eigenvalue}


def cmd_check_resonance(run: Run) -> None:
    p = run.cfg.params
    H = int(p.get("height", 10))
    if p.get("values") is not None:
        lam = [float(x) for x in p["values"]]
        rep = spectral_props.nonresonance_search(lam, H, float(run.cfg.solver.get("residual_tol", spectral_props.RESIDUAL_TOL)),
                                                 workers=_threads(run.cfg), lll=bool(p.get("lll", False)))
    else:
        sys_ = _system(run.cfg)
        if p.get("exact") and sys_.is_closed_form and sys_.modes[0].lam_exact is not None:
            rep = spectral_props.exact_nonresonance(sys_, H)
        else:
            rep = spectral_props.nonresonance_search(
                sys_.lambdas, H, float(run.cfg.solver.get("residual_tol", spectral_props.RESIDUAL_TOL)),
                workers=_threads(run.cfg), lll=bool(p.get("lll", False)))
    run.emit("resonance.json", rep.to_dict())
    run.summary = {"verdict": rep.verdict, "witness": rep.witness, "relations": len(rep.relations)}


def cmd_shape_derivative(run: Run) -> None:
    p = run.cfg.params
    dom = build_domain(run.cfg.domain)
    if not isinstance(dom, geometry.Orthotope):
        raise ConfigError("shape-derivative needs an orthotope domain")
    mode = parse_mode(p.get("mode", 1))
    axis = int(p.get("axis", dom.d - 1))
    speed = float(p.get("speed", 1.0))
    sys_ = eigensolver.orthotope_spectrum(dom, int(run.cfg.solver.get("n", 6)))
    pert = perturbation.orthotope_face(sys_.domain, speed, axis=axis, side=1)
    value = perturbation.hadamard_derivative(sys_, pert, mode)
    doc = {"mode": mode, "axis": axis, "speed": speed, "hadamard": value}
    if p.get("dt") is not None:
        mesh = geometry.mesh_domain(dom, float(run.cfg.solver.get("h", 0.02)))
        fieldv = geometry.stretch_field(axis, speed / dom.lengths[axis])  # far face moves at `speed`
        chk = perturbation.fd_shape_check(mesh, fieldv, mode, float(p["dt"]), hadamard_sys=sys_, pert=pert)
        doc["fd_check"] = chk.to_dict()
    run.emit("shape_derivative.json", doc)
    run.summary = {"hadamard": value, **({"relative_error": doc["fd_check"]["relative_error"]} if "fd_check" in doc else {})}


def cmd_potential_derivative(run: Run) -> None:
    p = run.cfg.params
    dom = build_domain(run.cfg.domain)
    d = dom.d if isinstance(dom, geometry.Orthotope) else 2
    W = parse_potential(p.get("W", "x1"), d)
    k = int(p.get("k", 1))
    if isinstance(dom, geometry.Orthotope):
        target = dom
    else:
        target = geometry.mesh_domain(dom, float(run.cfg.solver.get("h", 0.05)))
    chk = perturbation.fd_potential_check(target, W, k, float(p.get("d_eps", 1e-4)),
                                          h=float(run.cfg.solver.get("h", 0.05)))
    run.emit("potential_derivative.json", {"k": k, "W": W.to_dict(), **chk.to_dict()})
    run.summary = chk.to_dict()


def _budget(p: dict, sys_) -> float:
    area = float(np.sum(sys_.quadrature.cell_areas))
    if p.get("ell") is not None:
        return float(p["ell"])
    if p.get("fraction") is not None:
        return float(p["fraction"]) * area
    return 0.5 * area


def cmd_optimize_damping(run: Run) -> None:
    p = run.cfg.params
    N = int(p.get("N", 3))
    sys_ = _system(run.cfg, max(N, int(run.cfg.solver.get("n", N))))
    if p.get("sweep"):
        rows = damping_opt.budget_sweep(sys_, [float(x) for x in p["sweep"]], N)
        run.emit_text("damping_sweep.csv", damping_opt.sweep_to_csv(rows))
        run.summary = {"sweep": rows}
        return
    sol = damping_opt.optimize_relaxed(sys_, _budget(p, sys_), N)
    bb = damping_opt.bang_bang_report(sol, float(p.get("eps", damping_opt.BANG_BANG_EPS)))
    doc = sol.to_dict()
    doc["bang_bang"] = bb.to_dict()
    run.emit("damping.json", doc)
    run.summary = {"J": sol.J_value, "duality_gap": sol.duality_gap, "multipliers": sol.multipliers.tolist(),
                   "intermediate_area": bb.intermediate_area}


def cmd_decay_rate(run: Run) -> None:
    p = run.cfg.params
    M = int(p.get("M", 8))
    sys_ = _system(run.cfg, max(M, int(run.cfg.solver.get("n", M))))
    if p.get("density"):
        doc = json.loads(Path(p["density"]).read_text())
        doc = doc.get("result", doc)
        doc = doc.get("density", doc)
        dens = damping_opt.DampingDensity.from_dict(doc)
    else:
        area = float(np.sum(sys_.quadrature.cell_areas))
        dens = damping_opt.DampingDensity.uniform(sys_.quadrature.cell_areas, float(p.get("ell", area)))
    k_damp = float(p.get("k_damp", 0.5))
    rate = damping_opt.modal_decay_rate(sys_, dens, k_damp, M)
    run.emit("decay_rate.json", {"M": M, "k_damp": k_damp, "decay_rate": rate,
                                 "note": "truncated modal approximation"})
    run.summary = {"decay_rate": rate}


def cmd_schrodinger_check(run: Run) -> None:
    p = run.cfg.params
    n = int(p.get("n_modes", run.cfg.solver.get("n", 4)))
    sys_ = _system(run.cfg, n)
    W = parse_potential(p.get("W", "x1"), sys_.dim)
    rep = schrodinger_check.controllability_precheck(sys_, W, n, int(p.get("height", 10)),
                                                     exact=bool(p.get("exact", False)))
    run.emit("schrodinger.json", rep.to_dict())
    run.summary = {"verdict": rep.label, "couplings": rep.couplings.tolist()}


HANDLERS = {
    "spectrum": cmd_spectrum,
    "converge": cmd_converge,
    "deform": cmd_deform,
    "track": cmd_track,
    "check-simplicity": cmd_check_simplicity,
    "check-independence": cmd_check_independence,
    "check-resonance": cmd_check_resonance,
    "shape-derivative": cmd_shape_derivative,
    "potential-derivative": cmd_potential_derivative,
    "optimize-damping": cmd_optimize_damping,
    "decay-rate": cmd_decay_rate,
    "schrodinger-check": cmd_schrodinger_check,
}

CONFIG_ERRORS = (ConfigError, InvalidParameterError, PreconditionError, BudgetError, GeometryError,
                 json.JSONDecodeError, KeyError, FileNotFoundError)
NUMERIC_ERRORS = (NumericalError, ConvergenceError, SimplicityError, PairingError, ValidityError, DeformationError)


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute a configuration; returns the exit status and the stdout summary."""
    r = Run(cfg)
    try:
        HANDLERS[cfg.command](r)
    except NUMERIC_ERRORS as exc:  # checked first: DeformationError is also a GeometryError
        return EXIT_NUMERIC, {"command": cfg.command, "status": "numerical-error",
                              "error": type(exc).__name__, "message": str(exc)}
    except CONFIG_ERRORS as exc:
        return EXIT_CONFIG, {"command": cfg.command, "status": "config-error",
                             "error": type(exc).__name__, "message": str(exc)}
    return EXIT_OK, {"command": cfg.command, "status": "ok", "outputs": r.files, **r.summary}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--domain", help="domain shorthand, inline JSON or @file.json")
    common.add_argument("--h", type=float, help="mesh size")
    common.add_argument("--n", type=int, help="number of eigenpairs")
    common.add_argument("--solver", choices=["auto", "closed", "fem"], help="closed form or FEM for orthotopes")
    common.add_argument("--gap-tol", dest="gap_tol", type=float)
    common.add_argument("--residual-tol", dest="residual_tol", type=float)
    common.add_argument("--cells", type=int, help="quadrature cells per axis (closed form)")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory (default: current directory)")
    common.add_argument("--threads", type=int, help="worker threads (default: SPECLAB_THREADS or CPU count)")
    common.add_argument("--no-timestamp", dest="no_timestamp", action="store_true", default=None)

    p = argparse.ArgumentParser(prog="speclab", description="Dirichlet Laplacian spectra: solvers and property checks.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="eigenvalues and eigenfunctions")
    s = sub.add_parser("converge", parents=[common], help="FEM convergence against a closed form")
    s.add_argument("--h-list", dest="h_list", type=_floats)
    s = sub.add_parser("deform", parents=[common], help="flow a meshed domain along a vector field")
    s.add_argument("--field", choices=["squashing", "stretch"])
    s.add_argument("--rho", type=float)
    s.add_argument("--axis", type=int)
    s.add_argument("--rate", type=float)
    s.add_argument("--t", type=float)
    s = sub.add_parser("track", parents=[common], help="eigenvalue curves along a path")
    s.add_argument("--mu0", type=_floats)
    s.add_argument("--mu1", type=_floats)
    s.add_argument("--steps", type=int)
    s.add_argument("--field", choices=["squashing", "stretch"])
    s.add_argument("--rho", type=float)
    s.add_argument("--t-max", dest="t_max", type=float)
    sub.add_parser("check-simplicity", parents=[common], help="gap check of the first n eigenvalues")
    s = sub.add_parser("check-independence", parents=[common], help="squared-eigenfunction independence")
    s.add_argument("--trials", type=int)
    s = sub.add_parser("check-resonance", parents=[common], help="integer relations among eigenvalues")
    s.add_argument("--height", type=int)
    s.add_argument("--values", type=_floats, help="explicit eigenvalues instead of a domain")
    s.add_argument("--exact", action="store_true", default=None)
    s.add_argument("--lll", action="store_true", default=None)
    s = sub.add_parser("shape-derivative", parents=[common], help="Hadamard derivative on an orthotope face")
    s.add_argument("--mode", help="1-based index or multi-index such as 1,2")
    s.add_argument("--axis", type=int)
    s.add_argument("--speed", type=float)
    s.add_argument("--dt", type=float, help="also run the finite-difference check")
    s = sub.add_parser("potential-derivative", parents=[common], help="derivative in a potential direction")
    s.add_argument("--W")
    s.add_argument("--k", type=int)
    s.add_argument("--d-eps", dest="d_eps", type=float)
    s = sub.add_parser("optimize-damping", parents=[common], help="relaxed damping placement")
    s.add_argument("--ell", type=float)
    s.add_argument("--fraction", type=float, help="budget as a fraction of the area")
    s.add_argument("--N", type=int)
    s.add_argument("--eps", type=float)
    s.add_argument("--sweep", type=_floats)
    s = sub.add_parser("decay-rate", parents=[common], help="modal decay rate of the damped membrane")
    s.add_argument("--k-damp", dest="k_damp", type=float)
    s.add_argument("--M", type=int)
    s.add_argument("--density", help="density JSON (for instance damping.json)")
    s.add_argument("--ell", type=float, help="uniform density of this mass")
    s = sub.add_parser("schrodinger-check", parents=[common], help="controllability precheck")
    s.add_argument("--W")
    s.add_argument("--n-modes", dest="n_modes", type=int)
    s.add_argument("--height", type=int)
    s.add_argument("--exact", action="store_true", default=None)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    doc: dict = {"command": ns.command, "solver": {}, "params": {}}
    if ns.config:
        base = json.loads(Path(ns.config).read_text())
        if base.get("command", ns.command) != ns.command:
            raise ConfigError(f"config file is for {base['command']!r}, not {ns.command!r}")
        doc.update({k: v for k, v in base.items() if k not in ("solver", "params")})
        doc["solver"].update(base.get("solver", {}))
        doc["params"].update(base.get("params", {}))
    values = vars(ns)
    for key, val in values.items():
        if val is None or key in ("command", "config"):
            continue
        if key == "domain":
            doc["domain"] = parse_domain(val)
        elif key == "no_timestamp":
            doc["timestamp"] = not val
        elif key in ("seed", "out", "threads"):
            doc[key] = val
        elif key in SOLVER_KEYS:
            doc["solver"][key] = val
        else:
            doc["params"][key] = val
    return RunConfig.from_dict(doc)


def main(argv: list[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (ConfigError, InvalidParameterError, json.JSONDecodeError, OSError, TypeError) as exc:
        print(json.dumps({"command": ns.command, "status": "config-error", "error": type(exc).__name__,
                          "message": str(exc)}), file=sys.stdout)
        return EXIT_CONFIG
    code, summary = run(cfg)
    print(json.dumps(summary, sort_keys=True, default=_json_default))
    return code


if __name__ == "__main__":
    sys.exit(main())
