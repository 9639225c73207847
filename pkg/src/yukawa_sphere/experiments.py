"""Drivers for the four benchmark experiments behind the CLI subcommands."""

from __future__ import annotations

import math

import numpy as np

from .bie import assemble, condition_and_spectrum, gmres_solve
from .config import EXPRESSIONS, ExperimentConfig
from .errors import ConfigError
from .geometry import BoundaryGeometry
from .postproc import (ManufacturedSolution, TargetSet, default_sources,
                       eval_dlp, exact_solution_eval, scatter_targets)
from .quadrature import alpert16_rule, trapezoid_rule
from .specfun import YukawaDegree, fundamental_solution_batch

__all__ = ["run_solve", "run_convergence", "run_ksweep", "run_curvature"]


def _rule_for(name: str):
    return trapezoid_rule() if name == "trapezoid" else alpert16_rule()


def _manufactured(cfg: ExperimentConfig, deg: YukawaDegree,
                  geometry: BoundaryGeometry) -> ManufacturedSolution:
    bd = cfg.boundary_data
    sources = np.asarray(bd["sources"], float) if "sources" in bd else default_sources(geometry)
    weights = np.asarray(bd.get("weights", np.ones(len(sources))), float)
    return ManufacturedSolution(deg, sources, weights, geometry)


def _boundary_values(cfg: ExperimentConfig, deg: YukawaDegree,
                     geometry: BoundaryGeometry):
    """Right-hand side at the boundary nodes plus the manufactured solution, if any."""
    bd = cfg.boundary_data
    if bd["kind"] == "manufactured":
        ms = _manufactured(cfg, deg, geometry)
        return ms.boundary_data(geometry), ms
    nodes = geometry.all_nodes()
    if bd["kind"] == "constant":
        return np.full(nodes.shape[0], float(bd.get("value", 1.0))), None
    phi = np.arctan2(nodes[:, 1], nodes[:, 0])
    theta = np.arccos(np.clip(nodes[:, 2], -1.0, 1.0))
    return EXPRESSIONS[bd["name"]](phi, theta), None


def _targets(cfg: ExperimentConfig, geometry: BoundaryGeometry,
             seed: int | None = None) -> TargetSet:
    t = cfg.targets
    if t.get("kind", "scattered") == "explicit":
        return TargetSet(np.asarray(t["points"], float),
                         float(t.get("min_distance", 0.2)), geometry)
    return scatter_targets(geometry, int(t.get("count", 12)),
                           float(t.get("min_distance", 0.2)),
                           cfg.seed if seed is None else seed)


def run_solve(cfg: ExperimentConfig, seed: int | None = None) -> dict:
    """Assemble, solve and evaluate one configuration."""
    deg = YukawaDegree(cfg.k)
    geometry = cfg.geometry()
    rule = _rule_for(cfg.quadrature)
    g, ms = _boundary_values(cfg, deg, geometry)
    system = assemble(deg, geometry, rule).with_rhs(g)
    density, iterations = gmres_solve(system, tol=cfg.gmres_tol)
    if cfg.compute_condition:
        condition_and_spectrum(system)
    targets = _targets(cfg, geometry, seed)
    u_vals = eval_dlp(deg, geometry, density, targets)
    result = {
        "unknowns": system.size,
        "iterations": iterations,
        "relres": system.diagnostics.gmres_relres,
        "condition_2norm": system.diagnostics.condition_2norm,
        "geometry": geometry,
        "density": density,
        "targets": targets,
        "u": u_vals,
    }
    if ms is not None:
        exact = np.array([exact_solution_eval(ms, p) for p in targets.points])
        result["max_error"] = float(np.max(np.abs(u_vals - exact)))
    return result


def run_convergence(cfg: ExperimentConfig, seed: int | None = None) -> dict:
    """N-sweep with both quadrature rules; errors against the manufactured solution."""
    if cfg.boundary_data["kind"] != "manufactured":
        raise ConfigError("the convergence study needs manufactured boundary data")
    if "n_values" not in cfg.sweep:
        raise ConfigError("the convergence study needs sweep.n_values")
    deg = YukawaDegree(cfg.k)
    n_values = [int(n) for n in cfg.sweep["n_values"]]
    # fixed targets and sources across the sweep, from the coarsest geometry
    geometry0 = cfg.geometry(n_override=n_values[0])
    ms0 = _manufactured(cfg, deg, geometry0)
    targets = _targets(cfg, geometry0, seed)
    rows = []
    for n in n_values:
        geometry = cfg.geometry(n_override=n)
        ms = ManufacturedSolution(deg, ms0.sources, ms0.weights, geometry)
        g = ms.boundary_data(geometry)
        exact = np.array([exact_solution_eval(ms, p) for p in targets.points])
        errs = {}
        its = None
        for rname in ("trapezoid", "alpert16"):
            system = assemble(deg, geometry, _rule_for(rname)).with_rhs(g)
            density, its = gmres_solve(system, tol=cfg.gmres_tol)
            u_vals = eval_dlp(deg, geometry, density, targets)
            errs[rname] = float(np.max(np.abs(u_vals - exact)))
        rows.append({"n": n, "iterations": its,
                     "trapezoid_error": errs["trapezoid"],
                     "alpert_error": errs["alpert16"]})
    for i, row in enumerate(rows):
        prev = rows[i - 1] if i > 0 else None
        if prev is None or row["n"] <= prev["n"] or row["trapezoid_error"] <= 0:
            row["trapezoid_order"] = math.nan
            continue
        row["trapezoid_order"] = (math.log(prev["trapezoid_error"] / row["trapezoid_error"])
                                  / math.log(row["n"] / prev["n"]))
    return {"rows": rows}


def run_ksweep(cfg: ExperimentConfig, want_eigs: bool = False) -> dict:
    """Condition number and iteration count across the configured k list."""
    if "k_values" not in cfg.sweep:
        raise ConfigError("the k sweep needs sweep.k_values")
    geometry = cfg.geometry()
    rule = _rule_for(cfg.quadrature)
    rows = []
    eigs = {}
    for k in [float(v) for v in cfg.sweep["k_values"]]:
        deg = YukawaDegree(k)
        g, _ = _boundary_values(cfg, deg, geometry)
        system = assemble(deg, geometry, rule).with_rhs(g)
        _, iterations = gmres_solve(system, tol=cfg.gmres_tol)
        condition_and_spectrum(system, want_eigs=want_eigs)
        rows.append({"k": k, "condition": system.diagnostics.condition_2norm,
                     "iterations": iterations})
        if want_eigs:
            eigs[k] = system.diagnostics.eigenvalues
    return {"rows": rows, "eigenvalues": eigs}


def run_curvature(cfg: ExperimentConfig) -> dict:
    """Aspect-ratio sweep of the ellipse geometry: condition number and iterations."""
    if "b_values" not in cfg.sweep:
        raise ConfigError("the curvature sweep needs sweep.b_values")
    ell = [c for c in cfg.curves if c.family == "ellipse"]
    if len(ell) != 1 or len(cfg.curves) != 1:
        raise ConfigError("the curvature sweep expects exactly one ellipse curve")
    a = float(ell[0].params["a"])
    deg = YukawaDegree(cfg.k)
    rule = _rule_for(cfg.quadrature)
    rows = []
    for b in [float(v) for v in cfg.sweep["b_values"]]:
        geometry = cfg.geometry(b_override=b)
        g, _ = _boundary_values(cfg, deg, geometry)
        system = assemble(deg, geometry, rule).with_rhs(g)
        _, iterations = gmres_solve(system, tol=cfg.gmres_tol)
        condition_and_spectrum(system)
        rows.append({"ratio": a / b, "condition": system.diagnostics.condition_2norm,
                     "iterations": iterations})
    return {"rows": rows}
