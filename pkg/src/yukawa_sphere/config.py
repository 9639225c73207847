"""Experiment configuration: JSON schema, validation and geometry building."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .geometry import (BoundaryGeometry, build_curve, build_curve_from_nodes,
                       ellipse_on_sphere, latitude_circle, star_cap)

__all__ = ["ExperimentConfig", "load_config", "EXPRESSIONS"]

SCHEMA = "yukawa-sphere/1"

# built-in boundary data expressions over the spherical angles
EXPRESSIONS = {
    "one": lambda phi, theta: np.ones_like(phi),
    "cos_theta": lambda phi, theta: np.cos(theta),
    "sin_theta_cos_phi": lambda phi, theta: np.sin(theta) * np.cos(phi),
    "sin_theta_sin_phi": lambda phi, theta: np.sin(theta) * np.sin(phi),
}

_FAMILIES = ("latitude_circle", "ellipse", "star_cap", "nodes")
_QUADRATURES = ("trapezoid", "alpert16")


@dataclass
class CurveSpec:
    family: str
    n: int
    orientation: int
    params: dict = field(default_factory=dict)

    def parametrization(self, b_override: float | None = None):
        p = self.params
        if self.family == "latitude_circle":
            return latitude_circle(p["theta0"])
        if self.family == "ellipse":
            b = p["b"] if b_override is None else b_override
            return ellipse_on_sphere(p["a"], b)
        if self.family == "star_cap":
            return star_cap(p["center"], p["radius"], p.get("eps", 0.0),
                            p.get("freq", 0), p.get("phase", 0.0))
        raise ConfigError(f"family {self.family} has no closed-form parametrization")

    def build(self, n_override: int | None = None, b_override: float | None = None):
        n = self.n if n_override is None else n_override
        if self.family == "nodes":
            if n_override is not None:
                raise ConfigError("explicit node-list curves cannot be resampled")
            return build_curve_from_nodes(np.asarray(self.params["points"], float),
                                          self.orientation)
        return build_curve(self.parametrization(b_override), n, self.orientation)


@dataclass
class ExperimentConfig:
    k: float
    quadrature: str
    curves: list
    boundary_data: dict
    targets: dict
    sweep: dict = field(default_factory=dict)
    gmres_tol: float = 1e-11
    seed: int = 0
    compute_condition: bool = True

    def __post_init__(self):
        if not self.k > 0.5:
            raise ConfigError(f"PDE parameter must satisfy k > 1/2, got k={self.k}")
        if self.quadrature not in _QUADRATURES:
            raise ConfigError(
                f"quadrature must be one of {_QUADRATURES}, got {self.quadrature!r}")
        if not self.curves:
            raise ConfigError("geometry needs at least one curve")
        for c in self.curves:
            if c.n % 2 != 0 or c.n < 16:
                raise ConfigError(f"curve N must be even and >= 16, got {c.n}")
        kind = self.boundary_data.get("kind")
        if kind not in ("manufactured", "constant", "expression"):
            raise ConfigError(f"unknown boundary data kind {kind!r}")
        if kind == "expression" and self.boundary_data.get("name") not in EXPRESSIONS:
            raise ConfigError(
                f"unknown expression {self.boundary_data.get('name')!r}; "
                f"available: {sorted(EXPRESSIONS)}")
        tk = self.targets.get("kind", "scattered")
        if tk not in ("scattered", "explicit"):
            raise ConfigError(f"unknown targets kind {tk!r}")
        for key in ("n_values", "k_values", "b_values"):
            if key in self.sweep and not self.sweep[key]:
                raise ConfigError(f"sweep list {key} must be nonempty")

    def geometry(self, n_override: int | None = None,
                 b_override: float | None = None) -> BoundaryGeometry:
        return BoundaryGeometry(
            [c.build(n_override, b_override) for c in self.curves])


def _parse_curve(entry: dict) -> CurveSpec:
    if "family" not in entry:
        raise ConfigError(f"curve entry missing 'family': {entry}")
    family = entry["family"]
    if family not in _FAMILIES:
        raise ConfigError(f"unknown curve family {family!r}; available: {_FAMILIES}")
    if family != "nodes" and "n" not in entry:
        raise ConfigError(f"curve entry missing node count 'n': {entry}")
    n = int(entry.get("n", len(entry.get("points", []))))
    orientation = int(entry.get("orientation", 1))
    params = {kk: vv for kk, vv in entry.items()
              if kk not in ("family", "n", "orientation")}
    required = {"latitude_circle": ["theta0"], "ellipse": ["a", "b"],
                "star_cap": ["center", "radius"], "nodes": ["points"]}[family]
    for r in required:
        if r not in params:
            raise ConfigError(f"curve family {family!r} requires parameter {r!r}")
    return CurveSpec(family=family, n=n, orientation=orientation, params=params)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if raw.get("schema") != SCHEMA:
        raise ConfigError(
            f"config schema must be {SCHEMA!r}, got {raw.get('schema')!r}")
    try:
        k = float(raw["k"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"config needs a numeric 'k': {exc}") from exc
    curves = [_parse_curve(e) for e in raw.get("geometry", {}).get("curves", [])]
    return ExperimentConfig(
        k=k,
        quadrature=raw.get("quadrature", "alpert16"),
        curves=curves,
        boundary_data=raw.get("boundary_data", {"kind": "manufactured"}),
        targets=raw.get("targets", {"kind": "scattered", "count": 12,
                                    "min_distance": 0.2}),
        sweep=raw.get("sweep", {}),
        gmres_tol=float(raw.get("gmres_tol", 1e-11)),
        seed=int(raw.get("seed", 0)),
        compute_condition=bool(raw.get("compute_condition", True)),
    )
