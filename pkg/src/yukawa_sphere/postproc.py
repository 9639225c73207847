"""Interior evaluation, manufactured solutions and verification checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bie import Density, dlp_kernel_block
from .errors import AccuracyError, DomainError, GeometryError
from .geometry import BoundaryGeometry, SpherePoint
from .specfun import (DEFAULT_POLICY, SeriesPolicy, YukawaDegree,
                      fundamental_solution_batch)

__all__ = [
    "TargetSet",
    "ManufacturedSolution",
    "eval_dlp",
    "exact_solution_eval",
    "representation_check",
    "pde_residual_check",
    "scatter_targets",
    "default_sources",
]


@dataclass
class TargetSet:
    """Evaluation points inside the domain, kept away from the boundary.

    Construction validates membership and the minimum 3-space distance to the
    boundary nodes against the supplied geometry.
    """

    points: np.ndarray
    min_distance_to_boundary: float = 0.2
    geometry: BoundaryGeometry | None = field(default=None, repr=False)

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[1] != 3:
            raise GeometryError(f"targets must be (M, 3), got {self.points.shape}")
        nrm = np.linalg.norm(self.points, axis=1)
        if np.any(np.abs(nrm - 1.0) > 1e-8):
            raise GeometryError("targets must lie on the unit sphere")
        self.points = self.points / nrm[:, None]
        if self.geometry is not None:
            for p in self.points:
                if self.geometry.min_distance(p) < self.min_distance_to_boundary:
                    raise AccuracyError(
                        f"target {p} closer than {self.min_distance_to_boundary} "
                        "to the boundary")
                if not self.geometry.contains(p):
                    raise GeometryError(f"target {p} lies outside the domain")


def scatter_targets(geometry: BoundaryGeometry, count: int,
                    min_distance: float = 0.2, seed: int = 0) -> TargetSet:
    """Uniform random targets inside the domain, rejection-sampled."""
    rng = np.random.default_rng(seed)
    pts = []
    attempts = 0
    while len(pts) < count:
        attempts += 1
        if attempts > 20000:
            raise GeometryError(
                "could not place targets; domain too small for the requested "
                f"min_distance={min_distance}")
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        if geometry.min_distance(v) < min_distance:
            continue
        if not geometry.contains(v):
            continue
        pts.append(v)
    return TargetSet(np.array(pts), min_distance, geometry)


def default_sources(geometry: BoundaryGeometry) -> np.ndarray:
    """Normalized node centroids of the islands, one source per curve."""
    out = []
    for c in geometry.curves:
        ctr = c.nodes.mean(axis=0)
        nrm = np.linalg.norm(ctr)
        if nrm < 1e-8:
            raise GeometryError("curve centroid degenerate; specify sources explicitly")
        out.append(ctr / nrm)
    return np.array(out)


@dataclass
class ManufacturedSolution:
    """Sum of fundamental solutions with sources outside the closed domain."""

    deg: YukawaDegree
    sources: np.ndarray
    weights: np.ndarray
    geometry: BoundaryGeometry | None = field(default=None, repr=False)

    def __post_init__(self):
        self.sources = np.atleast_2d(np.asarray(self.sources, dtype=float))
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if self.sources.shape[0] != self.weights.shape[0]:
            raise DomainError("one weight per source required")
        nrm = np.linalg.norm(self.sources, axis=1)
        self.sources = self.sources / nrm[:, None]
        if self.geometry is not None:
            for s in self.sources:
                if self.geometry.contains(s):
                    raise GeometryError(
                        f"manufactured source {s} lies inside the domain")
                if self.geometry.min_distance(s) <= 0.0:
                    raise GeometryError("manufactured source on the boundary")

    def boundary_data(self, geometry: BoundaryGeometry,
                      policy: SeriesPolicy = DEFAULT_POLICY) -> np.ndarray:
        nodes = geometry.all_nodes()
        g = np.zeros(nodes.shape[0])
        for w, s in zip(self.weights, self.sources):
            g += w * fundamental_solution_batch(self.deg, nodes @ s, policy)
        return g


def exact_solution_eval(ms: ManufacturedSolution, x,
                        policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """Evaluate the manufactured solution at one point (sources excluded)."""
    p = x.coords if isinstance(x, SpherePoint) else np.asarray(x, dtype=float)
    val = 0.0
    for w, s in zip(ms.weights, ms.sources):
        val += w * float(fundamental_solution_batch(ms.deg, np.array([p @ s]),
                                                    policy)[0])
    return val


def eval_dlp(deg: YukawaDegree, geometry: BoundaryGeometry, density: Density,
             targets: TargetSet, policy: SeriesPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Double-layer potential at interior targets by the periodic trapezoid rule.

    Spectrally accurate because the integrand is smooth for targets off the
    boundary; targets violating the set's distance floor raise AccuracyError.
    """
    pts = targets.points
    for p in pts:
        if geometry.min_distance(p) < targets.min_distance_to_boundary:
            raise AccuracyError("target too close to the boundary for accurate "
                                "trapezoid evaluation")
    nodes = geometry.all_nodes()
    normals = geometry.all_normals()
    weights = geometry.all_speeds() * geometry.all_param_weights()
    block = dlp_kernel_block(deg, pts, nodes, normals, policy)
    return block @ (density.values * weights)


def representation_check(deg: YukawaDegree, geometry: BoundaryGeometry,
                         ms: ManufacturedSolution, x0,
                         policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """Residual of the representation formula at x0.

    Evaluates - int G (curl u . t) ds + int u (curl G . t) ds by the
    trapezoid rule and compares with u(x0) for x0 in the domain, or with 0
    for x0 in the complement.  The tangential data of the manufactured
    solution reuses the double-layer kernel with source and target roles
    exchanged (the fundamental solution is symmetric).
    """
    p = x0.coords if isinstance(x0, SpherePoint) else np.asarray(x0, dtype=float)
    p = p / np.linalg.norm(p)
    nodes = geometry.all_nodes()
    normals = geometry.all_normals()
    weights = geometry.all_speeds() * geometry.all_param_weights()

    curl_u = np.zeros(nodes.shape[0])
    block = dlp_kernel_block(deg, ms.sources, nodes, normals, policy)
    for w, row in zip(ms.weights, block):
        curl_u += w * row

    u_gamma = ms.boundary_data(geometry, policy)
    g_vals = fundamental_solution_batch(deg, nodes @ p, policy)
    a_vals = dlp_kernel_block(deg, p[None, :], nodes, normals, policy)[0]

    rep = float(np.sum((-g_vals * curl_u + u_gamma * a_vals) * weights))
    expected = exact_solution_eval(ms, p, policy) if geometry.contains(p) else 0.0
    return abs(rep - expected)


def pde_residual_check(deg: YukawaDegree, x0, h: float, source=None,
                       policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """| (-Laplace_S + k^2) G | at x0 by a centered finite-difference stencil.

    The stencil lives in spherical coordinates of a frame whose equator passes
    through x0, so it is well conditioned anywhere on the sphere.  Expected to
    scale as O(h^2) times the local derivative scale of G.
    """
    p = x0.coords if isinstance(x0, SpherePoint) else np.asarray(x0, dtype=float)
    p = p / np.linalg.norm(p)
    if source is None:
        source = np.array([0.0, 0.0, 1.0])
    else:
        source = source.coords if isinstance(source, SpherePoint) else np.asarray(source, float)
        source = source / np.linalg.norm(source)
    sep = math.acos(float(np.clip(p @ source, -1.0, 1.0)))
    if sep < 10.0 * h:
        raise DomainError(
            f"stencil too close to the source (separation {sep:.3e} < 10 h)")

    # frame with x0 on its equator: x(phi, theta) with e3 orthogonal to x0
    a = np.array([1.0, 0.0, 0.0]) if abs(p[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e3 = np.cross(p, a)
    e3 /= np.linalg.norm(e3)
    e1 = p
    e2 = np.cross(e3, e1)

    def gval(phi, theta):
        x = (math.cos(phi) * math.sin(theta) * e1
             + math.sin(phi) * math.sin(theta) * e2 + math.cos(theta) * e3)
        return float(fundamental_solution_batch(deg, np.array([x @ source]),
                                                policy)[0])

    phi0, th0 = 0.0, math.pi / 2.0
    u0 = gval(phi0, th0)
    upp = gval(phi0 + h, th0)
    upm = gval(phi0 - h, th0)
    utp = gval(phi0, th0 + h)
    utm = gval(phi0, th0 - h)
    st = math.sin(th0)
    lap_phi = (upp - 2.0 * u0 + upm) / (h * h * st * st)
    lap_th = (math.sin(th0 + 0.5 * h) * (utp - u0)
              - math.sin(th0 - 0.5 * h) * (u0 - utm)) / (h * h * st)
    k2 = deg.k * deg.k
    return abs(-(lap_phi + lap_th) + k2 * u0)
