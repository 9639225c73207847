"""Points, closed curves and multiply-connected boundaries on the unit sphere.

Curves are stored as uniform-parameter samples with spectrally computed
derivatives.  The orientation convention throughout: the solution domain lies
to the LEFT of the unit tangent (standing on the outside of the sphere, head
pointing away from the center).  With that convention the stored normal
n = t x x is the conormal pointing OUT of the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError

__all__ = [
    "SpherePoint",
    "SphereCurve",
    "BoundaryGeometry",
    "solid_angle_cos",
    "build_curve",
    "build_curve_from_nodes",
    "diag_kernel_limit",
    "latitude_circle",
    "ellipse_on_sphere",
    "star_cap",
]

_UNIT_TOL = 1e-12
_FRAME_TOL = 1e-10
_NODE_SPHERE_TOL = 1e-8
_MIN_CURVE_SEPARATION = 1e-9


@dataclass(frozen=True)
class SpherePoint:
    """A unit 3-vector.  Construction normalizes inputs within 1e-12, rejects worse."""

    coords: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.coords, dtype=float).reshape(3)
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > _UNIT_TOL:
            raise GeometryError(f"point has norm {nrm!r}, not on the unit sphere")
        object.__setattr__(self, "coords", v / nrm)

    @classmethod
    def from_angles(cls, phi: float, theta: float) -> "SpherePoint":
        st = math.sin(theta)
        return cls(np.array([math.cos(phi) * st, math.sin(phi) * st, math.cos(theta)]))


def solid_angle_cos(a, b) -> float:
    """Cosine of the geodesic angle: the plain 3-vector dot product.

    Satisfies <a,b> = 1 - ||a-b||^2 / 2 for unit vectors.
    """
    va = a.coords if isinstance(a, SpherePoint) else np.asarray(a, dtype=float)
    vb = b.coords if isinstance(b, SpherePoint) else np.asarray(b, dtype=float)
    return float(va @ vb)


@dataclass(frozen=True)
class SphereCurve:
    """Closed curve sampled at alpha_j = 2 pi j / N with spectral derivative data.

    nodes, d1, d2 are (N, 3); speed, and the frame vectors tangent (unit) and
    normal (= tangent x node, in the sphere's tangent plane) are per node.
    """

    nodes: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    speed: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    orientation: int

    def __post_init__(self):
        n = self.nodes.shape[0]
        if n < 16 or n % 2 != 0:
            raise GeometryError(f"node count must be even and >= 16, got {n}")
        if self.orientation not in (-1, 1):
            raise GeometryError(f"orientation must be +1 or -1, got {self.orientation}")
        if np.any(self.speed <= 0.0):
            raise GeometryError("degenerate parametrization: vanishing speed")
        dots = np.abs(np.einsum("ij,ij->i", self.tangent, self.nodes))
        dots = max(dots.max(), np.abs(np.einsum("ij,ij->i", self.normal, self.nodes)).max(),
                   np.abs(np.einsum("ij,ij->i", self.normal, self.tangent)).max())
        if dots > _FRAME_TOL:
            raise GeometryError(f"frame not orthogonal to within {_FRAME_TOL}: {dots:.2e}")

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def params(self) -> np.ndarray:
        n = self.n_nodes
        return 2.0 * np.pi * np.arange(n) / n

    def arclength(self) -> float:
        return float(2.0 * np.pi / self.n_nodes * self.speed.sum())

    def arclength_second_derivative(self, j: int) -> np.ndarray:
        """x''(s) at node j from the parameter derivatives by the chain rule."""
        d1 = self.d1[j]
        d2 = self.d2[j]
        sp = self.speed[j]
        return d2 / sp**2 - d1 * (d1 @ d2) / sp**4


def _spectral_derivatives(nodes: np.ndarray):
    """First and second derivatives of the trigonometric interpolant of nodes."""
    n = nodes.shape[0]
    coef = np.fft.rfft(nodes, axis=0)
    m = np.arange(coef.shape[0])
    ik = 1j * m.astype(float)
    if n % 2 == 0:
        ik[-1] = 0.0  # Nyquist mode carries no odd-derivative information
    d1 = np.fft.irfft(coef * ik[:, None], n=n, axis=0)
    d2 = np.fft.irfft(coef * (-(m.astype(float) ** 2))[:, None], n=n, axis=0)
    return d1, d2


def build_curve_from_nodes(nodes: np.ndarray, orientation: int = 1) -> SphereCurve:
    """Curve from explicit uniform-parameter samples (spectral differentiation)."""
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 2 or nodes.shape[1] != 3:
        raise GeometryError(f"nodes must be (N, 3), got {nodes.shape}")
    nrm = np.linalg.norm(nodes, axis=1)
    if np.any(np.abs(nrm - 1.0) > _NODE_SPHERE_TOL):
        raise GeometryError(
            f"curve nodes off the sphere by up to {np.abs(nrm - 1.0).max():.2e}")
    nodes = nodes / nrm[:, None]
    d1, d2 = _spectral_derivatives(nodes)
    speed = np.linalg.norm(d1, axis=1)
    if np.any(speed <= 0.0):
        raise GeometryError("degenerate parametrization: vanishing speed")
    # project the tangent into the sphere's tangent plane; the radial part of
    # d1 is pure aliasing error and would leak into the frame checks
    proj = d1 - nodes * np.einsum("ij,ij->i", nodes, d1)[:, None]
    pn = np.linalg.norm(proj, axis=1)
    if np.any(pn <= 0.0):
        raise GeometryError("degenerate parametrization: vanishing tangent")
    tangent = orientation * proj / pn[:, None]
    normal = np.cross(tangent, nodes)
    return SphereCurve(nodes=nodes, d1=d1, d2=d2, speed=speed,
                       tangent=tangent, normal=normal, orientation=orientation)


def build_curve(parametrization, n_nodes: int, orientation: int = 1) -> SphereCurve:
    """Sample a 2 pi periodic parametrization at N uniform nodes.

    The callable maps a parameter value to a 3-vector on the sphere; samples
    off the sphere beyond 1e-8 are rejected.
    """
    if n_nodes < 16 or n_nodes % 2 != 0:
        raise GeometryError(f"node count must be even and >= 16, got {n_nodes}")
    alphas = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    nodes = np.array([np.asarray(parametrization(a), dtype=float) for a in alphas])
    return build_curve_from_nodes(nodes, orientation)


def diag_kernel_limit(curve: SphereCurve, j: int) -> float:
    """Continuous extension of the double-layer kernel at the diagonal.

    Equals (1/(4 pi)) x'(s) . (x''(s) x x) at node j, with arclength
    derivatives assembled from the stored parameter derivatives.  The sign is
    pinned by the +1/2 jump of the discretized second-kind equation; reversing
    the curve orientation negates the value.
    """
    xpp = curve.arclength_second_derivative(j)
    return float(np.dot(curve.tangent[j], np.cross(xpp, curve.nodes[j]))) / (4.0 * np.pi)


class BoundaryGeometry:
    """Oriented collection of disjoint closed curves bounding the domain.

    Every curve is oriented with the domain on its left, so a point belongs
    to the domain iff it lies left of every curve.
    """

    def __init__(self, curves, domain_side: str = "left"):
        curves = list(curves)
        if not curves:
            raise GeometryError("boundary needs at least one curve")
        if domain_side != "left":
            raise GeometryError("the only supported domain_side marker is 'left'")
        for i in range(len(curves)):
            for j in range(i + 1, len(curves)):
                d = np.linalg.norm(
                    curves[i].nodes[:, None, :] - curves[j].nodes[None, :, :], axis=2)
                if d.min() <= _MIN_CURVE_SEPARATION:
                    raise GeometryError(
                        f"curves {i} and {j} are not disjoint "
                        f"(min node distance {d.min():.2e})")
        self.curves = curves
        self.domain_side = domain_side

    @property
    def total_nodes(self) -> int:
        return sum(c.n_nodes for c in self.curves)

    def all_nodes(self) -> np.ndarray:
        return np.concatenate([c.nodes for c in self.curves])

    def all_tangents(self) -> np.ndarray:
        return np.concatenate([c.tangent for c in self.curves])

    def all_normals(self) -> np.ndarray:
        return np.concatenate([c.normal for c in self.curves])

    def all_speeds(self) -> np.ndarray:
        return np.concatenate([c.speed for c in self.curves])

    def all_param_weights(self) -> np.ndarray:
        return np.concatenate(
            [np.full(c.n_nodes, 2.0 * np.pi / c.n_nodes) for c in self.curves])

    def min_distance(self, point) -> float:
        p = point.coords if isinstance(point, SpherePoint) else np.asarray(point, float)
        return min(float(np.linalg.norm(c.nodes - p, axis=1).min()) for c in self.curves)

    def _winding(self, curve: SphereCurve, p: np.ndarray) -> int:
        """Winding of the curve around p in stereographic projection from -p."""
        denom = 1.0 + curve.nodes @ p
        if denom.min() < 1e-12:
            raise GeometryError("membership test undefined: curve passes the antipode")
        a = np.array([1.0, 0.0, 0.0]) if abs(p[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = np.cross(p, a)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(p, e1)
        u = (curve.nodes @ e1) / denom
        v = (curve.nodes @ e2) / denom
        ang = np.arctan2(v, u)
        dang = np.diff(np.concatenate([ang, ang[:1]]))
        dang = (dang + np.pi) % (2.0 * np.pi) - np.pi
        return int(round(dang.sum() / (2.0 * np.pi)))

    def contains(self, point) -> bool:
        """True iff the point lies in the domain (left of every curve).

        Winding is computed along the stored node order; +1 means the point
        lies left of that traversal, so left-of-tangent is winding ==
        orientation.
        """
        p = point.coords if isinstance(point, SpherePoint) else np.asarray(point, float)
        p = p / np.linalg.norm(p)
        return all(self._winding(c, p) == c.orientation for c in self.curves)


# ---------------------------------------------------------------------------
# Built-in curve families

def latitude_circle(theta0: float):
    """Circle of colatitude theta0 traversed counterclockwise seen from +z."""
    st, ct = math.sin(theta0), math.cos(theta0)
    if st <= 0.0:
        raise GeometryError(f"degenerate latitude circle at theta0={theta0}")

    def fun(alpha):
        return np.array([st * math.cos(alpha), st * math.sin(alpha), ct])

    return fun


def ellipse_on_sphere(a: float, b: float):
    """x = a cos, y = b sin lifted to the upper hemisphere; needs a^2, b^2 < 1."""
    if not (0.0 < a < 1.0 and 0.0 < b < 1.0):
        raise GeometryError(f"ellipse semi-axes must lie in (0, 1), got a={a}, b={b}")

    def fun(alpha):
        x = a * math.cos(alpha)
        y = b * math.sin(alpha)
        return np.array([x, y, math.sqrt(1.0 - x * x - y * y)])

    return fun


def star_cap(center, radius: float, eps: float = 0.0, freq: int = 0, phase: float = 0.0):
    """Perturbed cap boundary around an axis: colatitude rho(alpha) about center.

    rho(alpha) = radius * (1 + eps cos(freq alpha + phase)).
    """
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    if not 0.0 < radius < math.pi / 2:
        raise GeometryError(f"cap radius must lie in (0, pi/2), got {radius}")
    if abs(eps) >= 1.0:
        raise GeometryError(f"|eps| must be < 1, got {eps}")
    a = np.array([1.0, 0.0, 0.0]) if abs(c[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(c, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(c, e1)

    def fun(alpha):
        rho = radius * (1.0 + eps * math.cos(freq * alpha + phase))
        return (math.sin(rho) * (math.cos(alpha) * e1 + math.sin(alpha) * e2)
                + math.cos(rho) * c)

    return fun
