"""Nystrom discretization of the second-kind boundary integral equation.

The equation solved is

    (1/2) mu(x_i) + int_Gamma A(x_i, y) mu(y) ds_y = g(x_i),

with the double-layer kernel

    A(x0, y) = c_k P'_nu(z) <x0 - y, n(y)>,     z = ||x0 - y||^2 / 2 - 1,

where n = t x y is the conormal pointing out of the domain (domain left of
t).  The +1/2 jump of the discretized equation pins this sign: with it, the
double-layer potential of the solved density reproduces interior Dirichlet
data, which the acceptance suite checks end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DiagnosticError, SingularityError, SolverError
from .geometry import BoundaryGeometry, SpherePoint, diag_kernel_limit
from .quadrature import QuadratureRule, periodic_cardinal
from .specfun import (DEFAULT_POLICY, SeriesPolicy, YukawaDegree,
                      conical_batch)

__all__ = [
    "Density",
    "NystromSystem",
    "dlp_kernel",
    "dlp_kernel_block",
    "assemble",
    "gmres_solve",
    "condition_and_spectrum",
]

_COINCIDENCE_TOL = 1e-12


@dataclass
class Density:
    """Boundary density samples, concatenated over the geometry's curves."""

    values: np.ndarray
    geometry: BoundaryGeometry

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.geometry.total_nodes,):
            raise ValueError(
                f"density length {self.values.shape} does not match "
                f"{self.geometry.total_nodes} boundary nodes")

    def per_curve(self):
        out = []
        off = 0
        for c in self.geometry.curves:
            out.append(self.values[off:off + c.n_nodes])
            off += c.n_nodes
        return out


@dataclass
class Diagnostics:
    gmres_iterations: int | None = None
    gmres_relres: float | None = None
    residual_history: list = field(default_factory=list)
    condition_2norm: float | None = None
    eigenvalues: np.ndarray | None = None


@dataclass
class NystromSystem:
    """Dense discretization of (1/2) I + K with solve state and diagnostics."""

    matrix: np.ndarray
    geometry: BoundaryGeometry
    deg: YukawaDegree
    rule: QuadratureRule
    rhs: np.ndarray | None = None
    solution: Density | None = None
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def with_rhs(self, rhs) -> "NystromSystem":
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.size,):
            raise ValueError(f"rhs length {rhs.shape} does not match system size {self.size}")
        self.rhs = rhs
        return self


def dlp_kernel_block(deg: YukawaDegree, targets: np.ndarray, sources: np.ndarray,
                     normals: np.ndarray, policy: SeriesPolicy = DEFAULT_POLICY,
                     diag_mask: np.ndarray | None = None) -> np.ndarray:
    """Kernel matrix A(x_i, y_j) for target rows against source columns.

    diag_mask marks coincident pairs to skip (their entries are returned as 0
    for the caller to overwrite); any other coincident pair raises.
    """
    d = targets[:, None, :] - sources[None, :, :]
    z = 0.5 * np.einsum("ijk,ijk->ij", d, d) - 1.0
    if diag_mask is not None:
        z = np.where(diag_mask, 0.0, z)
    if np.any(z <= -1.0 + _COINCIDENCE_TOL):
        raise SingularityError(
            "coincident target/source pair in kernel block; "
            "route diagonal entries through diag_kernel_limit")
    shape = z.shape
    _, dp = conical_batch(deg, z.ravel(), policy)
    dot = np.einsum("ijk,jk->ij", d, normals)
    block = deg.c_k * dp.reshape(shape) * dot
    if diag_mask is not None:
        block = np.where(diag_mask, 0.0, block)
    return block


def dlp_kernel(deg: YukawaDegree, target, source_node,
               policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """Double-layer kernel at a single (target, source) pair.

    source_node is (point, normal) with the normal t x y of the source curve.
    Coincident points raise SingularityError; the continuous diagonal value
    is geometry.diag_kernel_limit.
    """
    x0 = target.coords if isinstance(target, SpherePoint) else np.asarray(target, float)
    y, n = source_node
    y = y.coords if isinstance(y, SpherePoint) else np.asarray(y, float)
    n = np.asarray(n, dtype=float)
    d = x0 - y
    z = 0.5 * float(d @ d) - 1.0
    if z <= -1.0 + _COINCIDENCE_TOL:
        raise SingularityError("coincident target and source; use diag_kernel_limit")
    _, dp = conical_batch(deg, np.array([z]), policy)
    return deg.c_k * float(dp[0]) * float(d @ n)


def _shifted_curve_frames(curve, delta: float):
    """Curve position/frame at parameters alpha_j + delta via FFT phase shift."""
    n = curve.n_nodes
    m = np.arange(n // 2 + 1)
    phase = np.exp(1j * m * delta)
    pos_hat = np.fft.rfft(curve.nodes, axis=0)
    d1_hat = np.fft.rfft(curve.d1, axis=0)
    pos = np.fft.irfft(pos_hat * phase[:, None], n=n, axis=0)
    d1 = np.fft.irfft(d1_hat * phase[:, None], n=n, axis=0)
    nrm = np.linalg.norm(pos, axis=1)
    pos = pos / nrm[:, None]
    speed = np.linalg.norm(d1, axis=1)
    proj = d1 - pos * np.einsum("ij,ij->i", pos, d1)[:, None]
    tangent = curve.orientation * proj / np.linalg.norm(proj, axis=1)[:, None]
    normal = np.cross(tangent, pos)
    return pos, speed, normal


def assemble(deg: YukawaDegree, geometry: BoundaryGeometry, rule: QuadratureRule,
             policy: SeriesPolicy = DEFAULT_POLICY) -> NystromSystem:
    """Dense matrix of (1/2) I + K collocated at the geometry's nodes.

    Trapezoid rows use the continuous kernel extension on the diagonal.  The
    hybrid rule replaces each self-curve row by the composite log rule: the
    excluded window (including the diagonal) is dropped and the auxiliary
    off-grid corrections are folded onto the regular samples through the
    trigonometric interpolation cardinal functions.
    """
    nodes = geometry.all_nodes()
    normals = geometry.all_normals()
    speeds = geometry.all_speeds()
    hs = geometry.all_param_weights()
    m_total = geometry.total_nodes

    eye_mask = np.zeros((m_total, m_total), dtype=bool)
    off = 0
    for c in geometry.curves:
        idx = np.arange(off, off + c.n_nodes)
        eye_mask[idx, idx] = True
        off += c.n_nodes

    kern = dlp_kernel_block(deg, nodes, nodes, normals, policy, diag_mask=eye_mask)
    k_mat = kern * (speeds * hs)[None, :]

    if rule.kind == "trapezoid":
        off = 0
        for c in geometry.curves:
            for j in range(c.n_nodes):
                k_mat[off + j, off + j] = (diag_kernel_limit(c, j)
                                           * c.speed[j] * 2.0 * np.pi / c.n_nodes)
            off += c.n_nodes
    else:
        a = rule.skip
        off = 0
        for c in geometry.curves:
            n = c.n_nodes
            h = 2.0 * np.pi / n
            rows = slice(off, off + n)
            block = k_mat[rows, rows]
            # drop the excluded window (diagonal included) from the plain
            # trapezoid block
            ii = np.arange(n)
            circ = np.minimum((ii[:, None] - ii[None, :]) % n,
                              (ii[None, :] - ii[:, None]) % n)
            block[circ <= a - 1] = 0.0
            # auxiliary corrections, one shifted geometry per offset
            rel = (ii[:, None] - ii[None, :]) % n
            targets = c.nodes
            for sgn in (1.0, -1.0):
                for chi, wgt in zip(rule.aux_nodes, rule.aux_weights):
                    delta = sgn * chi * h
                    pos, speed, normal = _shifted_curve_frames(c, delta)
                    d = targets - pos
                    z = 0.5 * np.einsum("ij,ij->i", d, d) - 1.0
                    _, dp = conical_batch(deg, z, policy)
                    coeff = (wgt * h * deg.c_k * dp
                             * np.einsum("ij,ij->i", d, normal) * speed)
                    cards = periodic_cardinal(n, rel * h + delta)
                    block += coeff[:, None] * cards
            k_mat[rows, rows] = block
            off += n

    matrix = 0.5 * np.eye(m_total) + k_mat
    return NystromSystem(matrix=matrix, geometry=geometry, deg=deg, rule=rule)


def gmres_solve(system: NystromSystem, tol: float = 1e-11,
                max_iter: int | None = None):
    """Unrestarted GMRES with modified Gram-Schmidt and one reorthogonalization.

    Returns (density, iteration count); records the relative residual history
    in the system diagnostics.  Raises SolverError (with history) if the
    tolerance is not met within max_iter Arnoldi steps.
    """
    if system.rhs is None:
        raise SolverError("system has no right-hand side")
    a_mat = system.matrix
    b = system.rhs
    n = len(b)
    if max_iter is None:
        max_iter = n
    max_iter = min(max_iter, n)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        density = Density(np.zeros(n), system.geometry)
        system.solution = density
        system.diagnostics.gmres_iterations = 0
        system.diagnostics.gmres_relres = 0.0
        system.diagnostics.residual_history = []
        return density, 0

    q_basis = np.zeros((n, max_iter + 1))
    h_mat = np.zeros((max_iter + 1, max_iter))
    q_basis[:, 0] = b / b_norm
    beta = np.zeros(max_iter + 1)
    beta[0] = b_norm
    cs = np.zeros(max_iter)
    sn = np.zeros(max_iter)
    history = []
    n_iter = 0
    for j in range(max_iter):
        v = a_mat @ q_basis[:, j]
        for i in range(j + 1):
            h_mat[i, j] = q_basis[:, i] @ v
            v -= h_mat[i, j] * q_basis[:, i]
        for i in range(j + 1):
            corr = q_basis[:, i] @ v
            h_mat[i, j] += corr
            v -= corr * q_basis[:, i]
        h_mat[j + 1, j] = np.linalg.norm(v)
        breakdown = h_mat[j + 1, j] < 1e-14 * b_norm
        if not breakdown:
            q_basis[:, j + 1] = v / h_mat[j + 1, j]
        for i in range(j):
            tmp = cs[i] * h_mat[i, j] + sn[i] * h_mat[i + 1, j]
            h_mat[i + 1, j] = -sn[i] * h_mat[i, j] + cs[i] * h_mat[i + 1, j]
            h_mat[i, j] = tmp
        r = float(np.hypot(h_mat[j, j], h_mat[j + 1, j]))
        cs[j] = h_mat[j, j] / r
        sn[j] = h_mat[j + 1, j] / r
        h_mat[j, j] = r
        h_mat[j + 1, j] = 0.0
        beta[j + 1] = -sn[j] * beta[j]
        beta[j] = cs[j] * beta[j]
        relres = abs(beta[j + 1]) / b_norm
        history.append(relres)
        n_iter = j + 1
        if relres <= tol or breakdown:
            y = np.linalg.solve(np.triu(h_mat[:n_iter, :n_iter]), beta[:n_iter])
            x = q_basis[:, :n_iter] @ y
            true_rel = float(np.linalg.norm(a_mat @ x - b) / b_norm)
            density = Density(x, system.geometry)
            system.solution = density
            system.diagnostics.gmres_iterations = n_iter
            system.diagnostics.gmres_relres = true_rel
            system.diagnostics.residual_history = history
            return density, n_iter
    raise SolverError(
        f"GMRES did not reach tol={tol} in {max_iter} iterations "
        f"(last relres {history[-1]:.3e})",
        residual_history=history)


def condition_and_spectrum(system: NystromSystem, want_eigs: bool = False) -> Diagnostics:
    """2-norm condition number (dense SVD) and, on request, the full spectrum."""
    try:
        sv = np.linalg.svd(system.matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DiagnosticError(f"singular value computation failed: {exc}") from exc
    system.diagnostics.condition_2norm = float(sv[0] / sv[-1])
    if want_eigs:
        try:
            system.diagnostics.eigenvalues = np.linalg.eigvals(system.matrix)
        except np.linalg.LinAlgError as exc:
            raise DiagnosticError(f"eigenvalue iteration failed: {exc}") from exc
    return system.diagnostics
