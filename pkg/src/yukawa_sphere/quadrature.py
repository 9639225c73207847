"""Periodic trapezoid and hybrid Gauss-trapezoidal (log-singular) quadrature.

The hybrid rule is the 16th-order logarithmic variant: 15 auxiliary nodes per
side, 10 skipped regular nodes per side.  Its node/weight table lives in
``alpert16.py`` (regenerable with scripts/gen_alpert16_rule.py); the auxiliary
weights satisfy sum(w) = a - 1/2 exactly, so every composite row integrates
constants over the period to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError
from .geometry import SphereCurve

__all__ = [
    "QuadratureRule",
    "SingularRow",
    "trapezoid_rule",
    "alpert16_rule",
    "trapezoid_integrate",
    "trig_interpolate",
    "periodic_cardinal",
    "singular_row_weights",
    "apply_singular_row",
]


@dataclass(frozen=True)
class QuadratureRule:
    """trapezoid: uniform weights 2 pi / N; hybrid-log-16: Alpert corrections."""

    kind: str
    aux_nodes: np.ndarray | None = None
    aux_weights: np.ndarray | None = None
    skip: int = 0

    def __post_init__(self):
        if self.kind not in ("trapezoid", "hybrid-log-16"):
            raise QuadratureError(f"unknown rule kind {self.kind!r}")
        if self.kind == "hybrid-log-16":
            if self.aux_nodes is None or self.aux_weights is None or self.skip < 1:
                raise QuadratureError("hybrid rule needs auxiliary nodes/weights")
            if np.any(self.aux_weights <= 0.0):
                raise QuadratureError("auxiliary weights must be positive")


def trapezoid_rule() -> QuadratureRule:
    return QuadratureRule(kind="trapezoid")


def alpert16_rule() -> QuadratureRule:
    from .alpert16 import ALPERT16_NODES, ALPERT16_SKIP, ALPERT16_WEIGHTS
    return QuadratureRule(
        kind="hybrid-log-16",
        aux_nodes=ALPERT16_NODES.copy(),
        aux_weights=ALPERT16_WEIGHTS.copy(),
        skip=ALPERT16_SKIP,
    )


def trapezoid_integrate(samples, curve: SphereCurve) -> float:
    """Arclength integral of node samples: (2 pi / N) sum f_j speed_j."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (curve.n_nodes,):
        raise QuadratureError(
            f"got {samples.shape[0] if samples.ndim else 0} samples "
            f"for a curve with {curve.n_nodes} nodes")
    return float(2.0 * np.pi / curve.n_nodes * np.sum(samples * curve.speed))


def periodic_cardinal(n: int, theta) -> np.ndarray:
    """Cardinal function of the degree-n/2 trigonometric interpolant (n even).

    S(0) = 1, S(2 pi j / n) = 0 for j != 0; band-limited inputs are
    reproduced exactly.
    """
    theta = np.asarray(theta, dtype=float)
    out = np.empty_like(theta)
    half = np.mod(theta, 2.0 * np.pi) / 2.0
    # sin(half) = 0 only at theta = 0 mod 2pi, where the limit is 1; the other
    # grid nodes have sin(half) != 0 and evaluate to 0 through the formula
    on_node = np.abs(np.sin(half)) < 1e-15
    safe = ~on_node
    out[safe] = np.sin(n * half[safe]) / (n * np.tan(half[safe]))
    out[on_node] = 1.0
    return out


def trig_interpolate(samples, targets) -> np.ndarray:
    """Evaluate the trigonometric interpolant of N uniform samples at targets."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    if n % 2 != 0:
        raise QuadratureError(f"need an even number of samples, got {n}")
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    alphas = 2.0 * np.pi * np.arange(n) / n
    cards = periodic_cardinal(n, targets[:, None] - alphas[None, :])
    return cards @ samples


@dataclass(frozen=True)
class SingularRow:
    """Composite rule for a period integral with a log singularity at one node.

    reg_indices/reg_weights: surviving regular trapezoid nodes (parameter-space
    weights).  aux_params/aux_weights: off-grid auxiliary nodes near the
    singularity.  interp: (n_aux, N) cardinal matrix so the auxiliary values of
    a sampled smooth factor are interp @ samples.
    """

    target_index: int
    n: int
    reg_indices: np.ndarray
    reg_weights: np.ndarray
    aux_params: np.ndarray
    aux_weights: np.ndarray
    interp: np.ndarray


def singular_row_weights(rule: QuadratureRule, target_index: int, n: int) -> SingularRow:
    """Build the composite row for a singularity at node target_index of an
    N-node periodic grid."""
    if rule.kind != "hybrid-log-16":
        raise QuadratureError("singular rows are defined for the hybrid rule only")
    a = rule.skip
    if n < 2 * a + 2:
        raise QuadratureError(
            f"N={n} too small for the excluded window of {a} nodes per side")
    h = 2.0 * np.pi / n
    chi_max = float(rule.aux_nodes.max())
    if chi_max * h >= np.pi:
        raise QuadratureError(
            f"N={n} too small: auxiliary nodes would wrap past half the period")
    alpha_i = h * target_index
    offsets = np.arange(a, n - a + 1)
    reg_indices = (target_index + offsets) % n
    reg_weights = np.full(offsets.shape, h)
    aux_params = np.concatenate([alpha_i + rule.aux_nodes * h,
                                 alpha_i - rule.aux_nodes * h])
    aux_weights = np.concatenate([rule.aux_weights, rule.aux_weights]) * h
    alphas = h * np.arange(n)
    interp = periodic_cardinal(n, aux_params[:, None] - alphas[None, :])
    return SingularRow(target_index=target_index, n=n,
                       reg_indices=reg_indices, reg_weights=reg_weights,
                       aux_params=aux_params, aux_weights=aux_weights,
                       interp=interp)


def apply_singular_row(row: SingularRow, fn) -> float:
    """Integrate a callable f(alpha) over the period with the composite rule."""
    h = 2.0 * np.pi / row.n
    reg = sum(w * fn(h * j) for j, w in zip(row.reg_indices, row.reg_weights))
    aux = sum(w * fn(a) for a, w in zip(row.aux_params, row.aux_weights))
    return float(reg + aux)
