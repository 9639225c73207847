"""Conical (Mehler) Legendre function machinery for the screened surface Laplacian.

Everything here is real arithmetic.  For degree nu = -1/2 + i*tau the two
hypergeometric parameters a = -nu and b = nu + 1 are complex conjugates, so
every series coefficient

    (a)_n (b)_n / (n!)^2 = prod_{j<n} [ (j+1/2)^2 + tau^2 ] / (j+1)^2

is real and positive, and P_nu, dP_nu/dx are computed without ever touching a
complex-degree Legendre routine.

Three evaluation regimes cover (-1, 1]:

* direct series in w = (1-x)/2 for w <= switch_w,
* the logarithmic-case hypergeometric expansion in xi = (1+x)/2 close to the
  singular endpoint x = -1 (the c - a - b = 0 case, coefficients paired into
  real values through the conjugate digamma sum),
* a Mehler-Dirichlet quadrature backstop for large tau*theta, where the
  log-case expansion loses ~2*tau*theta/ln(10) digits to cancellation and
  double precision gives out.  The integrand is positive and exp-scaled, so
  this path is uniformly stable in tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, SingularityError

__all__ = [
    "YukawaDegree",
    "SeriesPolicy",
    "conical_p",
    "conical_p_deriv",
    "digamma_conjugate_sum",
    "fundamental_solution",
]

# Distance from the log singularity at x = -1 below which evaluations are
# rejected: such arguments indicate coincident source/target points upstream.
SINGULAR_CUTOFF = 1e-12

# Regime boundary between the log-case series and the quadrature backstop,
# in units of tau * (angular distance of x from -1).  At 3.0 the log-case
# series still carries ~13 correct digits.
_LOG_WINDOW = 3.0

# Fixed Gauss-Legendre rule on [0, pi/2] for the Mehler-Dirichlet integral.
_MD_NODES = 160
_glx, _glw = np.polynomial.legendre.leggauss(_MD_NODES)
_MD_X = 0.25 * np.pi * (_glx + 1.0)
_MD_W = 0.25 * np.pi * _glw
del _glx, _glw


@dataclass(frozen=True)
class YukawaDegree:
    """Parameter bundle for a fixed PDE parameter k.

    tau, c_k and the components of nu = -1/2 + i*tau are derived from k at
    construction; k <= 1/2 is rejected (the conical regime needs Im(nu) != 0).
    """

    k: float
    tau: float = field(init=False)
    c_k: float = field(init=False)
    nu_real: float = field(init=False)
    nu_imag: float = field(init=False)

    def __post_init__(self):
        k = float(self.k)
        if not k > 0.5:
            raise DomainError(f"PDE parameter must satisfy k > 1/2, got k={k}")
        if not math.isfinite(k):
            raise DomainError("PDE parameter k must be finite")
        tau = math.sqrt(4.0 * k * k - 1.0) / 2.0
        # 1/(4 cosh(pi tau)) without overflow for large tau
        e = math.exp(-math.pi * tau)
        c_k = 0.5 * e / (1.0 + e * e)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "c_k", c_k)
        object.__setattr__(self, "nu_real", -0.5)
        object.__setattr__(self, "nu_imag", tau)


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation controls for the hypergeometric series branches."""

    rel_tol: float = 1e-14
    max_terms: int = 300
    switch_w: float = 0.75

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1e-10:
            raise DomainError(f"rel_tol must lie in (0, 1e-10), got {self.rel_tol}")
        if self.max_terms < 50:
            raise DomainError(f"max_terms must be >= 50, got {self.max_terms}")
        if not 0.5 <= self.switch_w < 1.0:
            raise DomainError(f"switch_w must lie in [0.5, 1), got {self.switch_w}")


DEFAULT_POLICY = SeriesPolicy()


def _digamma_real(a: float) -> float:
    """psi(a) for real a > 0: upward recurrence, then the asymptotic tail."""
    s = 0.0
    while a < 10.0:
        s -= 1.0 / a
        a += 1.0
    inv = 1.0 / a
    inv2 = inv * inv
    # Bernoulli corrections through z^-12
    tail = inv2 * (1 / 12.0 - inv2 * (1 / 120.0 - inv2 * (1 / 252.0 - inv2 * (
        1 / 240.0 - inv2 * (1 / 132.0 - inv2 * (691.0 / 32760.0))))))
    return s + math.log(a) - 0.5 * inv - tail


def digamma_conjugate_sum(tau: float, n: int) -> float:
    """Re psi(1/2 + i*tau + n), the real digamma datum of the conjugate pair.

    Equals (psi(a+n) + psi(b+n))/2 for a = 1/2 - i*tau, b = 1/2 + i*tau.
    Upward recurrence until |z| > 10, then the Bernoulli asymptotic series.
    """
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    z = complex(0.5 + n, tau)
    s = 0.0
    while abs(z) < 10.0:
        s -= (1.0 / z).real
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    tail = inv2 * (1 / 12.0 - inv2 * (1 / 120.0 - inv2 * (1 / 252.0 - inv2 * (
        1 / 240.0 - inv2 * (1 / 132.0 - inv2 * (691.0 / 32760.0))))))
    val = np.log(z) - 0.5 * inv - tail
    return s + float(val.real)


def _direct_series(tau, w, policy, out_p, out_dp, idx):
    """Sum the hypergeometric series at w = (1-x)/2 <= switch_w.

    All terms are nonnegative, so the summation is cancellation-free for
    every tau.  Writes P into out_p[idx] and dP/dx into out_dp[idx].
    """
    tau2 = tau * tau
    term = np.ones_like(w)
    p = np.ones_like(w)
    dp = np.zeros_like(w)
    converged = False
    for n in range(1, policy.max_terms + 1):
        coef = ((n - 0.5) ** 2 + tau2) / (n * n)
        dterm = term * coef          # d_n * w^(n-1)
        term = dterm * w             # d_n * w^n
        p += term
        dp += n * dterm
        if n > 2 and np.all(term <= policy.rel_tol * p):
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"direct series not converged in {policy.max_terms} terms",
            last_term=float(np.max(term)),
        )
    out_p[idx] = p
    out_dp[idx] = -0.5 * dp


def _log_case_series(tau, xi, policy, out_p, out_dp, idx):
    """Logarithmic-case expansion around x = -1, xi = (1+x)/2.

    P(x) = (cosh(pi tau)/pi) * sum_n d_n xi^n [2 psi(n+1) - 2 Re psi(1/2+i tau+n)
    - log xi]; the digamma pair is real because the parameters are conjugate.
    """
    tau2 = tau * tau
    lx = np.log(xi)
    # cosh(pi tau)/pi; overflows only for tau >~ 226, where the function value
    # itself overflows as well.
    pref = math.cosh(math.pi * tau) / math.pi
    dn = 1.0
    hn = 2.0 * _digamma_real(1.0) - 2.0 * digamma_conjugate_sum(tau, 0)
    p = hn - lx                      # n = 0 term
    dp = -1.0 / xi                   # n = 0 of sum d_n xi^(n-1) [n(h-l) - 1]
    xin = np.ones_like(xi)
    converged = False
    for n in range(1, policy.max_terms + 1):
        dn *= ((n - 0.5) ** 2 + tau2) / (n * n)
        hn += 2.0 / n - 2.0 * (n - 0.5) / ((n - 0.5) ** 2 + tau2)
        xin = xin * xi
        term = dn * xin * (hn - lx)
        p += term
        dp += dn * (xin / xi) * (n * (hn - lx) - 1.0)
        if n > 2 and np.all(np.abs(term) <= policy.rel_tol * np.abs(p)):
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"log-case series not converged in {policy.max_terms} terms",
            last_term=float(np.max(np.abs(term))),
        )
    out_p[idx] = pref * p
    out_dp[idx] = 0.5 * pref * dp


def _mehler_dirichlet(tau, x, out_p, out_dp, idx):
    """Mehler-Dirichlet integral with the endpoint singularity substituted away.

    With sin(t/2) = sin(theta/2) sin(chi),

        P(cos theta) = (2/pi) int_0^{pi/2} cosh(tau t(chi)) / cos(t(chi)/2) dchi,

    evaluated with cosh scaled by exp(-tau theta) so no intermediate overflows
    or cancellations occur.
    """
    th = np.arccos(x)
    sh = np.sin(0.5 * th)[:, None]
    s = sh * np.sin(_MD_X)[None, :]
    t = 2.0 * np.arcsin(s)
    c = np.sqrt(1.0 - s * s)
    e1 = np.exp(tau * (t - th[:, None]))
    e2 = np.exp(-tau * (t + th[:, None]))
    scale = np.exp(tau * th)
    p_scaled = (2.0 / math.pi) * ((0.5 * (e1 + e2) / c) @ _MD_W)
    dtdth = np.cos(0.5 * th)[:, None] * np.sin(_MD_X)[None, :] / c
    integ = (tau * 0.5 * (e1 - e2) / c + 0.5 * (e1 + e2) * 0.5 * s / (c * c)) * dtdth
    dpdth_scaled = (2.0 / math.pi) * (integ @ _MD_W)
    out_p[idx] = scale * p_scaled
    out_dp[idx] = -scale * dpdth_scaled / np.sin(th)


def conical_batch(deg: YukawaDegree, x: np.ndarray,
                  policy: SeriesPolicy = DEFAULT_POLICY):
    """Vectorized P_nu(x) and dP_nu/dx over an array of arguments in (-1, 1].

    This is the workhorse behind conical_p / conical_p_deriv and the kernel
    assembly.  Arguments within SINGULAR_CUTOFF of -1 are rejected.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x > 1.0) or np.any(x <= -1.0 + SINGULAR_CUTOFF):
        bad = x[(x > 1.0) | (x <= -1.0 + SINGULAR_CUTOFF)][0]
        raise DomainError(
            f"argument {bad!r} outside (-1 + {SINGULAR_CUTOFF}, 1]")
    tau = deg.tau
    p = np.empty_like(x)
    dp = np.empty_like(x)
    w = 0.5 * (1.0 - x)
    theta_sep = 2.0 * np.arcsin(np.sqrt(np.clip(0.5 * (1.0 + x), 0.0, 1.0)))
    direct = w <= policy.switch_w
    log_case = ~direct & (tau * theta_sep <= _LOG_WINDOW)
    mehler = ~direct & ~log_case
    if direct.any():
        _direct_series(tau, w[direct], policy, p, dp, direct)
    if log_case.any():
        _log_case_series(tau, 0.5 * (1.0 + x[log_case]), policy, p, dp, log_case)
    if mehler.any():
        _mehler_dirichlet(tau, x[mehler], p, dp, mehler)
    return p, dp


def conical_p(deg: YukawaDegree, x: float,
              policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """P_nu(x) = 2F1(-nu, nu+1; 1; (1-x)/2) for nu = -1/2 + i*tau, real valued.

    Domain (-1, 1]; diverges logarithmically at -1, so arguments within
    SINGULAR_CUTOFF of -1 raise DomainError.
    """
    p, _ = conical_batch(deg, np.array([float(x)]), policy)
    return float(p[0])


def conical_p_deriv(deg: YukawaDegree, x: float,
                    policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """dP_nu/dx by term-wise differentiation of the active series branch.

    Domain (-1, 1); the derivative blows up like 1/(1+x) at the left endpoint
    and evaluations within SINGULAR_CUTOFF of -1 raise DomainError.
    """
    x = float(x)
    if not x < 1.0:
        raise DomainError(f"derivative argument must satisfy x < 1, got {x}")
    _, dp = conical_batch(deg, np.array([x]), policy)
    return float(dp[0])


def fundamental_solution(deg: YukawaDegree, c: float,
                         policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """G_k between two surface points with inner product c = <x, x0>.

    Returns c_k * P_nu(-c).  Coincident points (c -> 1) are the logarithmic
    singularity and raise SingularityError.
    """
    c = float(c)
    if c >= 1.0 - SINGULAR_CUTOFF:
        raise SingularityError(
            f"fundamental solution evaluated at coincident points (<x,x0> = {c})")
    if c < -1.0:
        raise DomainError(f"inner product must lie in [-1, 1), got {c}")
    p, _ = conical_batch(deg, np.array([-c]), policy)
    return deg.c_k * float(p[0])


def fundamental_solution_batch(deg: YukawaDegree, c: np.ndarray,
                               policy: SeriesPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Vectorized G_k over an array of inner products, same contract as above."""
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if np.any(c >= 1.0 - SINGULAR_CUTOFF):
        raise SingularityError("fundamental solution evaluated at coincident points")
    p, _ = conical_batch(deg, -c, policy)
    return deg.c_k * p
