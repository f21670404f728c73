"""Closed-form transition and marginal densities, evaluated in log space.

Every skewed density here is a Gaussian kernel times a Gaussian-cdf factor;
exponentiation happens last so ratios of near-zero tail masses stay finite.
Grids record their trapezoid mass per time slice rather than assuming
normalization: the unshifted general-family kernel genuinely loses mass for
a nonzero start, and that deviation is itself a tested signature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .dists import (ExtendedSkewNormalParams, LOG_SQRT_2PI, esn_logpdf,
                    std_normal_logcdf, std_normal_logpdf)
from .errors import HorizonError
from .families import SkewFamily


@dataclass
class DensityGrid:
    """Discretized density values q(x_i, t_j) with mass bookkeeping."""

    x_nodes: np.ndarray
    t_nodes: np.ndarray
    values: np.ndarray                 # len(t_nodes) x len(x_nodes)
    mass_per_t: np.ndarray = field(init=False)

    def __post_init__(self):
        self.x_nodes = np.asarray(self.x_nodes, dtype=float)
        self.t_nodes = np.asarray(self.t_nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.t_nodes), len(self.x_nodes)):
            raise ValueError("values must be |t| x |x|")
        self.mass_per_t = np.trapezoid(self.values, self.x_nodes, axis=1)

    def slice_at(self, t: float) -> np.ndarray:
        j = int(np.argmin(np.abs(self.t_nodes - t)))
        return self.values[j]

    def moments(self):
        """Trapezoid (mass, mean, variance, skewness) per time slice."""
        out = []
        for row, mass in zip(self.values, self.mass_per_t):
            mean = np.trapezoid(row * self.x_nodes, self.x_nodes) / mass
            var = np.trapezoid(row * (self.x_nodes - mean) ** 2, self.x_nodes) / mass
            m3 = np.trapezoid(row * (self.x_nodes - mean) ** 3, self.x_nodes) / mass
            out.append((float(mass), float(mean), float(var), float(m3 / var**1.5)))
        return out


def density_grid(fn, x_nodes, t_nodes) -> DensityGrid:
    """Tabulate fn(x_array, t) over the grid."""
    x_nodes = np.asarray(x_nodes, dtype=float)
    t_nodes = np.atleast_1d(np.asarray(t_nodes, dtype=float))
    values = np.empty((len(t_nodes), len(x_nodes)))
    for j, t in enumerate(t_nodes):
        values[j] = fn(x_nodes, float(t))
    return DensityGrid(x_nodes=x_nodes, t_nodes=t_nodes, values=values)


def _gauss_logpdf(x, mean, var):
    return -0.5 * (x - mean) ** 2 / var - 0.5 * np.log(var) - LOG_SQRT_2PI


def horizon_tpd(x, t: float, x0: float, T: float, chirality: int = 1):
    """Transition density of the finite-horizon skew diffusion from x0.

    Gaussian(x0, t) kernel reweighted by the harmonic-function ratio
    Phi(c * x / sqrt(T - t)) / Phi(c * x0 / sqrt(T)); mass is preserved for
    every starting point.  Valid for 0 < t < T.
    """
    if not 0 < t < T:
        raise HorizonError(f"t must lie in (0, {T}), got {t}")
    x = np.asarray(x, dtype=float)
    a_t = chirality / math.sqrt(T - t)
    a_0 = chirality / math.sqrt(T)
    logq = (_gauss_logpdf(x, x0, t)
            + std_normal_logcdf(a_t * x) - std_normal_logcdf(a_0 * x0))
    return np.exp(logq)


def horizon_tpd_two_time(x, t: float, x_prev: float, t_prev: float, T: float,
                         chirality: int = 1):
    """General two-time kernel of the finite-horizon diffusion.

    Same harmonic-ratio structure with skewness evaluated at the absolute
    times, which is what makes the kernel an exact semigroup.
    """
    if not 0 <= t_prev < t < T:
        raise HorizonError(f"need 0 <= t_prev < t < T, got ({t_prev}, {t}, {T})")
    x = np.asarray(x, dtype=float)
    a_t = chirality / math.sqrt(T - t)
    a_p = chirality / math.sqrt(T - t_prev)
    logq = (_gauss_logpdf(x, x_prev, t - t_prev)
            + std_normal_logcdf(a_t * x) - std_normal_logcdf(a_p * x_prev))
    return np.exp(logq)


def constant_skew_tpd(x, t: float, alpha: float, chirality: int = 1):
    """Marginal law of the constant-skew diffusion started at zero: a
    skew-normal with scale sqrt(t) and shape chirality*alpha*sqrt(t)."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    z = x / math.sqrt(t)
    logq = (math.log(2.0) - 0.5 * math.log(t) + std_normal_logpdf(z)
            + std_normal_logcdf(chirality * alpha * x))
    return np.exp(logq)


def family_tpd(x, t: float, family: SkewFamily, x0: float = 0.0):
    """Marginal law of a general-family diffusion with the shift rule.

    The cdf factor is evaluated at alpha_t * (x - x0): the drift of a
    nonzero-start process must carry the same shift, and this is the density
    that stays normalized for every x0.
    """
    family.check_time(t)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    a_t = float(family.alpha(t))
    logq = (math.log(2.0) - 0.5 * math.log(t) + std_normal_logpdf((x - x0) / math.sqrt(t))
            + std_normal_logcdf(a_t * (x - x0)))
    return np.exp(logq)


def family_tpd_unshifted(x, t: float, family: SkewFamily, x0: float,
                         t0: float = 0.0):
    """Naive nonzero-start kernel with an unshifted cdf factor.

    Gaussian(x0, t - t0) times Phi(alpha_t x)/Phi(alpha_t0 x0).  For unit
    drift amplitude this is the exact two-time law; otherwise it is only a
    local-martingale reweighting and its mass measurably deviates from one
    when x0 != 0 (a negative control, not a usable density).
    """
    family.check_time(t)
    if not t > t0 >= 0:
        raise ValueError("need t > t0 >= 0")
    x = np.asarray(x, dtype=float)
    a_t = float(family.alpha(t))
    a_0 = float(family.alpha(t0))   # t0 = 0 requires a family with finite alpha(0)
    logq = (_gauss_logpdf(x, x0, t - t0)
            + std_normal_logcdf(a_t * x) - std_normal_logcdf(a_0 * x0))
    return np.exp(logq)


def restart_tpd(x, t: float, x_prev: float, t_prev: float, family: SkewFamily):
    """Chained one-step kernel: the shifted family law restarted at
    (x_prev, t_prev) with elapsed time t - t_prev.

    Each slice is a genuine probability density, but the chain is not a
    semigroup unless the drift amplitude is identically one, so this kernel
    serves as the negative control in semigroup-consistency checks.
    """
    return family_tpd(x, t - t_prev, family, x0=x_prev)


def censored_posterior(x, t: float, rho_t: float):
    """Density of X_t given Y_t >= 0 for a centered bivariate-Gaussian pair
    with common variance t and correlation rho_t."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not abs(rho_t) < 1:
        raise ValueError("|rho_t| must be < 1 (degenerate limit is half-normal)")
    x = np.asarray(x, dtype=float)
    coef = rho_t / math.sqrt(1.0 - rho_t * rho_t)
    z = x / math.sqrt(t)
    logq = (math.log(2.0) - 0.5 * math.log(t) + std_normal_logpdf(z)
            + std_normal_logcdf(coef * z))
    return np.exp(logq)


def _ou_growing_moments(t: float, lam: float, x0: float):
    m_plus = x0 * math.exp(lam * t)
    s2_plus = (math.exp(2.0 * lam * t) - 1.0) / (2.0 * lam)
    return m_plus, s2_plus


def ou_htransform_tpd(x, t: float, lam: float, x0: float, chirality: int = 1):
    """Transition density of the OU-reversal skew diffusion, as an extended
    skew-normal law.

    Location/scale are the growing-OU moments x0*exp(lam t) and
    sqrt((exp(2 lam t) - 1)/(2 lam)); the shape is chirality *
    sqrt(exp(2 lam t) - 1) and the truncation chirality * sqrt(2 lam) * x0 *
    exp(lam t).  Matches the raw integral-ratio form pointwise.
    """
    if not (t > 0 and lam > 0):
        raise ValueError("t and lam must be positive")
    x = np.asarray(x, dtype=float)
    m_plus, s2_plus = _ou_growing_moments(t, lam, x0)
    k_t = math.sqrt(math.expm1(2.0 * lam * t))
    p = ExtendedSkewNormalParams(location=m_plus, scale=math.sqrt(s2_plus),
                                 shape=chirality * k_t,
                                 truncation=chirality * math.sqrt(2.0 * lam) * m_plus)
    return np.exp(esn_logpdf(x, p))


def ou_htransform_tpd_raw(x, t: float, lam: float, x0: float, chirality: int = 1):
    """Unsimplified form of the same law: growing-OU Gaussian times the
    ratio of Gaussian masses below chirality*x and chirality*x0.  Ground
    truth for the ESN parameter mapping."""
    if not (t > 0 and lam > 0):
        raise ValueError("t and lam must be positive")
    x = np.asarray(x, dtype=float)
    m_plus, s2_plus = _ou_growing_moments(t, lam, x0)
    s = math.sqrt(2.0 * lam)
    logq = (_gauss_logpdf(x, m_plus, s2_plus)
            + std_normal_logcdf(chirality * s * x) - std_normal_logcdf(chirality * s * x0))
    return np.exp(logq)


def ou_skew_driven_marginal(x, t: float, lam: float, x0: float, T: float):
    """Marginal law of a mean-reverting system driven by the finite-horizon
    skew noise (shared increments, right chirality).

    The pair (system, noise) is the harmonic reweighting of a degenerate
    Gaussian pair, so the marginal is the decaying-OU Gaussian times
    2*Phi(k(t) (x - m)), with

        k(t) = (2 / (1 + e^{-lam t})) / sqrt(T - (2/lam) tanh(lam t / 2)).

    k(t) -> 1/sqrt(T - t) as lam -> 0, recovering the pure noise law.
    """
    if not (0 < t < T and lam > 0):
        raise ValueError("need 0 < t < T and lam > 0")
    x = np.asarray(x, dtype=float)
    u = math.exp(-lam * t)
    m_minus = x0 * u
    s2_minus = (1.0 - u * u) / (2.0 * lam)
    k = (2.0 / (1.0 + u)) / math.sqrt(T - (2.0 / lam) * math.tanh(0.5 * lam * t))
    logq = (_gauss_logpdf(x, m_minus, s2_minus) + math.log(2.0)
            + std_normal_logcdf(k * (x - m_minus)))
    return np.exp(logq)


def chapman_kolmogorov_residual(tpd, x0: float, t0: float, t1: float, t2: float,
                                x2_grid) -> float:
    """Sup over x2 of |Q(x2,t2|x0,t0) - int Q(x2,t2|x1,t1) Q(x1,t1|x0,t0) dx1|.

    `tpd(x, t, x_prev, t_prev)` must accept general two-time arguments.  The
    inner integral runs over the whole line by adaptive quadrature.
    """
    if not t0 < t1 < t2:
        raise ValueError("need t0 < t1 < t2")
    x2_grid = np.atleast_1d(np.asarray(x2_grid, dtype=float))
    # Gaussian-tailed integrand: a wide finite window is exact at 1e-12
    span = 10.0 * math.sqrt(t2 - t0) + 5.0
    lo = min(float(np.min(x2_grid)), x0) - span
    hi = max(float(np.max(x2_grid)), x0) + span
    worst = 0.0
    for x2 in x2_grid:
        direct = float(tpd(x2, t2, x0, t0))

        def integrand(x1):
            return float(tpd(x2, t2, x1, t1)) * float(tpd(x1, t1, x0, t0))

        composed, _ = quad(integrand, lo, hi, points=[x0, float(x2)],
                           epsabs=1e-12, epsrel=1e-10, limit=300)
        worst = max(worst, abs(direct - composed))
    return worst


def density_mass(fn, t: float, lo: float = None, hi: float = None,
                 center: float = 0.0, width: float = None) -> float:
    """Adaptive-quadrature mass of a density slice x -> fn(x, t)."""
    if lo is None or hi is None:
        w = width if width is not None else 12.0 * math.sqrt(max(t, 1e-12)) + 8.0
        lo = center - w if lo is None else lo
        hi = center + w if hi is None else hi

    def integrand(x):
        return float(np.asarray(fn(x, t)))

    val, _ = quad(integrand, lo, hi, points=[center], epsabs=1e-11,
                  epsrel=1e-10, limit=300)
    return float(val)
