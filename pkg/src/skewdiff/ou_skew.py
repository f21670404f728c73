"""Ornstein-Uhlenbeck extensions: reversal transforms and skew noise drivers.

Covers the harmonic reweighting that turns a mean-reverting process into a
skew diffusion (drift lam*x + a Mills term), the mixture that reassembles
the repulsive OU law from the two chiralities, the mean-reverting system
driven by finite-horizon skew noise, and the state transform that maps a
state-dependent diffusion coefficient to unit scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .dists import LOG_SQRT_2PI, mills, std_normal_cdf, std_normal_logcdf
from .errors import SkewDiffError
from .sde import (PathEnsemble, SimConfig, TimeGrid, _BLOCK_SIZE, _TAG_PRIMARY,
                  _check_finite, _run_blocks, _stream)


@dataclass(frozen=True)
class OuSkewSpec:
    """Mean-reversion rate, skew side, and starting point."""

    lam: float
    chirality: int = 1
    x0: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.chirality not in (-1, 1):
            raise ValueError("chirality must be +1 or -1")


def ou_htransform_drift(x, spec: OuSkewSpec):
    """Drift lam*x + chirality * sqrt(2 lam) * mills(chirality sqrt(2 lam) x).

    Equals lam*x + exp(-lam x^2) / (Gaussian mass below chirality*x at rate
    lam), with the Mills term evaluated in log space so the disfavored tail
    (where the ratio grows like 2*lam*|x|) stays finite.  The left-chirality
    Mills term carries a negative sign, which is what the mirror law and
    integrability require.
    """
    x = np.asarray(x, dtype=float)
    s = math.sqrt(2.0 * spec.lam)
    return spec.lam * x + spec.chirality * s * mills(spec.chirality * s * x)


def ou_h_log(x, t, spec: OuSkewSpec):
    """log of the harmonic factor e^{-lam t} e^{lam x^2} Phi(chir sqrt(2lam) x)."""
    x = np.asarray(x, dtype=float)
    s = math.sqrt(2.0 * spec.lam)
    return -spec.lam * t + spec.lam * x * x + std_normal_logcdf(spec.chirality * s * x)


def ou_h(x, t, spec: OuSkewSpec):
    """Harmonic factor of the reversal transform; a unit-mean martingale of
    the mean-reverting process when normalized by its starting value.

    Raises on overflow (lam * x^2 beyond ~700 cannot be exponentiated);
    use ou_h_log for ratios in that regime.
    """
    logs = ou_h_log(x, t, spec)
    if np.any(logs > 709.0):
        raise SkewDiffError("ou_h overflows for lam*x^2 > ~709; use ou_h_log")
    return np.exp(logs)


def ou_mixture_probability(lam: float, x: float):
    """Chirality weights (p_minus, p_plus) = Gaussian masses at rate lam
    below -x and x; they sum to one exactly."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    s = math.sqrt(2.0 * lam)
    p_plus = float(std_normal_cdf(s * x))
    return 1.0 - p_plus, p_plus


def stationary_ou_tpd(x, t: float, lam: float, x0: float):
    """Gaussian transition law of dX = -lam X dt + dW from x0."""
    x = np.asarray(x, dtype=float)
    m = x0 * math.exp(-lam * t)
    v = (1.0 - math.exp(-2.0 * lam * t)) / (2.0 * lam)
    return np.exp(-0.5 * (x - m) ** 2 / v - 0.5 * math.log(v) - LOG_SQRT_2PI)


def repulsive_ou_tpd(x, t: float, lam: float, x0: float):
    """Gaussian transition law of the unstable counterpart dX = +lam X dt + dW."""
    x = np.asarray(x, dtype=float)
    m = x0 * math.exp(lam * t)
    v = (math.exp(2.0 * lam * t) - 1.0) / (2.0 * lam)
    return np.exp(-0.5 * (x - m) ** 2 / v - 0.5 * math.log(v) - LOG_SQRT_2PI)


def ou_identity_residual(lam: float, x0: float, x_grid, t_values) -> float:
    """Max-abs gap in the reversal identity

        p_minus(lam, x0) * Q_minus + p_plus(lam, x0) * Q_plus = repulsive OU tpd,

    where Q_pm are the chirality transition laws (harmonic ratio times the
    stationary tpd).  The weighted harmonic ratios sum to exactly
    e^{-lam t} e^{lam (x^2 - x0^2)}, which converts the stationary law into
    the repulsive one, so the identity is exact; a single time factor,
    already inside each harmonic factor, is the correct bookkeeping.
    """
    from .densities import ou_htransform_tpd_raw
    p_minus, p_plus = ou_mixture_probability(lam, x0)
    x = np.asarray(x_grid, dtype=float)
    worst = 0.0
    for t in np.atleast_1d(t_values):
        t = float(t)
        mix = (p_minus * ou_htransform_tpd_raw(x, t, lam, x0, chirality=-1)
               + p_plus * ou_htransform_tpd_raw(x, t, lam, x0, chirality=+1))
        target = repulsive_ou_tpd(x, t, lam, x0)
        worst = max(worst, float(np.max(np.abs(mix - target))))
    return worst


def simulate_ou_skew_noise(lam: float, x0: float, T: float, grid: TimeGrid,
                           cfg: SimConfig):
    """Integrate the coupled pair: Z follows the finite-horizon skew SDE
    (right chirality, horizon T) and X follows dX = -lam X dt + dZ.

    X is driven by the *same* increments dZ, not by fresh noise -- the pair
    is a degenerate two-dimensional diffusion with a single Gaussian source,
    and splitting the streams would change the law of X.  Returns the
    (X, Z) ensembles.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    if grid.t_end - grid.terminal_cutoff_epsilon > T + 1e-12:
        raise SkewDiffError("grid reaches the noise horizon; shorten it or add a cutoff")
    if grid.n_steps % cfg.record_stride:
        raise ValueError("record_stride must divide n_steps")
    dt = grid.dt
    sqdt = math.sqrt(dt)
    times = grid.times()
    n_rec = grid.n_steps // cfg.record_stride + 1
    xv = np.empty((cfg.n_paths, n_rec))
    zv = np.empty((cfg.n_paths, n_rec))
    chunk_size = 512

    def worker(blk):
        lo, hi = blk
        m = hi - lo
        rng = _stream(cfg.seed, _TAG_PRIMARY, lo // _BLOCK_SIZE)
        z = np.zeros(m)
        x = np.full(m, float(x0))
        xv[lo:hi, 0] = x
        zv[lo:hi, 0] = z
        step = 0
        while step < grid.n_steps:
            chunk = min(chunk_size, grid.n_steps - step)
            noise = rng.standard_normal((chunk, m))
            for j in range(chunk):
                t = times[step + j]
                a = 1.0 / math.sqrt(T - t)
                dz = a * mills(a * z) * dt + sqdt * noise[j]
                x = x + (-lam * x) * dt + dz
                z = z + dz
                k = step + j + 1
                if k % cfg.record_stride == 0:
                    xv[lo:hi, k // cfg.record_stride] = x
                    zv[lo:hi, k // cfg.record_stride] = z
            step += chunk
            _check_finite(x, step, lo)

    _run_blocks(worker, cfg.n_paths, cfg.n_threads)
    ens_x = PathEnsemble(grid=grid, values=xv, seed=cfg.seed, record_stride=cfg.record_stride)
    ens_z = PathEnsemble(grid=grid, values=zv, seed=cfg.seed, record_stride=cfg.record_stride)
    return ens_x, ens_z


def lamperti_map(sigma_fn, z: float, t: float, anchor: float = 0.0) -> float:
    """State transform int_anchor^z du / sigma(u, t) by adaptive quadrature.

    Maps a diffusion with state-dependent coefficient sigma to unit
    diffusion scale.  sigma_fn must stay positive on the integration range.
    """
    lo, hi = (anchor, z) if z >= anchor else (z, anchor)
    probe = np.linspace(lo, hi, 33)
    vals = np.array([float(sigma_fn(u, t)) for u in probe])
    if np.any(vals <= 0):
        raise ValueError("sigma must be positive on the integration range")
    val, _ = quad(lambda u: 1.0 / float(sigma_fn(u, t)), anchor, z,
                  epsabs=1e-12, epsrel=1e-10, limit=200)
    return float(val)


def lamperti_skew_factor(sigma_fn, z: float, t: float, alpha_t: float,
                         anchor: float = 0.0) -> float:
    """Reweighting factor Phi(alpha_t * Psi(z, t)) carried by a process
    whose driver is a skew diffusion rather than Brownian motion, with Psi
    the state transform above (normalized-cdf reading)."""
    return float(std_normal_cdf(alpha_t * lamperti_map(sigma_fn, z, t, anchor)))
