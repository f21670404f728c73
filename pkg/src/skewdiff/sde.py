"""Seeded Euler-Maruyama simulation with scheduling-independent noise.

Noise is drawn from counter-based Philox streams keyed by
(master seed, component tag, path block), so an ensemble is bitwise
reproducible for a fixed (seed, n_paths, grid) no matter how many worker
threads process the blocks.  Blocks have a fixed size independent of the
thread count; the path loop is embarrassingly parallel and each block
writes a disjoint slice of the output.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, TYPE_CHECKING

import numpy as np

from .dists import std_normal_cdf
from .errors import HorizonError, SimulationError

if TYPE_CHECKING:  # pragma: no cover
    from .families import DriftSpec

_BLOCK_SIZE = 8192          # paths per noise block; fixed so outputs never depend on threading
_STEP_CHUNK = 512           # steps drawn per RNG call, bounds scratch memory

# component tags for independent streams under one master seed
_TAG_PRIMARY = 0
_TAG_SECONDARY = 1
_TAG_LABELS = 2


def thread_count(requested: Optional[int] = None) -> int:
    """Worker threads to use; SKEWDIFF_THREADS caps/sets the default."""
    env = os.environ.get("SKEWDIFF_THREADS")
    if requested is None:
        return max(1, int(env)) if env else 1
    if env:
        return max(1, min(int(requested), int(env)))
    return max(1, int(requested))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform integration grid on [t_start, t_end - epsilon]."""

    t_start: float
    t_end: float
    n_steps: int
    terminal_cutoff_epsilon: float = 0.0

    def __post_init__(self):
        if self.t_start < 0:
            raise ValueError("t_start must be nonnegative")
        if self.n_steps < 1:
            raise ValueError("n_steps must be positive")
        if self.terminal_cutoff_epsilon < 0:
            raise ValueError("terminal cutoff must be nonnegative")
        if not self.t_end - self.terminal_cutoff_epsilon > self.t_start:
            raise ValueError("empty grid: t_end - epsilon must exceed t_start")

    @property
    def dt(self) -> float:
        return (self.t_end - self.terminal_cutoff_epsilon - self.t_start) / self.n_steps

    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class SimConfig:
    """Ensemble size, seed, and integration safeguards."""

    n_paths: int
    seed: int
    drift_clamp: float = 10.0
    antithetic: bool = False
    record_stride: int = 1
    n_threads: Optional[int] = None
    flip_noise: bool = False     # negate every Gaussian draw (mirror-law tests)

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not (self.drift_clamp > 0 and math.isfinite(self.drift_clamp)):
            raise ValueError("drift_clamp must be positive and finite")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.antithetic and self.n_paths % 2:
            raise ValueError("antithetic sampling needs an even n_paths")


@dataclass
class PathEnsemble:
    """Simulated trajectories at the recorded subset of grid times."""

    grid: TimeGrid
    values: np.ndarray            # n_paths x n_recorded
    seed: int
    scheme: str = "euler_maruyama"
    labels: Optional[np.ndarray] = None
    record_stride: int = 1
    clamp_events: int = 0

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.grid.times()[:: self.record_stride]

    def at_time(self, t: float) -> np.ndarray:
        """Column of path values at the recorded time closest to t."""
        times = self.times
        j = int(np.argmin(np.abs(times - t)))
        if abs(times[j] - t) > 0.5 * self.grid.dt * self.record_stride + 1e-12:
            raise ValueError(f"t={t} is not a recorded time")
        return self.values[:, j]


def _stream(seed: int, tag: int, block: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                    np.uint64((tag << 32) | block)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _blocks(n_paths: int):
    return [(b, min(n_paths, b + _BLOCK_SIZE)) for b in range(0, n_paths, _BLOCK_SIZE)]


def _draw_labels(seed: int, n_paths: int, p_plus: float) -> np.ndarray:
    out = np.empty(n_paths, dtype=np.int8)
    for lo, hi in _blocks(n_paths):
        u = _stream(seed, _TAG_LABELS, lo // _BLOCK_SIZE).random(hi - lo)
        out[lo:hi] = np.where(u < p_plus, 1, -1)
    return out


def _run_blocks(worker: Callable, n_paths: int, n_threads: Optional[int]):
    blocks = _blocks(n_paths)
    workers = thread_count(n_threads)
    if workers <= 1 or len(blocks) == 1:
        for blk in blocks:
            worker(blk)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(worker, blocks))


def _check_finite(x: np.ndarray, step: int, path_offset: int):
    if not np.all(np.isfinite(x)):
        bad = int(np.nonzero(~np.isfinite(x))[0][0])
        raise SimulationError(
            f"non-finite value at path {path_offset + bad}, step {step}",
            path_index=path_offset + bad, step_index=step)


def simulate(drift: "DriftSpec", x0: float, grid: TimeGrid, cfg: SimConfig,
             _labels: Optional[np.ndarray] = None,
             _drift_minus: Optional["DriftSpec"] = None) -> PathEnsemble:
    """Euler-Maruyama integration of dX = mu(X, t) dt + sigma dW.

    Per-step drift increments are clamped at cfg.drift_clamp in magnitude
    (events counted on the ensemble); sigma is drift.diffusion_scale.
    When `_labels`/`_drift_minus` are given (mixture use), paths labeled -1
    follow the second drift.
    """
    if grid.t_end - grid.terminal_cutoff_epsilon > drift.validity_horizon + 1e-12:
        raise HorizonError(
            f"grid reaches t={grid.t_end - grid.terminal_cutoff_epsilon} beyond the "
            f"drift validity horizon {drift.validity_horizon}")
    if _drift_minus is not None and \
            grid.t_end - grid.terminal_cutoff_epsilon > _drift_minus.validity_horizon + 1e-12:
        raise HorizonError("grid beyond the second drift's validity horizon")
    if grid.n_steps % cfg.record_stride:
        raise ValueError("record_stride must divide n_steps")

    dt = grid.dt
    sqdt = math.sqrt(dt)
    sigma = drift.diffusion_scale
    times = grid.times()
    n_rec = grid.n_steps // cfg.record_stride + 1
    values = np.empty((cfg.n_paths, n_rec))
    clamp_total = np.zeros(len(_blocks(cfg.n_paths)), dtype=np.int64)
    noise_sign = -1.0 if cfg.flip_noise else 1.0

    def worker(blk):
        lo, hi = blk
        m = hi - lo
        rng = _stream(cfg.seed, _TAG_PRIMARY, lo // _BLOCK_SIZE)
        x = np.full(m, float(x0))
        values[lo:hi, 0] = x
        lab = _labels[lo:hi] if _labels is not None else None
        clamps = 0
        step = 0
        while step < grid.n_steps:
            chunk = min(_STEP_CHUNK, grid.n_steps - step)
            z = rng.standard_normal((chunk, m))
            if cfg.antithetic:
                z[:, 1::2] = -z[:, 0::2]
            if noise_sign < 0:
                z = -z
            for j in range(chunk):
                t = times[step + j]
                if lab is None:
                    mu = drift.mu(x, t)
                else:
                    mu = np.where(lab > 0, drift.mu(x, t), _drift_minus.mu(x, t))
                inc = mu * dt
                over = np.abs(inc) > cfg.drift_clamp
                if over.any():
                    clamps += int(over.sum())
                    inc = np.clip(inc, -cfg.drift_clamp, cfg.drift_clamp)
                x = x + inc + sigma * sqdt * z[j]
                k = step + j + 1
                if k % cfg.record_stride == 0:
                    values[lo:hi, k // cfg.record_stride] = x
            step += chunk
            _check_finite(x, step, lo)
        clamp_total[lo // _BLOCK_SIZE] = clamps

    _run_blocks(worker, cfg.n_paths, cfg.n_threads)
    return PathEnsemble(grid=grid, values=values, seed=cfg.seed,
                        labels=None if _labels is None else _labels.copy(),
                        record_stride=cfg.record_stride,
                        clamp_events=int(clamp_total.sum()))


def simulate_mixture(drift_plus: "DriftSpec", drift_minus: "DriftSpec",
                     p_plus: float, x0: float, grid: TimeGrid,
                     cfg: SimConfig) -> PathEnsemble:
    """Each path draws a +-1 label with P(+1) = p_plus, then follows the
    corresponding drift; labels are recorded on the ensemble."""
    if not 0.0 <= p_plus <= 1.0:
        raise ValueError(f"p_plus must be a probability, got {p_plus}")
    labels = _draw_labels(cfg.seed, cfg.n_paths, p_plus)
    return simulate(drift_plus, x0, grid, cfg, _labels=labels, _drift_minus=drift_minus)


def simulate_bivariate_censoring(rho, grid: TimeGrid, cfg: SimConfig):
    """Driver pair (X, Y): X is standard Brownian and dY = rho dX +
    sqrt(1 - rho^2) dW2 with W2 independent, both started at zero.

    `rho` maps time to [-1, 1] (scalars accepted).  Returns the (X, Y)
    ensembles; Var X_t = Var Y_t = t in expectation and the covariance
    accumulates as the running integral of rho.
    """
    rho_fn = rho if callable(rho) else (lambda t, _r=float(rho): _r)
    times = grid.times()
    rho_vals = np.array([float(rho_fn(t)) for t in times[:-1]])
    if np.any(np.abs(rho_vals) > 1.0 + 1e-12):
        raise ValueError("|rho(t)| must not exceed 1 on the grid")
    rho_vals = np.clip(rho_vals, -1.0, 1.0)
    ortho = np.sqrt(1.0 - rho_vals**2)

    dt = grid.dt
    sqdt = math.sqrt(dt)
    if grid.n_steps % cfg.record_stride:
        raise ValueError("record_stride must divide n_steps")
    n_rec = grid.n_steps // cfg.record_stride + 1
    xv = np.empty((cfg.n_paths, n_rec))
    yv = np.empty((cfg.n_paths, n_rec))

    def worker(blk):
        lo, hi = blk
        m = hi - lo
        rng_x = _stream(cfg.seed, _TAG_PRIMARY, lo // _BLOCK_SIZE)
        rng_y = _stream(cfg.seed, _TAG_SECONDARY, lo // _BLOCK_SIZE)
        x = np.zeros(m)
        y = np.zeros(m)
        xv[lo:hi, 0] = x
        yv[lo:hi, 0] = y
        step = 0
        while step < grid.n_steps:
            chunk = min(_STEP_CHUNK, grid.n_steps - step)
            zx = rng_x.standard_normal((chunk, m))
            zy = rng_y.standard_normal((chunk, m))
            for j in range(chunk):
                k = step + j
                dx = sqdt * zx[j]
                x = x + dx
                y = y + rho_vals[k] * dx + ortho[k] * sqdt * zy[j]
                if (k + 1) % cfg.record_stride == 0:
                    xv[lo:hi, (k + 1) // cfg.record_stride] = x
                    yv[lo:hi, (k + 1) // cfg.record_stride] = y
            step += chunk
            _check_finite(x, step, lo)
            _check_finite(y, step, lo)

    _run_blocks(worker, cfg.n_paths, cfg.n_threads)
    ens_x = PathEnsemble(grid=grid, values=xv, seed=cfg.seed, record_stride=cfg.record_stride)
    ens_y = PathEnsemble(grid=grid, values=yv, seed=cfg.seed, record_stride=cfg.record_stride)
    return ens_x, ens_y


def mixture_probability(x0: float, T: float):
    """Label probabilities (p_minus, p_plus) that recombine the two
    opposite-chirality finite-horizon diffusions into Brownian motion.

    p_plus = Phi(x0 / sqrt(T)); the pair sums to one, which is exactly the
    normalization the pointwise recombination identity requires.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    p_plus = float(std_normal_cdf(x0 / math.sqrt(T)))
    return 1.0 - p_plus, p_plus
