"""Drift families: the coupled amplitude/skewness system and drift evaluation.

A family pairs a drift amplitude psi(t) in [0, 1] with a skewness path
alpha(t) whose sign is fixed by the chirality.  The two are linked through
the log-derivative system

    Gamma'(t) = -(1 - psi(t)) / t,   Lambda(t) = C * exp(Gamma(t)),
    alpha(t)  = chirality * Lambda(t) / sqrt(1 - t * Lambda(t)^2),

valid while t * Lambda(t)^2 < 1.  Three closed-form members are provided
(finite-horizon, constant-skew, constant-correlation) plus a quadrature
solver for arbitrary amplitude paths.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.optimize import brentq

from .dists import mills
from .errors import HorizonError

VALID_KINDS = ("horizon", "constant_skew", "constant_correlation", "general", "ou_htransform", "custom")


@dataclass(frozen=True)
class SkewFamily:
    """Immutable amplitude/skewness pair with a validity horizon.

    `psi` and `alpha` accept scalars or arrays.  `alpha_dot` is the exact
    time derivative when a closed form exists (None for numeric families,
    where finite differences apply).
    """

    psi: Callable
    alpha: Callable
    chirality: int
    family_constant: float
    validity_horizon: float
    kind: str
    params: dict = field(default_factory=dict)
    alpha_dot: Optional[Callable] = None

    def __post_init__(self):
        if self.chirality not in (-1, 1):
            raise ValueError("chirality must be +1 or -1")
        if self.family_constant < 0:
            raise ValueError("family constant must be nonnegative")

    def check_time(self, t):
        tmax = float(np.max(t))
        if tmax >= self.validity_horizon:
            raise HorizonError(
                f"t={tmax} is at or beyond the validity horizon {self.validity_horizon}")

    def descriptor(self) -> dict:
        """JSON-serializable description {kind, parameters, chirality, horizon}."""
        return {
            "kind": self.kind,
            "parameters": self.params,
            "chirality": self.chirality,
            "horizon": self.validity_horizon if math.isfinite(self.validity_horizon) else "inf",
        }

    def to_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)


def family_from_descriptor(desc: dict) -> SkewFamily:
    kind = desc.get("kind")
    params = desc.get("parameters", {})
    chirality = int(desc.get("chirality", 1))
    if kind == "horizon":
        return horizon_family(params["T"], chirality)
    if kind == "constant_skew":
        return constant_skew_family(params["alpha"], chirality)
    if kind == "constant_correlation":
        return constant_correlation_family(params["C"], chirality)
    if kind == "general":
        horizon = desc.get("horizon", "inf")
        horizon = math.inf if horizon == "inf" else float(horizon)
        return _family_from_gamma_table(
            C=float(params["C"]), chirality=chirality,
            t_nodes=np.asarray(params["t"], dtype=float),
            psi_vals=np.asarray(params["psi"], dtype=float),
            gamma=np.asarray(params["gamma"], dtype=float),
            horizon=horizon)
    raise ValueError(f"unknown family kind {kind!r}")


def _family_from_gamma_table(C, chirality, t_nodes, psi_vals, gamma, horizon):
    """Rebuild a numeric family from its serialized log-growth table."""
    spline = CubicHermiteSpline(np.log(t_nodes), gamma, -(1.0 - psi_vals))
    psi_interp = CubicSpline(t_nodes, psi_vals)
    logC = math.log(C) if C > 0 else -math.inf
    lo, hi = float(t_nodes[0]), float(t_nodes[-1])

    def alpha(t):
        t = np.asarray(t, dtype=float)
        if np.any(t < lo) or np.any(t > hi):
            raise HorizonError(f"numeric family only evaluable on [{lo:g}, {hi:g}]")
        lam = np.exp(logC + spline(np.log(t)))
        under = 1.0 - t * lam * lam
        if np.any(under <= 0):
            raise HorizonError("evaluation at or beyond the validity horizon")
        return chirality * lam / np.sqrt(under)

    def psi(t):
        return np.clip(psi_interp(np.asarray(t, dtype=float)), 0.0, 1.0)

    return SkewFamily(psi=psi, alpha=alpha, chirality=chirality,
                      family_constant=float(C), validity_horizon=horizon,
                      kind="general",
                      params={"C": float(C), "t": np.asarray(t_nodes).tolist(),
                              "psi": np.asarray(psi_vals).tolist(),
                              "gamma": np.asarray(gamma).tolist()})


def horizon_family(T: float, chirality: int = 1) -> SkewFamily:
    """Finite-horizon family: unit amplitude, skewness 1/sqrt(T - t).

    The drift is the exact harmonic-function transform of Brownian motion
    that pins the terminal law at time T to a half-normal; the skewness
    blows up as t -> T, which is the validity horizon.
    """
    if not T > 0:
        raise ValueError(f"horizon T must be positive, got {T}")
    chirality = int(chirality)

    def psi(t):
        return np.ones_like(np.asarray(t, dtype=float))

    def alpha(t):
        t = np.asarray(t, dtype=float)
        return chirality / np.sqrt(T - t)

    def alpha_dot(t):
        t = np.asarray(t, dtype=float)
        return chirality * 0.5 * (T - t) ** -1.5

    return SkewFamily(psi=psi, alpha=alpha, chirality=chirality,
                      family_constant=1.0 / math.sqrt(T), validity_horizon=float(T),
                      kind="horizon", params={"T": float(T)}, alpha_dot=alpha_dot)


def constant_skew_family(alpha_const: float, chirality: int = 1) -> SkewFamily:
    """Constant-skewness family; the amplitude decays from 1 toward 1/2."""
    if not alpha_const > 0:
        raise ValueError(f"alpha_const must be positive, got {alpha_const}")
    chirality = int(chirality)
    a2 = alpha_const * alpha_const

    def psi(t):
        t = np.asarray(t, dtype=float)
        return 0.5 * (2.0 + a2 * t) / (1.0 + a2 * t)

    def alpha(t):
        t = np.asarray(t, dtype=float)
        return np.full_like(t, chirality * alpha_const)

    def alpha_dot(t):
        return np.zeros_like(np.asarray(t, dtype=float))

    return SkewFamily(psi=psi, alpha=alpha, chirality=chirality,
                      family_constant=float(alpha_const), validity_horizon=math.inf,
                      kind="constant_skew", params={"alpha": float(alpha_const)},
                      alpha_dot=alpha_dot)


def constant_correlation_family(C: float, chirality: int = 1) -> SkewFamily:
    """Half-amplitude family with skewness proportional to 1/sqrt(t).

    Matches a censoring construction with constant correlation C in [0, 1);
    C = 0 degenerates to plain Brownian motion.
    """
    if not 0 <= C < 1:
        raise ValueError(f"C must lie in [0, 1), got {C}")
    chirality = int(chirality)
    coef = C / math.sqrt(1.0 - C * C)

    def psi(t):
        return np.full_like(np.asarray(t, dtype=float), 0.5)

    def alpha(t):
        # diverges like 1/sqrt(t) at the origin; inf is the correct limit
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return chirality * coef / np.sqrt(t)

    def alpha_dot(t):
        t = np.asarray(t, dtype=float)
        return -0.5 * chirality * coef * t**-1.5

    return SkewFamily(psi=psi, alpha=alpha, chirality=chirality,
                      family_constant=float(C), validity_horizon=math.inf,
                      kind="constant_correlation", params={"C": float(C)},
                      alpha_dot=alpha_dot)


def _log_growth_nodes(psi, t_nodes, anchor_zero: bool):
    """Cumulative Gamma(t) = -int (1 - psi(s))/s ds at the given nodes.

    Anchored at 0 when the integrand is integrable there (psi(0+) = 1),
    otherwise at t = 1, which fixes the normalization e^Gamma(1) = 1 that
    the half-amplitude closed form uses.
    """

    def integrand(s):
        return (1.0 - float(psi(s))) / s

    gammas = np.empty(len(t_nodes))
    if anchor_zero:
        t0 = t_nodes[0]
        # series start on (0, t0]: psi ~ 1 - c*s makes the integrand ~ c
        c = integrand(t0)
        acc = -c * t0
        prev = t0
        gammas[0] = acc
        start = 1
    else:
        prev = 1.0
        acc = 0.0
        start = 0
    for i in range(start, len(t_nodes)):
        t = t_nodes[i]
        val, _ = quad(integrand, prev, t, epsabs=1e-13, epsrel=1e-11, limit=200)
        acc -= val
        gammas[i] = acc
        prev = t
    return gammas


def family_from_amplitude(psi: Callable, C: float, chirality: int,
                          t_grid) -> SkewFamily:
    """Solve the amplitude/skewness system numerically for a given psi.

    psi must map (0, max(t_grid)] into [0, 1].  Gamma is accumulated by
    adaptive quadrature on a dense log-spaced refinement of t_grid and
    interpolated with a cubic spline in log-time; the validity horizon is
    located by bisection on t * Lambda(t)^2 - 1.
    """
    if C < 0:
        raise ValueError(f"C must be nonnegative, got {C}")
    chirality = int(chirality)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing with >= 2 points")
    if t_grid[0] <= 0:
        raise ValueError("t_grid must start at a strictly positive time")

    t_hi = float(t_grid[-1])
    probe = float(psi(1e-9))
    anchor_zero = abs(1.0 - probe) < 1e-6
    t_lo = min(1e-6, float(t_grid[0]) / 10.0) if anchor_zero else min(float(t_grid[0]) / 10.0, 1e-4)

    nodes = np.unique(np.concatenate([
        np.geomspace(t_lo, t_hi, 2400),
        t_grid,
        [1.0] if (not anchor_zero and t_lo < 1.0 < t_hi) else [],
    ]))
    gam = _log_growth_nodes(psi, nodes, anchor_zero)
    # in tau = log t the slope is exactly -(1 - psi(t)); Hermite nodes pin it
    slopes = np.array([-(1.0 - float(psi(t))) for t in nodes])
    spline = CubicHermiteSpline(np.log(nodes), gam, slopes)
    logC = math.log(C) if C > 0 else -math.inf

    def log_lambda(t):
        t = np.asarray(t, dtype=float)
        return logC + spline(np.log(t))

    def alpha(t):
        t = np.asarray(t, dtype=float)
        if np.any(t < nodes[0]) or np.any(t > t_hi):
            raise HorizonError(f"numeric family only evaluable on [{nodes[0]:g}, {t_hi:g}]")
        lam = np.exp(log_lambda(t))
        under = 1.0 - t * lam * lam
        if np.any(under <= 0):
            raise HorizonError("evaluation at or beyond the validity horizon")
        return chirality * lam / np.sqrt(under)

    def psi_vec(t):
        t = np.asarray(t, dtype=float)
        return np.vectorize(lambda s: float(psi(s)))(t) if t.ndim else float(psi(float(t)))

    # horizon: first root of g(t) = t*Lambda^2 - 1 within the scanned range
    def g(t):
        lam = math.exp(float(log_lambda(t)))
        return t * lam * lam - 1.0

    gvals = nodes * np.exp(2.0 * (logC + gam)) - 1.0
    horizon = math.inf
    crossing = np.nonzero(gvals >= 0)[0]
    if C > 0 and len(crossing) > 0:
        j = crossing[0]
        if j == 0:
            horizon = float(nodes[0])
        else:
            horizon = brentq(g, nodes[j - 1], nodes[j], xtol=1e-10 * t_hi)
    elif C > 0 and abs(1.0 - float(psi(t_hi))) < 1e-9:
        # Lambda has flattened (unit amplitude at the edge): constant
        # extrapolation puts the crossing at 1/Lambda^2
        lam_end = math.exp(logC + gam[-1])
        est = 1.0 / (lam_end * lam_end)
        if est > t_hi:
            horizon = est

    # serialize a subsampled log-growth table so the family reconstructs
    # without re-solving
    step = max(1, len(nodes) // 240)
    idx = np.unique(np.r_[np.arange(0, len(nodes), step), len(nodes) - 1])
    return SkewFamily(psi=psi_vec, alpha=alpha, chirality=chirality,
                      family_constant=float(C), validity_horizon=horizon,
                      kind="general",
                      params={"C": float(C), "t": nodes[idx].tolist(),
                              "psi": [float(psi(t)) for t in nodes[idx]],
                              "gamma": gam[idx].tolist()})


def amplitude_from_family(family: SkewFamily, t, rel_step: float = 1e-6):
    """Recover psi(t) from alpha(t) through the inverse relation.

    Lambda = |alpha| / sqrt(1 + t alpha^2) and psi = 1 + t * dlogLambda/dt;
    the log-derivative is taken by centered differences.
    """
    t = np.asarray(t, dtype=float)

    def log_lam(s):
        a = np.abs(family.alpha(s))
        return np.log(a) - 0.5 * np.log1p(s * a * a)

    h = rel_step * np.maximum(t, 1e-3)
    dlog = (log_lam(t + h) - log_lam(t - h)) / (2.0 * h)
    return 1.0 + t * dlog


def ode_residual(family: SkewFamily, t, fd_step: float = 1e-4):
    """Residual of the skewness evolution equation at times t.

    The governing ODE (equivalent to the Gamma/Lambda system) is

        alpha' = psi * alpha * (alpha^2 + 1/t) - alpha/t - alpha^3 / 2,

    so the residual alpha' - psi*alpha*(alpha^2 + 1/t) + alpha/t + alpha^3/2
    vanishes identically on valid families.  alpha' uses the closed form
    when available, otherwise centered differences with step fd_step*t.
    """
    t = np.asarray(t, dtype=float)
    a = family.alpha(t)
    p = family.psi(t)
    if family.alpha_dot is not None:
        da = family.alpha_dot(t)
    else:
        h = fd_step * t
        da = (family.alpha(t + h) - family.alpha(t - h)) / (2.0 * h)
    return da - p * a * (a * a + 1.0 / t) + a / t + 0.5 * a**3


@dataclass(frozen=True)
class DriftSpec:
    """Named, evaluable drift built from a family or an OU transform.

    kind selects the formula:
      - "horizon": amplitude * alpha_t * mills(alpha_t * x / sigma); the
        raw state enters (the harmonic transform is shift-free, the initial
        condition only rescales the density normalization).
      - "constant_skew" / "general": same Mills form but evaluated at
        x - shift, the modified drift required for a nonzero start.
      - "ou_htransform": lam*x + chirality * sqrt(2 lam) *
        mills(chirality * sqrt(2 lam) * x); params = {"lam", "chirality"}.
      - "custom": user-supplied mu(x, t).
    """

    kind: str
    family: Optional[SkewFamily] = None
    shift: float = 0.0
    diffusion_scale: float = 1.0
    params: dict = field(default_factory=dict)
    mu_fn: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError(f"unknown drift kind {self.kind!r}")
        if not self.diffusion_scale > 0:
            raise ValueError("diffusion_scale must be positive")
        if self.kind in ("horizon", "constant_skew", "constant_correlation", "general"):
            if self.family is None:
                raise ValueError(f"kind {self.kind!r} requires a family")
        if self.kind == "ou_htransform":
            if "lam" not in self.params or "chirality" not in self.params:
                raise ValueError("ou_htransform requires params {'lam', 'chirality'}")
        if self.kind == "custom" and self.mu_fn is None:
            raise ValueError("custom drift requires mu_fn")

    @property
    def validity_horizon(self) -> float:
        if self.family is not None:
            return self.family.validity_horizon
        return math.inf

    def mu(self, x, t: float):
        return drift_value(self, x, t)

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "shift": self.shift, "sigma": self.diffusion_scale}
        if self.family is not None:
            d["family"] = self.family.descriptor()
        if self.params:
            d["parameters"] = self.params
        return d


def drift_spec_from_descriptor(desc: dict) -> DriftSpec:
    kind = desc["kind"]
    if kind == "custom":
        raise ValueError("custom drifts are not JSON-constructible")
    family = family_from_descriptor(desc["family"]) if "family" in desc else None
    return DriftSpec(kind=kind, family=family, shift=float(desc.get("shift", 0.0)),
                     diffusion_scale=float(desc.get("sigma", 1.0)),
                     params=desc.get("parameters", {}))


def drift_value(spec: DriftSpec, x, t: float):
    """Evaluate the drift mu(x, t); vectorized over x."""
    x = np.asarray(x, dtype=float)
    if spec.kind == "custom":
        return spec.mu_fn(x, t)
    if spec.kind == "ou_htransform":
        from .ou_skew import OuSkewSpec, ou_htransform_drift
        p = spec.params
        return ou_htransform_drift(x, OuSkewSpec(lam=p["lam"], chirality=p["chirality"]))
    fam = spec.family
    fam.check_time(t)
    a = fam.alpha(t)
    p = fam.psi(t)
    arg = x if spec.kind == "horizon" else x - spec.shift
    return p * a * mills(a * arg / spec.diffusion_scale)
