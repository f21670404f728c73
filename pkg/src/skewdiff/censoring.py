"""Censoring and selection-model representations of the skew drifts.

The Mills-ratio drift of every family equals a truncated-Gaussian
conditional mean, so each identity here is algebraic and is verified to
near machine precision; the simulation-facing helper estimates the
survivor-conditioned state density from a censored bivariate ensemble.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dists import mills
from .families import SkewFamily, DriftSpec, drift_value
from .sde import PathEnsemble


@dataclass(frozen=True)
class TruncatedNormalSpec:
    """One-sided truncation of a Gaussian: keep mass above or below threshold."""

    mean: float
    std: float
    threshold: float
    side: str = "above"

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError("std must be positive")
        if self.side not in ("above", "below"):
            raise ValueError("side must be 'above' or 'below'")


def truncated_normal_mean(spec: TruncatedNormalSpec) -> float:
    """E[z | z > a] (side='above') or E[z | z < a] for z ~ N(mean, std^2).

    Computed through the log-space Mills ratio, so thresholds 40 standard
    deviations into either tail are handled without over/underflow.
    """
    a = (spec.threshold - spec.mean) / spec.std
    if spec.side == "above":
        return spec.mean + spec.std * float(mills(-a))
    return spec.mean - spec.std * float(mills(a))


def verify_selection_representation(family: SkewFamily, x: float, t: float,
                                    shift: float = 0.0):
    """Compare the family drift with its selection-model form.

    The drift psi*alpha*mills(alpha*(x - shift)) equals psi*alpha times the
    mean of a unit Gaussian conditioned to exceed -(alpha*(x - shift)) for
    right chirality (mirrored to the below-side mean for left chirality).
    Returns (drift_direct, drift_via_selection, abs_diff).
    """
    kind = "horizon" if family.kind == "horizon" else "general"
    spec = DriftSpec(kind=kind, family=family, shift=shift)
    direct = float(drift_value(spec, np.asarray(x, dtype=float), t))

    a = float(family.alpha(t))
    p = float(family.psi(t))
    u = x if family.kind == "horizon" else x - shift
    if family.chirality > 0:
        sel_mean = truncated_normal_mean(
            TruncatedNormalSpec(mean=0.0, std=1.0, threshold=-a * u, side="above"))
        via = p * a * sel_mean
    else:
        sel_mean = truncated_normal_mean(
            TruncatedNormalSpec(mean=0.0, std=1.0, threshold=a * u, side="below"))
        via = p * (-a) * sel_mean
    return direct, via, abs(direct - via)


def verify_ou_selection(lam: float, x: float, chirality: int = 1):
    """Compare the OU-reversal drift with its censored-mean form.

    The representation that reproduces the drift identically is

        drift = -2 * E[z | z < 0] - lam * x   (right chirality)
        drift = -2 * E[z | z > 0] - lam * x   (left chirality)

    with z ~ N(-lam x, lam / 2): that variance matches the Mills argument
    sqrt(2 lam) x, and the factor two restores the Mills amplitude.  A
    single censored mean with variance lam/2 (or any other variance) is off
    by that factor; see ou_selection_discrepancy for the gap of the
    unweighted reading.  Returns (drift_direct, drift_via_selection, abs_diff).
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    from .ou_skew import OuSkewSpec, ou_htransform_drift
    direct = float(ou_htransform_drift(x, OuSkewSpec(lam=lam, chirality=chirality)))
    side = "below" if chirality > 0 else "above"
    censored = truncated_normal_mean(TruncatedNormalSpec(
        mean=-lam * x, std=math.sqrt(lam / 2.0), threshold=0.0, side=side))
    via = -2.0 * censored - lam * x
    return direct, via, abs(direct - via)


def ou_selection_discrepancy(lam: float, x: float, chirality: int = 1) -> float:
    """Gap |drift - (-E[z|z<0])| for the unweighted censored mean with
    z ~ N(-lam x, 2/lam).  Nonzero in general; reported, not asserted."""
    from .ou_skew import OuSkewSpec, ou_htransform_drift
    direct = float(ou_htransform_drift(x, OuSkewSpec(lam=lam, chirality=chirality)))
    side = "below" if chirality > 0 else "above"
    censored = truncated_normal_mean(TruncatedNormalSpec(
        mean=-lam * x, std=math.sqrt(2.0 / lam), threshold=0.0, side=side))
    return abs(direct - (-censored))


def silverman_bandwidth(samples: np.ndarray) -> float:
    sd = float(np.std(samples, ddof=1))
    return 1.06 * sd * len(samples) ** (-0.2)


def posterior_from_censored_sim(ensemble_x: PathEnsemble, ensemble_y: PathEnsemble,
                                t_index: int, bandwidth: Optional[float] = None,
                                x_grid: Optional[np.ndarray] = None):
    """Kernel-density estimate of X at a recorded time, keeping only paths
    whose Y value is nonnegative there.

    Gaussian kernel; bandwidth defaults to the Silverman rule.  Returns
    (x_grid, density, survivor_fraction, n_survivors).  Raises when fewer
    than 1000 paths survive, since the estimate is meaningless below that.
    """
    xs = ensemble_x.values[:, t_index]
    ys = ensemble_y.values[:, t_index]
    keep = ys >= 0.0
    n_surv = int(keep.sum())
    if n_surv < 1000:
        raise ValueError(f"only {n_surv} survivors at t_index={t_index}; need >= 1000")
    sel = xs[keep]
    frac = n_surv / len(xs)
    bw = bandwidth if bandwidth is not None else silverman_bandwidth(sel)
    if x_grid is None:
        pad = 4.0 * bw
        x_grid = np.linspace(sel.min() - pad, sel.max() + pad, 801)
    x_grid = np.asarray(x_grid, dtype=float)
    # binned KDE: exact Gaussian smoothing of a fine histogram
    z = (x_grid[:, None] - sel[None, :]) / bw if len(sel) * len(x_grid) <= 2_000_000 else None
    if z is not None:
        dens = np.exp(-0.5 * z * z).sum(axis=1) / (len(sel) * bw * math.sqrt(2 * math.pi))
    else:
        edges = np.linspace(sel.min() - 6 * bw, sel.max() + 6 * bw, 4097)
        counts, _ = np.histogram(sel, bins=edges)
        centers = 0.5 * (edges[:-1] + edges[1:])
        zz = (x_grid[:, None] - centers[None, :]) / bw
        dens = (np.exp(-0.5 * zz * zz) * counts[None, :]).sum(axis=1) \
            / (len(sel) * bw * math.sqrt(2 * math.pi))
    return x_grid, dens, frac, n_surv
