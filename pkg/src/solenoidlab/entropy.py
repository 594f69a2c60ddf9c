"""Multiscale entropy, the entropy-slope dimension estimator, porosity
statistics, and convolution entropy-growth experiments.

All entropies are Shannon entropies over b-adic partitions in base-b
logarithms, so a measure filling one unit cell satisfies 0 <= H(level n) <= n
with equality exactly at level-n uniformity.  The dimension estimator fits a
least-squares slope of H(level) over a window of levels rather than a single
ratio: at desk scale the limit's additive constants would otherwise dominate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .measures import DiscreteMeasure, convolve


def _entropy_of_weights(w: np.ndarray, b: int) -> float:
    w = w[w > 0]
    if b == 2:
        return float(-(w * np.log2(w)).sum())
    return float(-(w * (np.log(w) / math.log(b))).sum())


def entropy(mu: DiscreteMeasure, level: int) -> float:
    """Base-b Shannon entropy of the level-coarsening of mu."""
    if level > mu.level:
        raise ValueError("level must not exceed the measure's resolution")
    return _entropy_of_weights(mu.coarsen(level).weights, mu.b)


def cond_entropy(mu: DiscreteMeasure, fine_level: int, coarse_level: int) -> float:
    """H(mu, fine | coarse) = H(mu, fine) - H(mu, coarse) for nested levels;
    equals the mass-weighted average of component entropies."""
    if fine_level < coarse_level:
        raise ValueError("fine_level must be >= coarse_level")
    return entropy(mu, fine_level) - entropy(mu, coarse_level)


# ---------------------------------------------------------------------------
# dimension estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyProfile:
    """Per-level entropies with the regression slope as dimension estimate."""

    levels: tuple[int, ...]
    entropies: tuple[float, ...]
    slope: float
    intercept: float
    slope_window: tuple[int, int]
    residuals: tuple[float, ...]
    increments: tuple[float, ...]

    def to_rows(self) -> list[tuple[int, float]]:
        return list(zip(self.levels, self.entropies))


def dimension_estimate(
    mu_builder: Callable[[int], DiscreteMeasure] | DiscreteMeasure,
    levels,
) -> EntropyProfile:
    """Least-squares slope of H(level) over the given window.

    ``mu_builder`` is either a level -> measure callable or a fixed measure
    resolved at least as deep as max(levels) (then coarsening is used).
    """
    levels = sorted(int(v) for v in levels)
    if len(levels) < 3:
        raise ValueError("need at least 3 levels")
    if len(set(levels)) != len(levels):
        raise ValueError("levels must be distinct")
    if isinstance(mu_builder, DiscreteMeasure):
        base = mu_builder

        def mu_builder(level, _m=base):  # noqa: F811 - closure over the measure
            return _m

    ents = []
    for lev in levels:
        mu = mu_builder(lev)
        ents.append(entropy(mu, lev))
    xs = np.asarray(levels, dtype=float)
    ys = np.asarray(ents)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    return EntropyProfile(
        levels=tuple(levels),
        entropies=tuple(float(v) for v in ents),
        slope=float(slope),
        intercept=float(intercept),
        slope_window=(levels[0], levels[-1]),
        residuals=tuple(float(v) for v in resid),
        increments=tuple(float(v) for v in np.diff(ys)),
    )


# ---------------------------------------------------------------------------
# entropy porosity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PorosityReport:
    h: float
    delta: float
    m: int
    level_range: tuple[int, int]
    fraction: float
    verdict: bool
    per_level: tuple[float, ...] = field(default=())


def _component_entropies(mu: DiscreteMeasure, i: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """(parent masses, component entropies at level i+m) over level-i cells."""
    child = mu.coarsen(i + m)
    parents = child.indices // (mu.b**m)
    order = np.argsort(parents, kind="stable")
    p = parents[order]
    w = child.weights[order]
    cut = np.flatnonzero(np.diff(p)) + 1
    starts = np.concatenate([[0], cut])
    masses = np.add.reduceat(w, starts)
    # H(component) = log_b(mass) - (1/mass) * sum w log_b w over the block
    wlog = w * np.log(w)
    sums = np.add.reduceat(wlog, starts)
    ents = (np.log(masses) - sums / masses) / math.log(mu.b)
    return masses, ents


def porosity_fraction(
    mu: DiscreteMeasure, h: float, delta: float, m: int, n1: int, n2: int
) -> PorosityReport:
    """Mass-weighted fraction of scale-i components, i in [n1, n2], whose
    normalized entropy (1/m) H(component, level i+m) falls below h + delta.

    The verdict is the porosity event: fraction > 1 - delta.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0 <= n1 <= n2:
        raise ValueError("need 0 <= n1 <= n2")
    if mu.level < n2 + m:
        raise ValueError("measure must be resolved to level n2 + m")
    per_level = []
    for i in range(n1, n2 + 1):
        masses, ents = _component_entropies(mu, i, m)
        below = ents / m < h + delta
        per_level.append(float(masses[below].sum()))
    fraction = float(np.mean(per_level))
    return PorosityReport(
        h=h,
        delta=delta,
        m=m,
        level_range=(n1, n2),
        fraction=fraction,
        verdict=fraction > 1.0 - delta,
        per_level=tuple(per_level),
    )


# ---------------------------------------------------------------------------
# convolution entropy growth
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthRecord:
    H_tau: float
    H_conv: float
    gain: float
    n: int
    k: int


def entropy_growth_experiment(
    theta: DiscreteMeasure, tau: DiscreteMeasure, n: int, k: int
) -> GrowthRecord:
    """Per-scale entropy gain of tau under convolution with theta.

    Both supports must fit in an interval of length b^-n; the gain is
    (H(theta * tau) - H(tau)) / k at level n + k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    bound = float(theta.b) ** (-n) * (1 + 1e-12)
    if theta.support_diameter() > bound or tau.support_diameter() > bound:
        raise ValueError("supports must have diameter <= b^-n")
    if tau.level < n + k or theta.level < n + k:
        raise ValueError("operands must be resolved to level n + k")
    H_tau = entropy(tau, n + k)
    conv = convolve(theta, tau, n + k)
    H_conv = _entropy_of_weights(conv.weights, conv.b)
    return GrowthRecord(H_tau=H_tau, H_conv=H_conv, gain=(H_conv - H_tau) / k, n=n, k=k)
