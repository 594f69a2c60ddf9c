"""Attractor rendering, box-counting dimension, and the function-graph bridge.

Box counting uses the same b-adic lattice as the entropy engine: at level l
the plane is cut into squares of side b^-l anchored at the origin, and the
estimate is the least-squares slope of log_b(occupied squares) against the
level.  Point clouds are streamed into an occupancy set at the finest level
and coarsened by integer division, so memory scales with the number of
occupied boxes.  Graphs of continuous functions get the exact column fill:
within one column the graph meets every box between the column minimum and
maximum, so per-column min/max of a dense sample yields the box count
without rasterizing segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .dynamics import attractor_points
from .periodic import PeriodicFn, eval as phi_eval, sup_norm
from .words import SystemParams


def predicted_dimension(b: int, gamma: float) -> float:
    """min(2, 1 + log b / log(1/gamma)): the attractor dimension in the
    non-degenerate regime."""
    if b < 2 or not 0.0 < gamma < 1.0:
        raise ValueError("need b >= 2 and gamma in (0, 1)")
    return min(2.0, 1.0 + math.log(b) / math.log(1.0 / gamma))


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RasterGrid:
    """Occupancy counts of orbit points on a width x height pixel grid."""

    width: int
    height: int
    y_min: float
    y_max: float
    counts: np.ndarray

    def occupied_fraction(self) -> float:
        return float((self.counts > 0).mean())

    def to_pgm(self, path) -> None:
        """Write a portable graymap (max-normalized, zero stays zero)."""
        peak = self.counts.max()
        img = np.zeros_like(self.counts, dtype=np.uint8)
        if peak > 0:
            img = np.ceil(self.counts / peak * 255.0).astype(np.uint8)
        with open(path, "wb") as fh:
            fh.write(f"P5\n{self.width} {self.height}\n255\n".encode())
            # row 0 at the top = largest y
            fh.write(img.T[::-1].tobytes())


def render_attractor(
    params: SystemParams, resolution: int, n_points: int, seed: int = 0
) -> RasterGrid:
    """Accumulate orbit-point occupancy on a resolution^2 grid over
    [0,1) x [-M, M], M the certified fiber bound."""
    if resolution < 2 or n_points < 1:
        raise ValueError("resolution and n_points must be positive")
    M = params.fiber_bound
    if M == 0.0:
        M = 1.0
    counts = np.zeros((resolution, resolution), dtype=np.int64)
    for xb, yb in attractor_points(params, n_points, seed=seed):
        ix = np.floor(xb * resolution).astype(np.int64)
        iy = np.floor((yb + M) / (2.0 * M) * resolution).astype(np.int64)
        np.clip(iy, 0, resolution - 1, out=iy)
        np.add.at(counts, (ix, iy), 1)
    return RasterGrid(resolution, resolution, -M, M, counts)


# ---------------------------------------------------------------------------
# box counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxCountResult:
    levels: tuple[int, ...]
    counts: tuple[int, ...]
    slope: float
    intercept: float
    residuals: tuple[float, ...]

    def to_rows(self):
        return list(zip(self.levels, self.counts))


def _fit(levels, counts, b) -> BoxCountResult:
    xs = np.asarray(levels, dtype=float)
    ys = np.log(np.asarray(counts, dtype=float)) / math.log(b)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    return BoxCountResult(
        tuple(int(v) for v in levels),
        tuple(int(v) for v in counts),
        float(slope),
        float(intercept),
        tuple(float(v) for v in resid),
    )


def _occupied_keys(xb: np.ndarray, yb: np.ndarray, level: int, b: int) -> np.ndarray:
    scale = float(b) ** level
    ix = np.floor(xb * scale).astype(np.int64)
    iy = np.floor(yb * scale).astype(np.int64)
    return np.unique((ix << 32) ^ (iy + (1 << 31)))


def box_count_dimension(
    points: np.ndarray | Iterable[tuple[np.ndarray, np.ndarray]],
    levels,
    b: int = 2,
) -> BoxCountResult:
    """Box-counting estimate for a planar point set.

    ``points`` is an (N, 2) array or an iterable of (x_block, y_block)
    chunks.  Requires >= 3 levels and a spread of at least two cells at the
    coarsest level.
    """
    levels = sorted(int(v) for v in levels)
    if len(levels) < 3:
        raise ValueError("need at least 3 levels")
    lmax = levels[-1]
    if lmax > int(30 / math.log2(b)):
        raise ValueError("finest level too deep for packed box keys")
    if isinstance(points, np.ndarray):
        pts = np.asarray(points, dtype=float)
        chunks: Iterable = [(pts[:, 0], pts[:, 1])]
    else:
        chunks = points
    keys = None
    for xb, yb in chunks:
        k = _occupied_keys(np.asarray(xb, dtype=float), np.asarray(yb, dtype=float), lmax, b)
        keys = k if keys is None else np.union1d(keys, k)
    if keys is None or len(keys) == 0:
        raise ValueError("no points supplied")
    ix = keys >> 32
    iy = (keys ^ (ix << 32)) - (1 << 31)
    counts = []
    for lev in levels:
        f = b ** (lmax - lev)
        counts.append(len(np.unique(((ix // f) << 32) ^ ((iy // f) + (1 << 31)))))
    if counts[0] < 2:
        raise ValueError("points span fewer than 2 cells at the coarsest level")
    return _fit(levels, counts, b)


def box_count_graph(xs: np.ndarray, ys: np.ndarray, levels, b: int = 2) -> BoxCountResult:
    """Box counts of the graph of a continuous function sampled densely.

    Within a column the graph meets every box between the column min and
    max, so counts are sums of per-column index ranges.
    """
    levels = sorted(int(v) for v in levels)
    if len(levels) < 3:
        raise ValueError("need at least 3 levels")
    lmax = levels[-1]
    ncol = b**lmax
    scale = float(ncol)
    col = np.floor(np.asarray(xs, dtype=float) * scale).astype(np.int64)
    col = np.clip(col, 0, ncol - 1)
    iy = np.floor(np.asarray(ys, dtype=float) * scale).astype(np.int64)
    top = np.full(ncol, np.iinfo(np.int64).min)
    bot = np.full(ncol, np.iinfo(np.int64).max)
    np.maximum.at(top, col, iy)
    np.minimum.at(bot, col, iy)
    filled = top >= bot
    if not filled.all():
        raise ValueError("every finest-level column needs at least one sample")
    counts = []
    for lev in levels:
        f = b ** (lmax - lev)
        t2 = (top.reshape(-1, f).max(axis=1)) // f
        b2 = (bot.reshape(-1, f).min(axis=1)) // f
        counts.append(int((t2 - b2 + 1).sum()))
    return _fit(levels, counts, b)


def attractor_box_count(
    params: SystemParams, n_points: int, levels, seed: int = 0
) -> BoxCountResult:
    """Box-count the attractor from streamed orbit samples."""
    return box_count_dimension(
        attractor_points(params, n_points, seed=seed), levels, b=params.b
    )


# ---------------------------------------------------------------------------
# Weierstrass-type graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeierstrassGraph:
    xs: np.ndarray
    ys: np.ndarray
    lam: float
    b: int
    predicted_dim: float
    terms: int


def weierstrass_graph(
    psi: PeriodicFn, lam: float, b: int, resolution: int, tol: float = 1e-8
) -> WeierstrassGraph:
    """Sample the graph of sum_n lam^n psi(b^n x) on [0, 1).

    The series is truncated once lam^n sup|psi| drops below tol; the
    predicted graph dimension is 2 + log(lam) / log(b).
    """
    if b < 2:
        raise ValueError("b must be an integer >= 2")
    if not 1.0 / b < lam < 1.0:
        raise ValueError("lambda must lie in (1/b, 1)")
    m = sup_norm(psi, 0)
    terms = 1
    amp = lam * m
    while amp > tol and terms < 512:
        amp *= lam
        terms += 1
    xs = (np.arange(resolution) + 0.5) / resolution
    ys = np.zeros(resolution)
    arg = xs.copy()
    coef = 1.0
    for _ in range(terms):
        ys += coef * phi_eval(psi, arg)
        arg = (b * arg) % 1.0
        coef *= lam
    dim = 2.0 + math.log(lam) / math.log(b)
    return WeierstrassGraph(xs, ys, lam, b, dim, terms)
