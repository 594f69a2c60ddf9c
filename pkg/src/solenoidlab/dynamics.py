"""Orbit iteration and attractor sampling for the skew product.

The map is (x, y) -> (b x mod 1, gamma y + phi(x)).  In double precision the
base map consumes log2(b) mantissa bits of x per step, so a raw orbit turns
into deterministic garbage after ~52/log2(b) steps.  The sampler therefore
re-randomizes the low-order bits of x on a fixed cadence: every
``reseed_every`` steps it adds a seeded uniform perturbation of size
``reseed_scale``.  Lebesgue measure is invariant for the base map, so the
x-statistics are unaffected; the y-recursion always uses the realized x, and
the perturbation enters y only through phi with weight <= sup|phi'| *
reseed_scale ~ 1e-7, far below any histogram cell used here.  The default
cadence (24 steps at scale 2^-26) keeps the float mantissa covered at every
step for b = 2; for b >= 3 rounding noise already provides mixing and the
injection merely makes it seeded.  Set ``reseed_every=0`` to switch the
policy off.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .periodic import eval as phi_eval
from .words import SystemParams

RESEED_EVERY = 24
RESEED_SCALE = 2.0**-26


@dataclass(frozen=True)
class OrbitSample:
    """Forward orbit points (x_k, y_k), k = burn_in .. burn_in + n - 1."""

    points: np.ndarray  # shape (n, 2)
    burn_in: int
    seed: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (n, 2)")
        if np.any(pts[:, 0] < 0.0) or np.any(pts[:, 0] >= 1.0):
            raise ValueError("x coordinates must lie in [0, 1)")
        object.__setattr__(self, "points", pts)

    def to_csv(self, path) -> None:
        np.savetxt(path, self.points, delimiter=",", fmt="%.17g")


def iterate_T(
    params: SystemParams,
    z0: tuple[float, float],
    n_burn: int,
    n_keep: int,
    seed: int = 0,
    reseed_every: int = RESEED_EVERY,
    reseed_scale: float = RESEED_SCALE,
) -> OrbitSample:
    """Forward orbit of a single point; points[k] = T^(n_burn + k)(z0)."""
    if n_keep < 1:
        raise ValueError("n_keep must be >= 1")
    rng = np.random.default_rng(seed)
    b, gam = params.b, params.gamma
    x = float(z0[0]) % 1.0
    y = float(z0[1])
    pts = np.empty((n_keep, 2))
    step = 0
    for k in range(n_burn + n_keep):
        if k >= n_burn:
            pts[k - n_burn] = (x, y)
        if reseed_every and step % reseed_every == 0 and step > 0:
            x = (x + rng.random() * reseed_scale) % 1.0
        y = gam * y + phi_eval(params.phi, x)
        x = (b * x) % 1.0
        step += 1
    return OrbitSample(pts, n_burn, seed)


def attractor_points(
    params: SystemParams,
    n_points: int,
    seed: int = 0,
    n_chains: int = 4096,
    burn_in: int = 256,
    steps_per_block: int = 32,
    reseed_every: int = RESEED_EVERY,
    reseed_scale: float = RESEED_SCALE,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Stream attractor samples as (x_block, y_block) chunks.

    Runs an ensemble of chains in lockstep and yields their points in blocks
    of n_chains * steps_per_block until n_points have been produced.
    Deterministic for fixed arguments.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.default_rng(seed)
    b, gam = params.b, params.gamma
    x = rng.random(n_chains)
    y = np.zeros(n_chains)
    step = 0

    def advance():
        nonlocal x, y, step
        if reseed_every and step % reseed_every == 0 and step > 0:
            x = (x + rng.random(n_chains) * reseed_scale) % 1.0
        y = gam * y + phi_eval(params.phi, x)
        x = (b * x) % 1.0
        step += 1

    for _ in range(burn_in):
        advance()

    produced = 0
    xs = np.empty((steps_per_block, n_chains))
    ys = np.empty((steps_per_block, n_chains))
    while produced < n_points:
        for i in range(steps_per_block):
            xs[i] = x
            ys[i] = y
            advance()
        xb = xs.reshape(-1)
        yb = ys.reshape(-1)
        if produced + xb.size > n_points:
            keep = n_points - produced
            xb, yb = xb[:keep], yb[:keep]
        produced += xb.size
        yield xb.copy(), yb.copy()
