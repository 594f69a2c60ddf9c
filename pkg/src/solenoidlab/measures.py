"""Discrete probability measures on b-adic partitions of the line.

A measure lives at a fixed level n: mass sits on cells [j/b^n, (j+1)/b^n),
stored as a sorted table of int64 cell indices with positive weights that
sum to one.  Levels are capped so that index arithmetic stays exact in
float64 (b^level <= 2^45).  All builders accumulate per-chunk histograms and
merge them associatively, so results are deterministic for fixed seeds and
independent of chunk scheduling.

Affine images deposit each source cell's mass at the image of the cell
midpoint; the induced atom displacement is at most |a| b^(-level) / 2 and is
folded into the reported bounds wherever an operation is compared against an
exact enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .periodic import eval as phi_eval
from .series import eval_S, iter_series_all_words
from .words import SystemParams, Word

WORK_BUDGET = 10**8
_CHUNK = 1 << 20


@dataclass(frozen=True)
class BAdicCell:
    """The interval [index / b^level, (index + 1) / b^level)."""

    b: int
    level: int
    index: int

    def interval(self) -> tuple[float, float]:
        w = float(self.b) ** (-self.level)
        return self.index * w, (self.index + 1) * w

    def contains(self, value: float) -> bool:
        lo, hi = self.interval()
        return lo <= value < hi


def cell_of(value: float, b: int, level: int) -> BAdicCell:
    return BAdicCell(b, level, int(math.floor(value * b**level)))


class _Hist:
    """Associative accumulator of (index, weight) tables."""

    def __init__(self):
        self.idx: np.ndarray | None = None
        self.w: np.ndarray | None = None

    def add(self, idx: np.ndarray, w: np.ndarray) -> None:
        if self.idx is None:
            u, inv = np.unique(idx, return_inverse=True)
            acc = np.zeros(len(u))
            np.add.at(acc, inv, w)
            self.idx, self.w = u, acc
            return
        cat = np.concatenate([self.idx, idx])
        wat = np.concatenate([self.w, w])
        u, inv = np.unique(cat, return_inverse=True)
        acc = np.zeros(len(u))
        np.add.at(acc, inv, wat)
        self.idx, self.w = u, acc

    def add_values(self, values: np.ndarray, w: np.ndarray, b: int, level: int) -> None:
        idx = np.floor(values * float(b) ** level).astype(np.int64)
        self.add(idx, w)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure resolved on the level-n b-adic partition."""

    b: int
    level: int
    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        w = np.asarray(self.weights, dtype=float)
        if idx.shape != w.shape or idx.ndim != 1:
            raise ValueError("indices and weights must be aligned vectors")
        if len(idx) == 0:
            raise ValueError("measure must have nonempty support")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if not np.all(np.diff(idx) > 0):
            order = np.argsort(idx, kind="stable")
            idx, w = idx[order], w[order]
            if np.any(np.diff(idx) == 0):
                u, inv = np.unique(idx, return_inverse=True)
                acc = np.zeros(len(u))
                np.add.at(acc, inv, w)
                idx, w = u, acc
        keep = w > 0
        idx, w = idx[keep], w[keep]
        total = w.sum()
        if not total > 0:
            raise ValueError("total mass must be positive")
        w = w / total
        idx.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)

    # ------------------------------------------------------------ builders
    @classmethod
    def from_cells(cls, b: int, level: int, indices, weights) -> "DiscreteMeasure":
        _check_level(b, level)
        return cls(b, level, np.asarray(indices), np.asarray(weights))

    @classmethod
    def from_values(cls, b: int, level: int, values, weights=None) -> "DiscreteMeasure":
        _check_level(b, level)
        values = np.asarray(values, dtype=float)
        if weights is None:
            weights = np.full(values.shape, 1.0 / values.size)
        idx = np.floor(values * float(b) ** level).astype(np.int64)
        return cls(b, level, idx, np.asarray(weights, dtype=float))

    @classmethod
    def dirac(cls, b: int, level: int, value: float) -> "DiscreteMeasure":
        return cls.from_values(b, level, np.array([value]), np.array([1.0]))

    @classmethod
    def uniform_unit(cls, b: int, level: int) -> "DiscreteMeasure":
        """Lebesgue on [0, 1) resolved at the given level."""
        _check_level(b, level)
        n = b**level
        return cls(b, level, np.arange(n, dtype=np.int64), np.full(n, 1.0 / n))

    # ----------------------------------------------------------- accessors
    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def midpoints(self) -> np.ndarray:
        return (self.indices + 0.5) / float(self.b) ** self.level

    def support_diameter(self) -> float:
        w = float(self.b) ** (-self.level)
        return float((self.indices[-1] - self.indices[0] + 1) * w)

    def as_dict(self) -> dict[int, float]:
        return {int(i): float(v) for i, v in zip(self.indices, self.weights)}

    def coarsen(self, level: int) -> "DiscreteMeasure":
        if level > self.level:
            raise ValueError("can only coarsen to a coarser level")
        if level == self.level:
            return self
        f = self.b ** (self.level - level)
        return DiscreteMeasure(self.b, level, self.indices // f, self.weights)

    def mass_in(self, cell: BAdicCell) -> float:
        if cell.b != self.b or cell.level > self.level:
            raise ValueError("cell must be a coarsening-compatible b-adic cell")
        f = self.b ** (self.level - cell.level)
        sel = self.indices // f == cell.index
        return float(self.weights[sel].sum())

    # ------------------------------------------------------------------ io
    def to_csv(self, path) -> None:
        rows = np.column_stack(
            [np.full(len(self.indices), self.level), self.indices, self.weights]
        )
        np.savetxt(path, rows, delimiter=",", fmt=["%d", "%d", "%.17g"])

    @classmethod
    def from_csv(cls, path, b: int) -> "DiscreteMeasure":
        rows = np.loadtxt(path, delimiter=",", ndmin=2)
        levels = rows[:, 0].astype(int)
        if len(set(levels.tolist())) != 1:
            raise ValueError("measure table must use a single level")
        return cls(b, int(levels[0]), rows[:, 1].astype(np.int64), rows[:, 2])


@dataclass(frozen=True)
class ComponentMeasure:
    """A measure conditioned on one b-adic cell and renormalized."""

    parent: DiscreteMeasure
    cell: BAdicCell
    measure: DiscreteMeasure


def _check_level(b: int, level: int) -> None:
    if level < 0:
        raise ValueError("level must be nonnegative")
    if level > int(45 / math.log2(b)):
        raise ValueError(f"level {level} too deep for exact base-{b} cell indices")


# ---------------------------------------------------------------------------
# fiber-measure builders
# ---------------------------------------------------------------------------

def build_mx_empirical(
    params: SystemParams,
    x: float,
    level: int,
    n_samples: int,
    seed: int,
    chunk: int = _CHUNK,
) -> DiscreteMeasure:
    """Histogram of the word series over i.i.d. uniform words.

    Words are truncated at the system truncation depth; sampling is streamed
    in fixed chunks so the result is reproducible for a given seed.
    """
    _check_level(params.b, level)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    b, gam = params.b, params.gamma
    depth = params.truncation_depth
    scale = float(b) ** level
    hist = _Hist()
    done = 0
    while done < n_samples:
        m = int(min(chunk, n_samples - done))
        tau = np.full(m, float(x))
        vals = np.zeros(m)
        coef = 1.0
        for _ in range(depth):
            tau = (tau + rng.integers(0, b, m)) / b
            vals += coef * phi_eval(params.phi, tau)
            coef *= gam
        hist.add(np.floor(vals * scale).astype(np.int64), np.full(m, 1.0))
        done += m
    return DiscreteMeasure(params.b, level, hist.idx, hist.w)


def build_mx_exact(
    params: SystemParams,
    x: float,
    level: int,
    depth: int,
    work_budget: int = WORK_BUDGET,
) -> DiscreteMeasure:
    """Exact enumeration of all b^depth words with uniform weights.

    Equals the true fiber measure up to the series tail bound
    gamma^depth sup|phi| / (1 - gamma) in Levy distance.
    """
    _check_level(params.b, level)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if params.b**depth > work_budget:
        raise ValueError(f"b^depth = {params.b**depth} exceeds the work budget {work_budget}")
    scale = float(params.b) ** level
    hist = _Hist()
    total = params.b**depth
    for block in iter_series_all_words(params, x, depth):
        hist.add(np.floor(block * scale).astype(np.int64), np.full(len(block), 1.0 / total))
    return DiscreteMeasure(params.b, level, hist.idx, hist.w)


# ---------------------------------------------------------------------------
# measure algebra
# ---------------------------------------------------------------------------

def pushforward_affine(mu: DiscreteMeasure, a: float, c: float, out_level: int) -> DiscreteMeasure:
    """Image of mu under y -> a y + c, binned at out_level by cell midpoints.

    Midpoint deposition displaces each atom by at most |a| b^(-mu.level) / 2.
    Lattice-compatible maps (a = +-b^(-k), c on the target lattice) are exact.
    """
    if a == 0.0:
        raise ValueError("a must be nonzero")
    _check_level(mu.b, out_level)
    values = a * mu.midpoints() + c
    return DiscreteMeasure.from_values(mu.b, out_level, values, mu.weights)


def mix(components: list[tuple[float, DiscreteMeasure]]) -> DiscreteMeasure:
    """Weighted superposition of measures on a common lattice."""
    if not components:
        raise ValueError("need at least one component")
    ws = np.array([w for w, _ in components], dtype=float)
    if np.any(ws < 0):
        raise ValueError("mixture weights must be nonnegative")
    if abs(ws.sum() - 1.0) > 1e-9:
        raise ValueError("mixture weights must sum to 1")
    b = components[0][1].b
    level = components[0][1].level
    for _, m in components:
        if m.b != b or m.level != level:
            raise ValueError("components must share base and level")
    hist = _Hist()
    for w, m in components:
        if w > 0:
            hist.add(m.indices, w * m.weights)
    return DiscreteMeasure(b, level, hist.idx, hist.w)


def convolve(
    mu: DiscreteMeasure, nu: DiscreteMeasure, out_level: int, chunk: int = 1 << 22
) -> DiscreteMeasure:
    """Distribution of the independent sum, midpoint deposition at out_level."""
    if mu.b != nu.b:
        raise ValueError("operands must share the base")
    _check_level(mu.b, out_level)
    scale = float(mu.b) ** out_level
    mm, wm = mu.midpoints(), mu.weights
    nm, wn = nu.midpoints(), nu.weights
    rows = max(1, chunk // max(1, len(mm)))
    hist = _Hist()
    for start in range(0, len(nm), rows):
        sl = slice(start, start + rows)
        vals = (nm[sl][:, None] + mm[None, :]).reshape(-1)
        ws = (wn[sl][:, None] * wm[None, :]).reshape(-1)
        hist.add(np.floor(vals * scale).astype(np.int64), ws)
    return DiscreteMeasure(mu.b, out_level, hist.idx, hist.w)


def component(mu: DiscreteMeasure, cell: BAdicCell) -> ComponentMeasure:
    """Condition mu on a cell and renormalize."""
    if cell.b != mu.b:
        raise ValueError("base mismatch")
    if cell.level > mu.level:
        raise ValueError("cell must be at most as fine as the measure")
    f = mu.b ** (mu.level - cell.level)
    sel = mu.indices // f == cell.index
    mass = mu.weights[sel].sum()
    if not mass > 0:
        raise ValueError("cell carries no mass")
    cond = DiscreteMeasure(mu.b, mu.level, mu.indices[sel], mu.weights[sel])
    return ComponentMeasure(mu, cell, cond)


def total_variation(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """TV distance of two measures on the same lattice."""
    if mu.b != nu.b or mu.level != nu.level:
        raise ValueError("measures must share base and level")
    allidx = np.union1d(mu.indices, nu.indices)
    wm = np.zeros(len(allidx))
    wn = np.zeros(len(allidx))
    wm[np.searchsorted(allidx, mu.indices)] = mu.weights
    wn[np.searchsorted(allidx, nu.indices)] = nu.weights
    return float(0.5 * np.abs(wm - wn).sum())


# ---------------------------------------------------------------------------
# the self-similarity identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelfSimilarityReport:
    residual: float
    certified_bound: float
    inner_level: int
    n: int
    depth: int
    level: int


def self_similarity_residual(
    params: SystemParams,
    x: float,
    n: int,
    depth: int,
    level: int,
    work_budget: int = WORK_BUDGET,
) -> SelfSimilarityReport:
    """TV distance between the depth-enumerated fiber measure and its
    depth-(n, depth-n) decomposition into affine images over length-n words.

    Both sides enumerate the same word set, so the residual is pure
    discretization: inner measures are binned at a level fine enough to
    resolve their own tail scale, which makes the certified bound (and in
    practice the residual) shrink as depth grows.
    """
    if not 0 <= n < depth:
        raise ValueError("need 0 <= n < depth")
    if params.b**depth > work_budget:
        raise ValueError("depth exceeds work budget")
    lhs = build_mx_exact(params, x, level, depth, work_budget)
    lgb = math.log(1.0 / params.gamma) / math.log(params.b)
    cap = int(45 / math.log2(params.b))
    inner_level = min(level + math.ceil((depth - n) * lgb), cap)
    gn = params.gamma**n
    parts = []
    for code in range(params.b**n):
        w = Word.from_code(code, n, params.b)
        inner = build_mx_exact(
            params, (x + code) / float(params.b**n), inner_level, depth - n, work_budget
        )
        shift = eval_S(params, x, w).value
        parts.append((params.b ** (-n), pushforward_affine(inner, gn, shift, level)))
    rhs = mix(parts)
    residual = total_variation(lhs, rhs)
    displacement = gn * float(params.b) ** (-inner_level) / 2.0 + 2.0 * gn * params.tail_bound(
        depth - n
    )
    bound = min(1.0, float(params.b) ** level * 2.0 * displacement)
    return SelfSimilarityReport(residual, bound, inner_level, n, depth, level)
