"""Word-space partitions keyed by series values, and the induced measures.

A word w is keyed by its length m, the series values of two fixed probe
words h, h' evaluated at the base point w(x0) (binned at level n), and the
series value S(x0, w) binned at level n + [m log_b(1/gamma)] -- the scale at
which length-m words resolve.  At n = 0 the probe cells are dropped.  These
keys realize a refining sequence of partitions of word space; uniform
measures on suffix classes, their atom images on the line, and the induced
decomposition of the fiber measure are computed against them.

Binning levels are clipped to the exact-index cap (b^level <= 2^45); at the
scales scanned here the clipped cells are still several orders coarser than
the observed value gaps, so clipping never merges genuinely separated keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .measures import DiscreteMeasure, _Hist, build_mx_exact, total_variation
from .separation import GENERIC_BASE_POINT, SeparationScan, TransversalityCertificate
from .series import eval_S, random_tail_series, series_at_codes, series_fixed_word, series_over_prefixes
from .words import SystemParams, Word, nhat, word_point

ENUM_BUDGET = 1 << 20


def _log_contraction(params: SystemParams) -> float:
    """log_b(1/gamma): levels per word digit at which series values resolve."""
    return math.log(1.0 / params.gamma) / math.log(params.b)


def _clip_level(params: SystemParams, level: int) -> int:
    return max(0, min(level, params.max_bin_level()))


# ---------------------------------------------------------------------------
# partition keys
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionKey:
    m: int
    n: int
    cell1: int | None
    cell2: int | None
    cell3: int
    cell3_level: int


def partition_key(
    params: SystemParams, w: Word, n: int, x0: float, h: Word, h_prime: Word
) -> PartitionKey:
    """Key of w in the level-n word partition anchored at x0 with probes h, h'."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    m = len(w)
    lev3 = _clip_level(params, n + int(m * _log_contraction(params)))
    s3 = eval_S(params, x0, w).value
    cell3 = int(math.floor(s3 * params.b**lev3))
    if n == 0:
        return PartitionKey(m, 0, None, None, cell3, lev3)
    base = word_point(w, x0)
    lev12 = _clip_level(params, n)
    c1 = int(math.floor(eval_S(params, base, h).value * params.b**lev12))
    c2 = int(math.floor(eval_S(params, base, h_prime).value * params.b**lev12))
    return PartitionKey(m, n, c1, c2, cell3, lev3)


# ---------------------------------------------------------------------------
# word measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WordMeasure:
    """Weighted words of the form (prefix . suffix) with a common suffix."""

    params: SystemParams
    prefix_len: int
    suffix: Word
    codes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        w = np.asarray(self.weights, dtype=float)
        if codes.shape != w.shape:
            raise ValueError("codes and weights must be aligned")
        if np.any(w < 0) or not w.sum() > 0:
            raise ValueError("weights must be nonnegative with positive mass")
        w = w / w.sum()
        codes.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "weights", w)

    @property
    def word_length(self) -> int:
        return self.prefix_len + len(self.suffix)

    def words(self) -> Iterator[tuple[Word, float]]:
        for code, w in zip(self.codes, self.weights):
            yield Word.from_code(int(code), self.prefix_len, self.params.b).concat(self.suffix), float(w)

    def is_full_range(self) -> bool:
        n = self.params.b**self.prefix_len
        return len(self.codes) == n and self.codes[0] == 0 and self.codes[-1] == n - 1


def theta_measure(params: SystemParams, a: Word, n: int, budget: int = ENUM_BUDGET) -> WordMeasure:
    """Uniform measure on {w . a : w in Lambda^(nhat - t)}, t = |a|."""
    t = len(a)
    nh = nhat(n, params.b, params.gamma)
    if nh <= t:
        raise ValueError("matched scale nhat must exceed the suffix length")
    count = params.b ** (nh - t)
    if count > budget:
        raise ValueError("suffix-class enumeration exceeds the budget")
    codes = np.arange(count, dtype=np.int64)
    return WordMeasure(params, nh - t, a, codes, np.full(count, 1.0 / count))


def _series_over_support(params: SystemParams, xi: WordMeasure, extra: tuple, x0: float) -> np.ndarray:
    """S(x0, w . extra) over the support of xi, exact finite evaluation."""
    suffix = xi.suffix.digits + tuple(extra)
    if xi.is_full_range():
        return series_over_prefixes(params, x0, xi.prefix_len, suffix=suffix)
    return series_at_codes(params, x0, xi.prefix_len, xi.codes, suffix=suffix)


def measure_A(
    params: SystemParams, xi: WordMeasure, u: Word, x0: float, level: int
) -> DiscreteMeasure:
    """Atoms at S(x0, w u) with the weights of xi, binned at the level."""
    vals = _series_over_support(params, xi, u.digits, x0)
    return DiscreteMeasure.from_values(params.b, level, vals, xi.weights)


def measure_B(
    params: SystemParams,
    xi: WordMeasure,
    q: Word,
    x0: float,
    tail_samples: int,
    seed: int,
    level: int,
    chunk: int = 1 << 22,
) -> DiscreteMeasure:
    """Distribution of S(x0, w q j) with w ~ xi and seeded i.i.d. digit tails,
    truncated at the system truncation depth."""
    if tail_samples < 1:
        raise ValueError("tail_samples must be >= 1")
    rng = np.random.default_rng(seed)
    head_vals = _series_over_support(params, xi, q.digits, x0)
    head_len = xi.word_length + len(q)
    full_codes = xi.codes + params.b**xi.prefix_len * xi.suffix.concat(q).code()
    base_pts = (x0 + full_codes) / float(params.b) ** head_len
    contraction = params.gamma**head_len
    depth_tail = params.truncation_depth
    hist = _Hist()
    rows = max(1, chunk // tail_samples)
    scale = float(params.b) ** level
    for start in range(0, len(head_vals), rows):
        sl = slice(start, start + rows)
        tails = random_tail_series(params, base_pts[sl], depth_tail, tail_samples, rng)
        vals = head_vals[sl][:, None] + contraction * tails
        ws = np.repeat(xi.weights[sl] / tail_samples, tail_samples)
        hist.add(np.floor(vals.reshape(-1) * scale).astype(np.int64), ws)
    return DiscreteMeasure(params.b, level, hist.idx, hist.w)


# ---------------------------------------------------------------------------
# decomposition of the fiber measure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionReport:
    residual: float
    error_budget: float
    n_hat: int
    i_hat: int
    atoms: int
    level: int


def decomposition_check(
    params: SystemParams,
    n: int,
    i_level: int,
    level: int,
    budget: int = 1 << 16,
    seed: int = 0,
    x0: float = GENERIC_BASE_POINT,
    t: int = 2,
    tail_samples: int = 4,
) -> DecompositionReport:
    """TV distance between the exactly enumerated fiber measure and its
    double mixture over suffix classes and connector words.

    The mixture runs over all pairs (u, v) of length-t words and all
    connectors q of length i_hat - t, each contributing a tail-sampled
    series distribution; the reported budget combines both truncation tails
    and a multinomial sampling estimate.
    """
    b = params.b
    nh = nhat(n, b, params.gamma)
    ih = nhat(i_level, b, params.gamma)
    if nh <= t or ih <= t:
        raise ValueError("matched scales must exceed t")
    if b ** (nh - t) > budget or b ** (ih - t) > budget:
        raise ValueError("word enumeration exceeds the budget")
    depth_lhs = min(params.truncation_depth, int(23 / math.log2(b)) + 1)
    lhs = build_mx_exact(params, x0, level, depth_lhs)
    hist = _Hist()
    outer = 1.0 / b ** (2 * t)
    inner = 1.0 / b ** (ih - t)
    n_atoms = 0
    for u_code in range(b**t):
        u = Word.from_code(u_code, t, b)
        theta = theta_measure(params, u, n, budget=budget)
        for v_code in range(b**t):
            v = Word.from_code(v_code, t, b)
            for q_code in range(b ** (ih - t)):
                q = v.concat(Word.from_code(q_code, ih - t, b))
                sub = measure_B(
                    params, theta, q, x0, tail_samples,
                    seed + ((u_code * b**t + v_code) << 20) + q_code, level,
                )
                hist.add(sub.indices, outer * inner * sub.weights)
                n_atoms += len(theta.codes) * tail_samples
    rhs = DiscreteMeasure(b, level, hist.idx, hist.w)
    residual = total_variation(lhs, rhs)
    tail_terms = params.tail_bound(depth_lhs) + params.gamma ** (nh + ih) * params.tail_bound(
        params.truncation_depth
    )
    sampling = 0.5 * math.sqrt(len(lhs.indices) / n_atoms)
    error_budget = min(1.0, float(b) ** level * 2.0 * tail_terms + sampling)
    return DecompositionReport(residual, error_budget, nh, ih, n_atoms, level)


# ---------------------------------------------------------------------------
# partition entropies of suffix-class measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaEntropyRow:
    n: int
    n_hat: int
    support: int
    coarse: float
    fine: float
    coarse_level: int
    fine_levels: tuple[int, int]


def _entropy_of_key_rows(columns: list[np.ndarray], weights: np.ndarray, b: int) -> float:
    order = np.lexsort(tuple(reversed(columns)))
    stacked = np.stack([c[order] for c in columns])
    w = weights[order]
    changed = np.any(stacked[:, 1:] != stacked[:, :-1], axis=0)
    starts = np.concatenate([[0], np.flatnonzero(changed) + 1])
    masses = np.add.reduceat(w, starts)
    masses = masses[masses > 0]
    return float(-(masses * np.log(masses)).sum() / math.log(b))


def separation_exponent(scan: SeparationScan, b: int) -> float:
    """Largest gap exponent exhibited by a scan: max over scales of
    (-log_b min_gap) / n; every scanned gap satisfies gap >= b^(-C n)."""
    ratios = [
        -math.log(g) / math.log(b) / n
        for n, g in zip(scan.n_values, scan.min_gaps)
        if math.isfinite(g) and g > 0
    ]
    if not ratios:
        raise ValueError("scan has no finite gaps")
    return max(ratios)


def theta_entropy_table(
    params: SystemParams,
    cert: TransversalityCertificate,
    n_list,
    C: float,
    budget: int = ENUM_BUDGET,
) -> list[ThetaEntropyRow]:
    """Normalized key-partition entropies of the suffix-class measures.

    coarse: (1/n) H at partition level 0 (series cell only); fine: (1/n) H
    at partition level round(C n) including the probe cells.  With all keys
    distinct the fine value equals (nhat - t) / n exactly, the counting
    ceiling; collisions can only lower it.
    """
    t = cert.t
    lgb = _log_contraction(params)
    rows = []
    for n in sorted(int(v) for v in n_list):
        theta = theta_measure(params, cert.a, n, budget=budget)
        nh = theta.prefix_len + t
        s3 = _series_over_support(params, theta, (), cert.x0)
        full_codes = theta.codes + params.b**theta.prefix_len * cert.a.code()
        base = (cert.x0 + full_codes) / float(params.b) ** nh
        s1 = series_fixed_word(params, base, cert.h.digits)
        s2 = series_fixed_word(params, base, cert.h_prime.digits)
        lev_c = _clip_level(params, int(nh * lgb))
        k3c = np.floor(s3 * float(params.b) ** lev_c).astype(np.int64)
        coarse = _entropy_of_key_rows([k3c], theta.weights, params.b) / n
        lev_cn = _clip_level(params, max(1, round(C * n)))
        lev3f = _clip_level(params, lev_cn + int(nh * lgb))
        cols = [
            np.floor(s1 * float(params.b) ** lev_cn).astype(np.int64),
            np.floor(s2 * float(params.b) ** lev_cn).astype(np.int64),
            np.floor(s3 * float(params.b) ** lev3f).astype(np.int64),
        ]
        fine = _entropy_of_key_rows(cols, theta.weights, params.b) / n
        rows.append(
            ThetaEntropyRow(
                n=n,
                n_hat=nh,
                support=len(theta.codes),
                coarse=coarse,
                fine=fine,
                coarse_level=lev_c,
                fine_levels=(lev_cn, lev3f),
            )
        )
    return rows
