"""Evaluation of the word series and its derivatives.

The y-coordinate addressed by word ``j`` over base point ``x`` is

    S(x, j) = sum_{n>=1} gamma^{n-1} phi( (x + j_1 + j_2 b + ... + j_n b^{n-1}) / b^n )

where the argument of the n-th term is the word point of the length-n
prefix.  Word points satisfy the append recursion tau_n = (tau_{n-1} + j_n)/b,
and the series obeys the cocycle identity

    S(x, w i) = S(x, w) + gamma^{|w|} S(w(x), i).

Order-k derivatives in x pick up an extra b^{-nk} per term.  Finite words are
evaluated exactly; infinite words are truncated at the depth forced by the
system's truncation tolerance, and every truncated value carries a certified
tail bound.

Bulk kernels enumerate S over *all* words of a given length in little-endian
code order with one numpy pass per digit level: the word points of all
length-n prefixes are exactly {(x + m) / b^n : m = 0..b^n - 1}, so level n
costs one vectorized phi evaluation on b^n points.
"""

from __future__ import annotations

from typing import Iterator, NamedTuple

import numpy as np

from .periodic import eval_deriv
from .words import SystemParams, Word, word_point

#: Largest array a bulk enumeration materializes at once.
DEFAULT_CHUNK_CAP = 1 << 22


class SeriesValue(NamedTuple):
    value: float
    tail_bound: float


def _resolve_tail(params: SystemParams, w: Word, tail, seed: int | None) -> tuple[Word, float]:
    """Extend w per the tail policy; return (word to evaluate, tail bound).

    tail=None evaluates the finite word exactly (bound 0).  An integer digit
    extends with that constant digit to the truncation depth; "random"
    extends with seeded i.i.d. digits.
    """
    if tail is None:
        return w, 0.0
    depth = max(len(w), params.truncation_depth)
    extra = depth - len(w)
    if isinstance(tail, (int, np.integer)):
        ext = Word((int(tail),) * extra, params.b)
    elif tail == "random":
        rng = np.random.default_rng(0 if seed is None else seed)
        ext = Word(tuple(int(d) for d in rng.integers(0, params.b, extra)), params.b)
    else:
        raise ValueError(f"unknown tail policy: {tail!r}")
    return w.concat(ext), depth


def eval_S(params: SystemParams, x: float, w: Word, tail=None, seed: int | None = None) -> SeriesValue:
    """Word series value, with a certified bound for the dropped tail."""
    return eval_S_deriv(params, x, w, 0, tail=tail, seed=seed)


def eval_S_deriv(
    params: SystemParams, x: float, w: Word, order: int, tail=None, seed: int | None = None
) -> SeriesValue:
    """Order-th x-derivative of the word series.

    Exact for the evaluated finite word; the bound covers the infinite tail
    beyond the evaluated depth under any extension.
    """
    if w.b != params.b:
        raise ValueError("word base does not match system base")
    word, depth = _resolve_tail(params, w, tail, seed)
    b, gam = params.b, params.gamma
    tau = float(x)
    val = 0.0
    coef = float(b) ** (-order)
    step = gam * float(b) ** (-order)
    for d in word.digits:
        tau = (tau + d) / b
        val += coef * eval_deriv(params.phi, tau, order)
        coef *= step
    bound = 0.0 if tail is None else params.tail_bound(depth, order)
    return SeriesValue(val, bound)


def cocycle_check(params: SystemParams, x: float, w: Word, i: Word) -> float:
    """Residual |S(x, w i) - S(x, w) - gamma^|w| S(w(x), i)| on exact finite words."""
    if len(w) < 1:
        raise ValueError("w must be nonempty")
    whole = eval_S(params, x, w.concat(i)).value
    head = eval_S(params, x, w).value
    tail_val = eval_S(params, word_point(w, x), i).value
    return abs(whole - head - params.gamma ** len(w) * tail_val)


# --------------------------------------------------------------------------
# bulk kernels
# --------------------------------------------------------------------------

def series_fixed_word(params: SystemParams, xs: np.ndarray, digits, order: int = 0) -> np.ndarray:
    """S^(order)(x, word) for a fixed word over a vector of base points."""
    b, gam = params.b, params.gamma
    tau = np.asarray(xs, dtype=float).copy()
    out = np.zeros_like(tau)
    coef = float(b) ** (-order)
    step = gam * float(b) ** (-order)
    for d in digits:
        tau = (tau + d) / b
        out += coef * eval_deriv(params.phi, tau, order)
        coef *= step
    return out


def _suffix_terms(params, x, prefix_len, low_codes, suffix, order, start_coef):
    """Contribution of fixed suffix digits on top of all low-code prefixes."""
    b, gam = params.b, params.gamma
    out = np.zeros_like(low_codes, dtype=float)
    coef = start_coef
    base = float(b) ** prefix_len
    sufcode = 0
    place = 1
    for k, d in enumerate(suffix):
        n = prefix_len + k + 1
        sufcode += int(d) * place
        place *= b
        arg = (x + low_codes + base * sufcode) / float(b) ** n
        out += coef * eval_deriv(params.phi, arg, order)
        coef *= gam * float(b) ** (-order)
    return out


def series_over_prefixes(
    params: SystemParams, x: float, prefix_len: int, suffix=(), order: int = 0
) -> np.ndarray:
    """S^(order)(x, j . suffix) for every j in Lambda^prefix_len, code order.

    Materializes b^prefix_len values; guarded by DEFAULT_CHUNK_CAP.
    """
    b = params.b
    if b**prefix_len > DEFAULT_CHUNK_CAP:
        raise ValueError(
            f"b^{prefix_len} exceeds the materialization cap; use iter_series_all_words"
        )
    gam = params.gamma
    A = np.zeros(1)
    coef = float(b) ** (-order)
    step = gam * float(b) ** (-order)
    for n in range(1, prefix_len + 1):
        codes = np.arange(b**n, dtype=np.float64)
        A = np.tile(A, b) + coef * eval_deriv(params.phi, (x + codes) / float(b**n), order)
        coef *= step
    if len(suffix):
        low = np.arange(b**prefix_len, dtype=np.float64)
        A = A + _suffix_terms(params, x, prefix_len, low, tuple(suffix), order, coef)
    return A


def series_at_codes(
    params: SystemParams, x: float, length: int, codes: np.ndarray, suffix=(), order: int = 0
) -> np.ndarray:
    """S^(order)(x, j . suffix) for the words j of given length with these codes."""
    b, gam = params.b, params.gamma
    codes = np.asarray(codes, dtype=np.int64)
    out = np.zeros(codes.shape, dtype=float)
    coef = float(b) ** (-order)
    step = gam * float(b) ** (-order)
    for n in range(1, length + 1):
        rem = codes % (b**n)
        out += coef * eval_deriv(params.phi, (x + rem) / float(b**n), order)
        coef *= step
    if len(suffix):
        out += _suffix_terms(params, x, length, codes.astype(float), tuple(suffix), order, coef)
    return out


def iter_series_all_words(
    params: SystemParams, x: float, depth: int, chunk_cap: int = DEFAULT_CHUNK_CAP
) -> Iterator[np.ndarray]:
    """Yield S(x, j) over all j in Lambda^depth in code order, chunked.

    The first t levels (b^t <= chunk_cap) use the tile recursion; remaining
    digits are enumerated explicitly per chunk.
    """
    b = params.b
    t = min(depth, int(np.log(chunk_cap) / np.log(b)))
    A = series_over_prefixes(params, x, t)
    if t == depth:
        yield A
        return
    low = np.arange(b**t, dtype=np.float64)
    gam = params.gamma
    base_coef = gam**t
    base = float(b**t)
    for high in range(b ** (depth - t)):
        out = A.copy()
        coef = base_coef
        hh = high
        place = 1
        sufcode = 0
        # digits t+1..depth of this chunk, little-endian within the high part
        for n in range(t + 1, depth + 1):
            sufcode += (hh % b) * place
            hh //= b
            place *= b
            arg = (x + low + base * sufcode) / float(b) ** n
            out += coef * eval_deriv(params.phi, arg, 0)
            coef *= gam
        yield out


def random_tail_series(
    params: SystemParams,
    base_points: np.ndarray,
    depth: int,
    samples_per: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """S(p, tail) for seeded i.i.d. tails: shape (len(base_points), samples_per)."""
    b, gam = params.b, params.gamma
    tau = np.repeat(np.asarray(base_points, dtype=float), samples_per).reshape(-1, samples_per)
    out = np.zeros_like(tau)
    coef = 1.0
    for _ in range(depth):
        digs = rng.integers(0, b, size=tau.shape)
        tau = (tau + digs) / b
        out += coef * eval_deriv(params.phi, tau, 0)
        coef *= gam
    return out
