"""Digit words over {0..b-1}, system parameters, and the scale map.

Words are the symbolic addresses of fiber points: the word ``j_1 j_2 ... j_n``
over base b names the point ``(x + j_1 + j_2 b + ... + j_n b^{n-1}) / b^n``,
i.e. digit codes are little-endian (the first digit carries weight 1).
Serialized form is the plain digit string ``"10210"`` read left to right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .periodic import PeriodicFn, sup_norm


@dataclass(frozen=True)
class Word:
    """Finite digit string over {0, .., b-1}."""

    digits: tuple[int, ...]
    b: int

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("base must be >= 2")
        d = tuple(int(v) for v in self.digits)
        if any(v < 0 or v >= self.b for v in d):
            raise ValueError(f"digits must lie in 0..{self.b - 1}")
        object.__setattr__(self, "digits", d)

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    @classmethod
    def empty(cls, b: int) -> "Word":
        return cls((), b)

    @classmethod
    def from_string(cls, s: str, b: int) -> "Word":
        return cls(tuple(int(ch) for ch in s), b)

    @classmethod
    def from_code(cls, code: int, length: int, b: int) -> "Word":
        """Inverse of :meth:`code` for a fixed length."""
        if code < 0 or code >= b**length:
            raise ValueError("code out of range for this length")
        d = []
        for _ in range(length):
            d.append(code % b)
            code //= b
        return cls(tuple(d), b)

    def to_string(self) -> str:
        return "".join(str(v) for v in self.digits)

    def code(self) -> int:
        """Little-endian integer code: j_1 + j_2 b + ... + j_n b^{n-1}."""
        c = 0
        for v in reversed(self.digits):
            c = c * self.b + v
        return c

    def concat(self, other: "Word") -> "Word":
        if other.b != self.b:
            raise ValueError("base mismatch")
        return Word(self.digits + other.digits, self.b)

    def repeat(self, times: int) -> "Word":
        return Word(self.digits * times, self.b)


def word_point(w: Word, x: float, b: int | None = None) -> float:
    """Map a word and base point to (x + code(w)) / b^len(w), in [0, 1]."""
    if b is None:
        b = w.b
    elif b != w.b:
        raise ValueError("base mismatch")
    if len(w) < 1:
        return float(x)
    return (x + w.code()) / float(b ** len(w))


def nhat(n: int, b: int, gamma: float) -> int:
    """The unique integer with gamma^nhat <= b^(-n) < gamma^(nhat-1).

    Computed as ceil(n log b / log(1/gamma)) and then verified with exact
    rational powers of the floats, nudging by one if the float crossing
    was misjudged.  Ties (gamma^nhat == b^(-n)) take the larger value, the
    non-strict side of the inequality.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if b < 2 or not 0.0 < gamma < 1.0:
        raise ValueError("need b >= 2 and gamma in (0, 1)")
    k = math.ceil(n * math.log(b) / math.log(1.0 / gamma))
    k = max(k, 1)
    g = Fraction(gamma)
    target = Fraction(1, b**n)
    while g**k > target:
        k += 1
    while k > 1 and g ** (k - 1) <= target:
        k -= 1
    return k


@dataclass(frozen=True)
class SystemParams:
    """The skew product (x, y) -> (b x mod 1, gamma y + phi(x)) plus the
    truncation policy used when finite words stand in for infinite ones."""

    b: int
    gamma: float
    phi: PeriodicFn
    truncation_tol: float = 1e-9

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("b must be >= 2")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not self.truncation_tol > 0.0:
            raise ValueError("truncation_tol must be positive")

    @property
    def fiber_bound(self) -> float:
        """M with |series value| <= M for every base point and word."""
        return sup_norm(self.phi, 0) / (1.0 - self.gamma)

    @property
    def truncation_depth(self) -> int:
        """Smallest p with gamma^p * sup|phi| / (1 - gamma) <= truncation_tol."""
        m = sup_norm(self.phi, 0)
        if m == 0.0:
            return 1
        p = 1
        budget = self.gamma * m / (1.0 - self.gamma)
        while budget > self.truncation_tol and p < 4096:
            budget *= self.gamma
            p += 1
        return p

    def tail_bound(self, depth: int, order: int = 0) -> float:
        """Certified bound for the dropped tail of the (order-th derivative
        of the) word series after ``depth`` evaluated digits."""
        r = self.gamma / self.b**order
        return sup_norm(self.phi, order) * r**depth * self.b ** (-order) / (1.0 - r)

    def word(self, digits) -> Word:
        return Word(tuple(digits), self.b)

    def max_bin_level(self) -> int:
        """Deepest b-adic level whose cell indices stay exact in float64."""
        return int(45 / math.log2(self.b))


def sample_words(b: int, length: int, count: int, seed: int) -> list[Word]:
    """i.i.d. uniform digit words, reproducible under the seed."""
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = np.random.default_rng(seed)
    if count == 0:
        return []
    mat = rng.integers(0, b, size=(count, length))
    return [Word(tuple(int(v) for v in row), b) for row in mat]


def sample_word_codes(b: int, length: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Little-endian codes of i.i.d. uniform words, as a vector."""
    if b**length <= 2**62:
        # draw one integer per word; same distribution as digit-by-digit
        return rng.integers(0, b**length, size=count, dtype=np.int64)
    raise ValueError("word space too large for integer codes")
