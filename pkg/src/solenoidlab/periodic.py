"""Real-analytic Z-periodic functions as finite trigonometric polynomials.

A :class:`PeriodicFn` is a finite Fourier series

    f(x) = sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x),   k = 0..K.

Finite degree gives exact term-wise derivatives of every order and a
certified sup-norm bound ``sum_k (2 pi k)^r (|a_k| + |b_k|)``, which is what
the separation and transversality scans need.  Evaluation reduces the
argument mod 1 first, so periodicity holds structurally in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

#: Highest derivative order served by eval_deriv / sup_norm by default.
MAX_DERIV_ORDER = 8


@dataclass(frozen=True)
class PeriodicFn:
    """Trigonometric polynomial with cosine coefficients ``a`` (k = 0..K)
    and sine coefficients ``b`` (k = 0..K, entry 0 unused)."""

    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        if len(b) < len(a):
            b = b + (0.0,) * (len(a) - len(b))
        elif len(a) < len(b):
            a = a + (0.0,) * (len(b) - len(a))
        if not a:
            a, b = (0.0,), (0.0,)
        if not all(np.isfinite(a)) or not all(np.isfinite(b)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def degree(self) -> int:
        return len(self.a) - 1

    # ------------------------------------------------------------ builders
    @classmethod
    def zero(cls) -> "PeriodicFn":
        return cls((0.0,), (0.0,))

    @classmethod
    def constant(cls, c: float) -> "PeriodicFn":
        return cls((float(c),), (0.0,))

    @classmethod
    def cosine(cls, amplitude: float = 1.0, harmonic: int = 1) -> "PeriodicFn":
        """amplitude * cos(2 pi harmonic x)."""
        a = [0.0] * (harmonic + 1)
        a[harmonic] = float(amplitude)
        return cls(tuple(a), (0.0,) * (harmonic + 1))

    @classmethod
    def sine(cls, amplitude: float = 1.0, harmonic: int = 1) -> "PeriodicFn":
        b = [0.0] * (harmonic + 1)
        b[harmonic] = float(amplitude)
        return cls((0.0,) * (harmonic + 1), tuple(b))

    @classmethod
    def from_triples(cls, triples) -> "PeriodicFn":
        """Build from ``(k, a_k, b_k)`` triples (the config wire format)."""
        if not triples:
            return cls.zero()
        kmax = max(int(k) for k, _, _ in triples)
        a = [0.0] * (kmax + 1)
        b = [0.0] * (kmax + 1)
        for k, ak, bk in triples:
            k = int(k)
            if k < 0:
                raise ValueError("harmonic index must be nonnegative")
            a[k] += float(ak)
            b[k] += float(bk)
        return cls(tuple(a), tuple(b))

    def to_triples(self) -> list[tuple[int, float, float]]:
        return [
            (k, self.a[k], self.b[k])
            for k in range(len(self.a))
            if self.a[k] != 0.0 or self.b[k] != 0.0
        ]

    # ---------------------------------------------------------- arithmetic
    def __add__(self, other: "PeriodicFn") -> "PeriodicFn":
        n = max(len(self.a), len(other.a))
        a = [0.0] * n
        b = [0.0] * n
        for k in range(len(self.a)):
            a[k] += self.a[k]
            b[k] += self.b[k]
        for k in range(len(other.a)):
            a[k] += other.a[k]
            b[k] += other.b[k]
        return PeriodicFn(tuple(a), tuple(b))

    def scale(self, c: float) -> "PeriodicFn":
        return PeriodicFn(tuple(c * v for v in self.a), tuple(c * v for v in self.b))

    def rescale_argument(self, m: int) -> "PeriodicFn":
        """Return g with g(x) = f(m x); harmonic k moves to k*m."""
        if m < 1:
            raise ValueError("argument multiplier must be >= 1")
        n = (len(self.a) - 1) * m + 1
        a = [0.0] * n
        b = [0.0] * n
        for k in range(len(self.a)):
            a[k * m] += self.a[k]
            b[k * m] += self.b[k]
        return PeriodicFn(tuple(a), tuple(b))

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.a) and all(v == 0.0 for v in self.b)


def _deriv_coeffs(f: PeriodicFn, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient arrays of the order-th term-wise derivative."""
    k = np.arange(len(f.a), dtype=float)
    a = np.asarray(f.a, dtype=float)
    b = np.asarray(f.b, dtype=float)
    w = (TWO_PI * k) ** order
    # each derivative maps (a, b) -> (2 pi k b, -2 pi k a); rotate mod 4
    r = order % 4
    if r == 0:
        return w * a, w * b
    if r == 1:
        return w * b, -w * a
    if r == 2:
        return -w * a, -w * b
    return -w * b, w * a


def eval(f: PeriodicFn, x) -> float | np.ndarray:  # noqa: A001 - spec operation name
    """Evaluate f at x (scalar or array); argument is reduced mod 1."""
    return eval_deriv(f, x, 0)


def eval_deriv(f: PeriodicFn, x, order: int, max_order: int = MAX_DERIV_ORDER):
    """Evaluate the order-th derivative of f at x.

    order 0 equals plain evaluation.  Orders above ``max_order`` are
    rejected: sup-norm growth (2 pi k)^order makes very high orders useless
    in double precision.
    """
    if order < 0 or order > max_order:
        raise ValueError(f"derivative order {order} outside [0, {max_order}]")
    xa = np.asarray(x, dtype=float)
    frac = xa - np.floor(xa)
    a, b = _deriv_coeffs(f, order)
    k = np.arange(len(a), dtype=float)
    ang = TWO_PI * np.multiply.outer(frac, k)
    out = np.cos(ang) @ a + np.sin(ang) @ b
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def sup_norm(f: PeriodicFn, order: int = 0) -> float:
    """Certified upper bound for sup |f^(order)|:  sum (2 pi k)^order (|a_k|+|b_k|)."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    k = np.arange(len(f.a), dtype=float)
    w = (TWO_PI * k) ** order if order else np.ones_like(k)
    return float(np.sum(w * (np.abs(f.a) + np.abs(f.b))))


def cohomological_phi(psi: PeriodicFn, b: int, gamma: float) -> PeriodicFn:
    """Return phi(x) = psi(b x) - gamma psi(x).

    For this phi the word series telescopes to psi(x) regardless of the
    word, i.e. it generates the degenerate (graph) alternative exactly.
    """
    if b < 2:
        raise ValueError("b must be >= 2")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    return psi.rescale_argument(b) + psi.scale(-gamma)
