import math

import numpy as np
import pytest

from solenoidlab.periodic import (
    MAX_DERIV_ORDER,
    PeriodicFn,
    cohomological_phi,
    eval as fn_eval,
    eval_deriv,
    sup_norm,
)

TWO_PI = 2.0 * math.pi


def test_zero_function():
    assert fn_eval(PeriodicFn.zero(), 0.37) == 0.0


def test_cos_values():
    f = PeriodicFn.cosine()
    assert fn_eval(f, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert fn_eval(f, 0.25) == pytest.approx(0.0, abs=1e-12)


def test_periodicity_is_structural():
    f = PeriodicFn.from_triples([(1, 0.7, -0.2), (3, 0.1, 0.4)])
    rng = np.random.default_rng(0)
    for x in rng.random(50):
        assert fn_eval(f, x + 1.0) == pytest.approx(fn_eval(f, x), abs=1e-12)
        assert fn_eval(f, x - 3.0) == pytest.approx(fn_eval(f, x), abs=1e-12)


def test_first_derivative_of_cos():
    f = PeriodicFn.cosine()
    assert eval_deriv(f, 0.0, 1) == pytest.approx(0.0, abs=1e-12)
    assert eval_deriv(f, 0.25, 1) == pytest.approx(-TWO_PI, abs=1e-9)


def test_second_derivative_of_sin_matches_closed_form():
    f = PeriodicFn.sine()
    rng = np.random.default_rng(1)
    for x in rng.random(10):
        want = -(TWO_PI**2) * math.sin(TWO_PI * x)
        assert eval_deriv(f, x, 2) == pytest.approx(want, abs=1e-9)


def test_derivative_against_finite_differences():
    f = PeriodicFn.from_triples([(1, 1.0, 0.0), (2, -0.3, 0.5)])
    rng = np.random.default_rng(2)
    h = 1e-6
    for k in (1, 2, 3):
        for x in rng.random(8):
            fd = (eval_deriv(f, x + h, k - 1) - eval_deriv(f, x - h, k - 1)) / (2 * h)
            val = eval_deriv(f, x, k)
            assert val == pytest.approx(fd, rel=1e-5, abs=1e-4)


def test_derivative_bounded_by_sup_norm():
    f = PeriodicFn.from_triples([(1, 0.9, 0.1), (4, 0.2, -0.7)])
    rng = np.random.default_rng(3)
    for k in range(5):
        bound = sup_norm(f, k)
        for x in rng.random(20):
            assert abs(eval_deriv(f, x, k)) <= bound + 1e-9


def test_order_above_maximum_rejected():
    with pytest.raises(ValueError):
        eval_deriv(PeriodicFn.cosine(), 0.1, MAX_DERIV_ORDER + 1)


def test_sup_norm_examples():
    assert sup_norm(PeriodicFn.cosine(), 0) == pytest.approx(1.0)
    assert sup_norm(PeriodicFn.cosine(), 1) == pytest.approx(TWO_PI)
    f = PeriodicFn.from_triples([(1, 3.0, 0.0), (2, 0.0, 4.0)])
    assert sup_norm(f, 0) == pytest.approx(7.0)


def test_cohomological_phi_zero_input():
    assert cohomological_phi(PeriodicFn.zero(), 2, 0.4).is_zero()


def test_cohomological_phi_cosine_coefficients():
    phi = cohomological_phi(PeriodicFn.cosine(), 2, 0.4)
    # cos(4 pi x) - 0.4 cos(2 pi x)
    assert phi.a[2] == pytest.approx(1.0)
    assert phi.a[1] == pytest.approx(-0.4)
    assert all(v == 0.0 for v in phi.b)
    rng = np.random.default_rng(4)
    for x in rng.random(20):
        want = math.cos(2 * TWO_PI * x) - 0.4 * math.cos(TWO_PI * x)
        assert fn_eval(phi, x) == pytest.approx(want, abs=1e-12)


def test_triples_round_trip():
    f = PeriodicFn.from_triples([(0, 0.5, 0.0), (2, -1.0, 2.0)])
    assert PeriodicFn.from_triples(f.to_triples()) == f


def test_invalid_coefficients_rejected():
    with pytest.raises(ValueError):
        PeriodicFn((float("nan"),), (0.0,))
