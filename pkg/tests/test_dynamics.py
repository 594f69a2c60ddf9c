import numpy as np
import pytest

from solenoidlab.dynamics import attractor_points, iterate_T
from solenoidlab.periodic import PeriodicFn
from solenoidlab.words import SystemParams


def test_pure_contraction_orbit():
    p = SystemParams(2, 0.5, PeriodicFn.zero())
    orb = iterate_T(p, (0.0, 1.0), 0, 12, seed=0)
    assert np.allclose(orb.points[:, 1], 0.5 ** np.arange(12))


def test_constant_phi_fixed_point():
    c, gamma = 1.3, 0.7
    p = SystemParams(3, gamma, PeriodicFn.constant(c))
    y_star = c / (1 - gamma)
    orb = iterate_T(p, (0.2, y_star), 50, 100, seed=1)
    assert np.max(np.abs(orb.points[:, 1] - y_star)) <= 1e-12


def test_orbit_stays_in_invariant_region():
    p = SystemParams(2, 0.4, PeriodicFn.cosine())
    M = p.fiber_bound
    orb = iterate_T(p, (0.123, 0.0), 100, 2000, seed=2)
    assert np.all(np.abs(orb.points[:, 1]) <= M + 1e-12)
    assert np.all((orb.points[:, 0] >= 0) & (orb.points[:, 0] < 1))


def test_orbit_x_does_not_collapse_to_dyadic_zero():
    # without reseeding the base-2 orbit hits exactly 0 within ~52 steps
    p = SystemParams(2, 0.4, PeriodicFn.cosine())
    dead = iterate_T(p, (0.123, 0.0), 200, 50, seed=3, reseed_every=0)
    assert np.all(dead.points[:, 0] == 0.0)
    live = iterate_T(p, (0.123, 0.0), 200, 50, seed=3)
    assert np.count_nonzero(live.points[:, 0]) > 40


def test_attractor_points_deterministic_and_bounded():
    p = SystemParams(2, 0.4, PeriodicFn.cosine())
    a = np.concatenate([x for x, _ in attractor_points(p, 3 * 10**5, seed=5)])
    b = np.concatenate([x for x, _ in attractor_points(p, 3 * 10**5, seed=5)])
    assert np.array_equal(a, b)
    ys = np.concatenate([y for _, y in attractor_points(p, 10**5, seed=6)])
    assert np.max(np.abs(ys)) <= p.fiber_bound + 1e-12
    assert len(a) == 3 * 10**5


def test_attractor_x_marginal_is_uniform():
    p = SystemParams(2, 0.4, PeriodicFn.cosine())
    xs = np.concatenate([x for x, _ in attractor_points(p, 10**6, seed=7)])
    hist, _ = np.histogram(xs, bins=16, range=(0, 1))
    assert np.max(np.abs(hist / len(xs) - 1 / 16)) < 0.003


def test_n_keep_validation():
    p = SystemParams(2, 0.4, PeriodicFn.cosine())
    with pytest.raises(ValueError):
        iterate_T(p, (0.1, 0.0), 0, 0)
