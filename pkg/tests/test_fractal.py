import math

import numpy as np
import pytest

from solenoidlab.fractal import (
    attractor_box_count,
    box_count_dimension,
    box_count_graph,
    predicted_dimension,
    render_attractor,
    weierstrass_graph,
)
from solenoidlab.periodic import PeriodicFn, cohomological_phi, eval as fn_eval
from solenoidlab.words import SystemParams

COS = PeriodicFn.cosine()


def test_predicted_dimension_values():
    assert predicted_dimension(2, 0.5) == pytest.approx(2.0)
    assert predicted_dimension(2, 0.4) == pytest.approx(1.0 + math.log(2) / math.log(2.5))
    assert predicted_dimension(3, 0.5) == pytest.approx(2.0)


def test_predicted_dimension_monotone_and_capped():
    gammas = np.linspace(0.05, 0.95, 30)
    vals = [predicted_dimension(2, g) for g in gammas]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert max(vals) <= 2.0
    with pytest.raises(ValueError):
        predicted_dimension(1, 0.5)


# ------------------------------------------------------------- box counting

def test_box_count_horizontal_segment():
    xs = np.linspace(0, 1, 200001)
    ys = np.full_like(xs, 0.37)
    res = box_count_dimension(np.column_stack([xs, ys]), range(2, 9))
    assert abs(res.slope - 1.0) <= 0.05


def test_box_count_filled_square():
    rng = np.random.default_rng(0)
    pts = rng.random((10**6, 2))
    res = box_count_dimension(pts, range(2, 9))
    assert abs(res.slope - 2.0) <= 0.05


def test_box_count_rejections():
    pts = np.full((100, 2), 0.3)
    with pytest.raises(ValueError):
        box_count_dimension(pts, range(2, 9))  # spans a single cell
    with pytest.raises(ValueError):
        box_count_dimension(np.random.default_rng(1).random((100, 2)), [4, 5])


def test_box_count_lipschitz_graph_at_most_one():
    xs = (np.arange(2**14) + 0.5) / 2**14
    ys = 0.3 * np.sin(2 * math.pi * xs) + 0.1 * xs
    res = box_count_graph(xs, ys, range(3, 10))
    assert res.slope <= 1.0 + 0.1


def test_box_count_graph_needs_full_columns():
    xs = np.array([0.1, 0.2])
    with pytest.raises(ValueError):
        box_count_graph(xs, xs, range(2, 6))


# ----------------------------------------------------------------- renderer

def test_render_zero_phi_single_row():
    p = SystemParams(2, 0.5, PeriodicFn.zero())
    grid = render_attractor(p, 64, 20000, seed=1)
    rows = np.nonzero(grid.counts.sum(axis=0))[0]
    assert len(rows) == 1  # all mass on the y = 0 line


def test_render_degenerate_hugs_graph():
    psi = PeriodicFn.cosine()
    p = SystemParams(2, 0.4, cohomological_phi(psi, 2, 0.4))
    res = 128
    grid = render_attractor(p, res, 200000, seed=2)
    M = p.fiber_bound
    pix = 2 * M / res
    ix, iy = np.nonzero(grid.counts)
    ys = grid.y_min + (iy + 0.5) * pix
    want = fn_eval(psi, (ix + 0.5) / res)
    assert np.max(np.abs(ys - want)) <= 2 * pix + 4 * math.pi / res


def test_render_extent_and_determinism():
    p = SystemParams(2, 0.4, COS)
    g1 = render_attractor(p, 64, 50000, seed=3)
    g2 = render_attractor(p, 64, 50000, seed=3)
    assert np.array_equal(g1.counts, g2.counts)
    assert g1.counts.sum() == 50000
    assert (g1.y_min, g1.y_max) == (-p.fiber_bound, p.fiber_bound)
    cols = np.nonzero(g1.counts.sum(axis=1))[0]
    assert len(cols) == 64  # x-marginal covers the full range


def test_pgm_export(tmp_path):
    p = SystemParams(2, 0.4, COS)
    grid = render_attractor(p, 32, 5000, seed=4)
    path = tmp_path / "a.pgm"
    grid.to_pgm(path)
    data = path.read_bytes()
    assert data.startswith(b"P5\n32 32\n255\n")
    assert len(data) == len(b"P5\n32 32\n255\n") + 32 * 32


def test_attractor_box_count_runs():
    p = SystemParams(2, 0.4, COS)
    res = attractor_box_count(p, 2 * 10**5, range(3, 8), seed=5)
    assert 1.3 <= res.slope <= 2.0


# -------------------------------------------------------------- weierstrass

def test_weierstrass_prediction_values():
    g = weierstrass_graph(COS, 0.5, 3, 1024)
    assert g.predicted_dim == pytest.approx(2 - math.log(2) / math.log(3))
    near = weierstrass_graph(COS, 1 / 3 + 1e-6, 3, 64)
    assert near.predicted_dim == pytest.approx(1.0, abs=1e-5)


def test_weierstrass_lambda_range_rejected():
    with pytest.raises(ValueError):
        weierstrass_graph(COS, 0.3, 3, 128)
    with pytest.raises(ValueError):
        weierstrass_graph(COS, 1.0, 3, 128)


def test_weierstrass_truncation_tail_below_tol():
    tol = 1e-8
    g = weierstrass_graph(COS, 0.5, 3, 256, tol=tol)
    assert 0.5**g.terms / (1 - 0.5) <= tol * 10


def test_weierstrass_box_count_moderate_scale():
    g = weierstrass_graph(COS, 0.5, 3, 3**8 * 64)
    res = box_count_graph(g.xs, g.ys, range(4, 9), b=3)
    assert abs(res.slope - g.predicted_dim) <= 0.06
