import numpy as np
import pytest

from carlemanfp.grids import make_nodes
from carlemanfp.quadrature import (
    composite_weights,
    cumulative_integral,
    fd_derivatives,
    panel_points,
)


@pytest.fixture
def grid():
    return make_nodes(600, 1e4)


def test_panel_points_integrate_polynomials(grid):
    xs, ws = panel_points(grid)
    for k in range(8):  # 4-point Gauss is exact through degree 7
        exact = (grid[-1] ** (k + 1) - grid[0] ** (k + 1)) / (k + 1)
        assert np.sum(ws * xs**k) == pytest.approx(exact, rel=1e-13)


def test_composite_weights_cubic_exact(grid):
    w = composite_weights(grid)
    for k in range(4):
        exact = grid[-1] ** (k + 1) / (k + 1)
        assert np.sum(w * grid**k) == pytest.approx(exact, rel=1e-13)


def test_composite_weights_smooth_function(grid):
    w = composite_weights(grid)
    y = 1.0 / (1.0 + grid) ** 1.5
    exact = 2.0 * (1.0 - (1.0 + 1e4) ** -0.5)
    assert np.sum(w * y) == pytest.approx(exact, rel=5e-7)


def test_cumulative_integral(grid):
    got = cumulative_integral(grid, 1.0 / (1.0 + grid))
    assert got[0] == 0.0
    assert np.max(np.abs(got - np.log1p(grid))) < 1e-6


def test_fourth_order_convergence():
    errs = []
    for n in (300, 600):
        g = make_nodes(n, 1e4)
        got = cumulative_integral(g, 1.0 / (1.0 + g))[-1]
        errs.append(abs(got - np.log1p(1e4)))
    # halving the log-section mesh must gain roughly 2^4
    assert errs[0] / errs[1] > 8.0


def test_fd_derivatives(grid):
    d = fd_derivatives(grid, np.log1p(grid))
    scaled_err = np.abs(d - 1.0 / (1.0 + grid)) * (1.0 + grid)
    # near-boundary stencils (large curvature over the linear head) are a
    # grade coarser than the rest of the grid
    assert np.max(scaled_err) < 1e-4
    assert np.max(scaled_err[8:-2]) < 1e-5
