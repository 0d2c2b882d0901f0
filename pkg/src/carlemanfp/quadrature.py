"""Composite quadrature and finite-difference helpers on non-uniform grids.

All rules are locally cubic (4-point stencils), giving O(h^5) accuracy
per interval on the smooth integrands this package produces.  Stencil
weights are solved from scaled Vandermonde systems once per grid and
cached by the callers.
"""

from __future__ import annotations

import numpy as np

_GL4_POINTS = np.array(
    [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526]
)
_GL4_WEIGHTS = np.array(
    [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538]
)


def panel_points(x: np.ndarray):
    """4-point Gauss-Legendre nodes/weights on every interval of ``x``.

    Returns flattened arrays (points, weights) of length 4*(len(x)-1).
    """
    x = np.asarray(x, dtype=float)
    lo = x[:-1]
    h = np.diff(x)
    pts = lo[:, None] + (0.5 * (1.0 + _GL4_POINTS))[None, :] * h[:, None]
    wts = (0.5 * _GL4_WEIGHTS)[None, :] * h[:, None]
    return pts.ravel(), wts.ravel()


def _stencil_starts(n: int) -> np.ndarray:
    # stencil for interval i: nodes s..s+3 with s = clip(i-1, 0, n-4)
    i = np.arange(n - 1)
    return np.clip(i - 1, 0, n - 4)


def _scaled_stencils(x: np.ndarray, starts: np.ndarray):
    idx = starts[:, None] + np.arange(4)[None, :]
    xs = x[idx]
    centre = xs.mean(axis=1, keepdims=True)
    scale = (xs[:, -1:] - xs[:, :1]) * 0.5
    u = (xs - centre) / scale
    return idx, u, centre.ravel(), scale.ravel()


def interval_weights(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-interval cubic interpolatory weights.

    Returns ``(idx, w)`` with shape (n-1, 4) each: the integral over
    interval i of the cubic through nodes ``idx[i]`` is ``w[i] @ y[idx[i]]``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4:
        raise ValueError("need at least 4 nodes for cubic quadrature")
    starts = _stencil_starts(n)
    idx, u, centre, scale = _scaled_stencils(x, starts)
    a = (x[:-1] - centre) / scale
    b = (x[1:] - centre) / scale
    powers = np.arange(4)
    moments = (b[:, None] ** (powers + 1) - a[:, None] ** (powers + 1)) / (powers + 1)
    moments *= scale[:, None]
    vand_t = u[:, :, None] ** powers[None, None, :]   # V^T: [interval, k, j]
    w = np.linalg.solve(np.swapaxes(vand_t, 1, 2), moments[..., None])[..., 0]
    return idx, w


def composite_weights(x: np.ndarray) -> np.ndarray:
    """Weights w with sum(w * y) ~= integral of y over [x[0], x[-1]]."""
    idx, w = interval_weights(x)
    out = np.zeros(x.size)
    np.add.at(out, idx, w)
    return out


def interval_integrals(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    idx, w = interval_weights(x)
    return np.sum(w * y[idx], axis=1)


def cumulative_integral(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Antiderivative samples F(x_i) with F(x_0) = 0."""
    out = np.empty(x.size)
    out[0] = 0.0
    np.cumsum(interval_integrals(x, y), out=out[1:])
    return out


def fd_derivative_coeffs(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-node cubic finite-difference coefficients.

    Returns ``(idx, c)`` of shape (n, 4): derivative estimate at node i
    is ``c[i] @ y[idx[i]]``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4:
        raise ValueError("need at least 4 nodes for cubic differentiation")
    starts = np.clip(np.arange(n) - 1, 0, n - 4)
    idx, u, centre, scale = _scaled_stencils(x, starts)
    ui = (x - centre) / scale
    powers = np.arange(4)
    dvec = np.zeros((n, 4))
    dvec[:, 1:] = (powers[1:])[None, :] * ui[:, None] ** (powers[1:] - 1)
    dvec /= scale[:, None]
    vand_t = u[:, :, None] ** powers[None, None, :]
    c = np.linalg.solve(np.swapaxes(vand_t, 1, 2), dvec[..., None])[..., 0]
    return idx, c


def fd_derivatives(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    idx, c = fd_derivative_coeffs(x)
    return np.sum(c * y[idx], axis=1)
