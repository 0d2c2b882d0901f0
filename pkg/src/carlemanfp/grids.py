"""Sampled functions on a log-spaced momentum grid.

A ``GridFunction`` is the solver state: node positions on [0, cutoff],
values f(node), exact derivative samples, and a power-law exponent for
continuing exp(f) beyond the cutoff.  Interpolation between nodes is
monotone-limited cubic Hermite, so strictly decreasing members of the
fixed-point domain stay inside their envelope between nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .coupling import Coupling

POWER_LAW_EXTEND = "power_law_extend"
HARD_CUTOFF = "hard_cutoff"
TailMode = Literal["power_law_extend", "hard_cutoff"]

HEAD_NODES = 32           # linear nodes on [0, 1] before the log section
SLOW_TAIL_THRESHOLD = -0.5


@dataclass(frozen=True)
class QuadratureConfig:
    """Knobs for the transform and operator quadratures."""

    n_nodes: int = 2000
    lambda2: float = 1e6
    pv_window: float = 0.5
    tail_mode: TailMode = POWER_LAW_EXTEND
    tail_decades: float = 5.0       # extension beyond the cutoff (power-law mode)
    tail_nodes_per_decade: int = 64
    edge_refine_levels: int = 40    # dyadic refinement toward the cutoff (hard mode)

    def __post_init__(self) -> None:
        if self.n_nodes < 64:
            raise ValueError("n_nodes must be >= 64")
        if self.lambda2 <= 0.0:
            raise ValueError("cutoff must be positive")
        if self.pv_window <= 0.0:
            raise ValueError("pv_window must be positive")
        if self.tail_mode not in (POWER_LAW_EXTEND, HARD_CUTOFF):
            raise ValueError(f"unknown tail mode {self.tail_mode!r}")


def make_nodes(n_nodes: int = 2000, lambda2: float = 1e6) -> np.ndarray:
    """Node layout: linear head on [0, 1], log-spaced up to the cutoff."""
    if lambda2 <= 1.0:
        raise ValueError("cutoff must exceed the linear head [0, 1]")
    head = np.linspace(0.0, 1.0, HEAD_NODES)
    tail = np.geomspace(1.0, lambda2, n_nodes - HEAD_NODES + 1)[1:]
    nodes = np.concatenate([head, tail])
    nodes[-1] = lambda2
    return nodes


def nodes_for(cfg: QuadratureConfig) -> np.ndarray:
    return make_nodes(cfg.n_nodes, cfg.lambda2)


def _limited_slopes(nodes, values, derivs):
    """Fritsch-Carlson limited endpoint slopes per interval."""
    h = np.diff(nodes)
    delta = np.diff(values) / h
    m_left = derivs[:-1].copy()
    m_right = derivs[1:].copy()
    nonzero = delta != 0.0
    alpha = np.where(nonzero, m_left / np.where(nonzero, delta, 1.0), 0.0)
    beta = np.where(nonzero, m_right / np.where(nonzero, delta, 1.0), 0.0)
    m_left = np.where(nonzero & (alpha < 0.0), 0.0, m_left)
    m_right = np.where(nonzero & (beta < 0.0), 0.0, m_right)
    alpha = np.clip(alpha, 0.0, None)
    beta = np.clip(beta, 0.0, None)
    r2 = alpha**2 + beta**2
    scale = np.where(r2 > 9.0, 3.0 / np.sqrt(np.where(r2 > 0, r2, 1.0)), 1.0)
    m_left = np.where(nonzero, m_left * scale, 0.0)
    m_right = np.where(nonzero, m_right * scale, 0.0)
    return m_left, m_right


def hermite_eval(nodes, values, derivs, x, with_derivative: bool = False):
    """Monotone-limited cubic Hermite interpolation of sampled data."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xf = np.atleast_1d(x)
    if np.any(xf < nodes[0]) or np.any(xf > nodes[-1]):
        raise ValueError("interpolation point outside the grid")
    ml, mr = _limited_slopes(nodes, values, derivs)
    idx = np.clip(np.searchsorted(nodes, xf, side="right") - 1, 0, nodes.size - 2)
    h = nodes[idx + 1] - nodes[idx]
    t = (xf - nodes[idx]) / h
    t2 = t * t
    t3 = t2 * t
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + t
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    v = (
        h00 * values[idx]
        + h10 * h * ml[idx]
        + h01 * values[idx + 1]
        + h11 * h * mr[idx]
    )
    if not with_derivative:
        return float(v[0]) if scalar else v
    d00 = (6 * t2 - 6 * t) / h
    d10 = 3 * t2 - 4 * t + 1
    d01 = (-6 * t2 + 6 * t) / h
    d11 = 3 * t2 - 2 * t
    d = (
        d00 * values[idx]
        + d10 * ml[idx]
        + d01 * values[idx + 1]
        + d11 * mr[idx]
    )
    if scalar:
        return float(v[0]), float(d[0])
    return v, d


@dataclass
class GridFunction:
    """Sampled member of the log-bounded function space."""

    nodes: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    tail_exponent: float | None = None

    def __post_init__(self) -> None:
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.derivs = np.asarray(self.derivs, dtype=float)
        if not (self.nodes.size == self.values.size == self.derivs.size):
            raise ValueError("nodes, values and derivs must have equal length")
        if self.nodes[0] != 0.0:
            raise ValueError("grid must start at 0")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")

    # -- membership ---------------------------------------------------

    def validate(self) -> None:
        """Basic space membership: f(0) = 0 and finite bounded derivative."""
        if abs(self.values[0]) > 1e-12:
            raise ValueError(f"f(0) must vanish, got {self.values[0]}")
        if not np.all(np.isfinite(self.values)) or not np.all(np.isfinite(self.derivs)):
            raise ValueError("non-finite samples")
        if not np.all(np.isfinite(self.scaled_derivs())):
            raise ValueError("unbounded scaled derivative")

    def scaled_derivs(self) -> np.ndarray:
        return (1.0 + self.nodes) * self.derivs

    def envelope_margins(self, coupling: Coupling):
        """Signed distances of (1+x) f' to the envelope band (>=0 inside)."""
        s = self.scaled_derivs()
        lower = s + (1.0 - coupling.abs_lambda)
        upper = -(1.0 - coupling.lambda_r) - s
        return lower, upper

    def in_envelope(self, coupling: Coupling, slack: float = 1e-6) -> bool:
        lower, upper = self.envelope_margins(coupling)
        return bool(np.all(lower >= -slack) and np.all(upper >= -slack))

    # -- evaluation ---------------------------------------------------

    def at(self, x):
        return hermite_eval(self.nodes, self.values, self.derivs, x)

    def derivative_at(self, x):
        return hermite_eval(self.nodes, self.values, self.derivs, x, True)[1]

    def exp_at(self, x):
        return np.exp(self.at(x))

    # -- tail ---------------------------------------------------------

    def fitted_tail_exponent(self) -> float:
        """Secant slope of f against log(1+x) over the last grid decade."""
        if self.tail_exponent is not None:
            return float(self.tail_exponent)
        x_end = self.nodes[-1]
        k = int(np.searchsorted(self.nodes, x_end / 10.0))
        k = min(k, self.nodes.size - 2)
        du = np.log1p(x_end) - np.log1p(self.nodes[k])
        return float((self.values[-1] - self.values[k]) / du)

    def with_fitted_tail(self) -> "GridFunction":
        return replace(self, tail_exponent=self.fitted_tail_exponent())

    def has_slow_tail(self) -> bool:
        return self.fitted_tail_exponent() > SLOW_TAIL_THRESHOLD

    def copy(self) -> "GridFunction":
        return GridFunction(
            self.nodes.copy(), self.values.copy(), self.derivs.copy(), self.tail_exponent
        )


def log_envelope_function(nodes: np.ndarray, exponent: float) -> GridFunction:
    """The exact power-law member f(x) = exponent * log(1+x)."""
    nodes = np.asarray(nodes, dtype=float)
    values = exponent * np.log1p(nodes)
    derivs = exponent / (1.0 + nodes)
    return GridFunction(nodes, values, derivs, tail_exponent=exponent)


def zero_function(nodes: np.ndarray) -> GridFunction:
    nodes = np.asarray(nodes, dtype=float)
    return GridFunction(nodes, np.zeros_like(nodes), np.zeros_like(nodes), 0.0)


def random_klambda(
    coupling: Coupling,
    nodes: np.ndarray,
    rng: np.random.Generator,
    n_blocks: int = 16,
) -> GridFunction:
    """Random member of the fixed-point domain.

    The scaled derivative profile interpolates between the two envelope
    edges through a random piecewise-linear mixing profile theta(u) in
    [0, 1] on u = log(1+x) blocks, then f is recovered by exact
    integration of the piecewise-linear profile.
    """
    nodes = np.asarray(nodes, dtype=float)
    u = np.log1p(nodes)
    u_max = u[-1]
    edges = np.linspace(0.0, u_max, n_blocks + 1)
    centres = 0.5 * (edges[:-1] + edges[1:])
    theta_blocks = rng.uniform(0.0, 1.0, n_blocks)
    breaks = np.concatenate([[0.0], centres, [u_max]])
    theta = np.concatenate([[theta_blocks[0]], theta_blocks, [theta_blocks[-1]]])

    lo = -(1.0 - coupling.abs_lambda)
    hi = -(1.0 - coupling.lambda_r)
    d_breaks = lo * theta + hi * (1.0 - theta)        # piecewise linear in u

    # Exact antiderivative of the piecewise-linear profile.
    f_breaks = np.concatenate(
        [[0.0], np.cumsum(0.5 * (d_breaks[1:] + d_breaks[:-1]) * np.diff(breaks))]
    )
    seg = np.clip(np.searchsorted(breaks, u, side="right") - 1, 0, breaks.size - 2)
    du = u - breaks[seg]
    seg_len = np.diff(breaks)[seg]
    slope = (d_breaks[seg + 1] - d_breaks[seg]) / seg_len
    values = f_breaks[seg] + d_breaks[seg] * du + 0.5 * slope * du * du
    d_at_u = d_breaks[seg] + slope * du
    derivs = d_at_u / (1.0 + nodes)
    return GridFunction(nodes, values, derivs, tail_exponent=float(d_breaks[-1]))
