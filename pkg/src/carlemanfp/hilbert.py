"""One-sided principal-value Hilbert transforms of sampled functions.

The kernel singularity is removed globally: PV int s(x)/(x-a) dx equals
int (s(x) - s(a))/(x-a) dx + s(a) log((X-a)/a) on [0, X], leaving a C^1
integrand that a per-interval Gauss rule integrates to high order.  In
power-law mode the grid is continued for several decades beyond the
cutoff and the remaining exact power-law tail is integrated in closed
form, so the transform is the untruncated one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import (
    GridFunction,
    HARD_CUTOFF,
    POWER_LAW_EXTEND,
    QuadratureConfig,
    hermite_eval,
)
from .quadrature import fd_derivatives, panel_points
from .specfun import hyp2f1_1mu

_CHUNK = 128


class QuadratureError(RuntimeError):
    """Raised when a transform evaluation produces non-finite output."""


def hilbert_power_law(beta: float, mu: float, a):
    """Closed form of the transform quotient for the family (beta+x)^(mu-1).

    H_a[(beta+.)^(mu-1)] / (beta+a)^(mu-1)
        = -cot(pi mu) + (1/(mu pi)) (beta/(beta+a))^mu
          * 2F1(1, mu; 1+mu; beta/(a+beta)).
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if not (0.0 < mu < 1.0):
        raise ValueError("mu must lie in (0, 1)")
    a, scalar = np.asarray(a, dtype=float), np.ndim(a) == 0
    if np.any(a <= 0.0):
        raise ValueError("evaluation point must be positive")
    z = beta / (beta + a)
    out = -1.0 / math.tan(math.pi * mu) + z**mu * hyp2f1_1mu(mu, z) / (mu * math.pi)
    return float(out) if scalar else out


def power_law_tail_integral(coeff: float, p: float, a, x_end: float):
    """(1/pi) int_{x_end}^inf coeff*(1+x)^p / (x-a) dx for p < 0, a < x_end."""
    a = np.asarray(a, dtype=float)
    nu = -p
    z = (1.0 + a) / (1.0 + x_end)
    return coeff * (1.0 + x_end) ** p * hyp2f1_1mu(nu, z) / (nu * math.pi)


def extend_for_quadrature(f: GridFunction, cfg: QuadratureConfig):
    """Working grid for the transform quadratures.

    Power-law mode appends log-spaced nodes for ``cfg.tail_decades``
    decades past the cutoff, filled with the fitted power-law
    continuation of f.  Hard-cutoff mode instead refines dyadically
    toward the cutoff edge, where the truncated transform develops its
    logarithmic edge behaviour.  Returns (extended GridFunction,
    tail coefficient or None, tail exponent or None).
    """
    lam2 = f.nodes[-1]
    if cfg.tail_mode == POWER_LAW_EXTEND:
        p = f.fitted_tail_exponent()
        if p >= -1e-6:
            raise ValueError(
                "power-law extension requires a decaying tail "
                f"(fitted exponent {p:.3g}); use hard_cutoff"
            )
        n_ext = int(round(cfg.tail_decades * cfg.tail_nodes_per_decade))
        ext = np.geomspace(lam2, lam2 * 10.0**cfg.tail_decades, n_ext + 1)[1:]
        coeff = math.exp(f.values[-1] - p * math.log1p(lam2))
        ext_vals = f.values[-1] + p * (np.log1p(ext) - math.log1p(lam2))
        ext_derivs = p / (1.0 + ext)
        g = GridFunction(
            np.concatenate([f.nodes, ext]),
            np.concatenate([f.values, ext_vals]),
            np.concatenate([f.derivs, ext_derivs]),
            tail_exponent=p,
        )
        return g, coeff, p

    gap = lam2 - f.nodes[-2]
    edge = lam2 - gap * 0.5 ** np.arange(1, cfg.edge_refine_levels + 1)
    vals, ders = hermite_eval(f.nodes, f.values, f.derivs, edge, with_derivative=True)
    nodes = np.concatenate([f.nodes[:-1], edge, [lam2]])
    values = np.concatenate([f.values[:-1], vals, [f.values[-1]]])
    derivs = np.concatenate([f.derivs[:-1], ders, [f.derivs[-1]]])
    g = GridFunction(nodes, values, derivs, tail_exponent=f.tail_exponent)
    return g, None, None


class HilbertOfExp:
    """PV transform of exp(f) for a sampled f, evaluated at many points.

    ``quotient(a)`` returns H_a[exp(f)] / exp(f(a)); in power-law mode
    this is the untruncated transform, in hard-cutoff mode the
    transform truncated at the grid cutoff.
    """

    def __init__(self, f: GridFunction, cfg: QuadratureConfig):
        f.validate()
        self.cfg = cfg
        self.lambda2 = float(f.nodes[-1])
        self.base = f
        self.ext, self.tail_coeff, self.tail_p = extend_for_quadrature(f, cfg)
        self.x_end = float(self.ext.nodes[-1])
        self.sub_x, self.sub_w = panel_points(self.ext.nodes)
        self.sub_g = np.exp(
            hermite_eval(self.ext.nodes, self.ext.values, self.ext.derivs, self.sub_x)
        )
        self.slow_tail = (
            cfg.tail_mode == POWER_LAW_EXTEND and self.ext.fitted_tail_exponent() > -0.5
        )

    # -- core -----------------------------------------------------------

    def _pv(self, a: np.ndarray, s_a: np.ndarray) -> np.ndarray:
        """(1/pi) PV int_0^{x_end} exp(f)/(x-a) dx via global subtraction."""
        out = np.empty_like(a)
        for lo in range(0, a.size, _CHUNK):
            blk = slice(lo, min(lo + _CHUNK, a.size))
            diff = self.sub_x[None, :] - a[blk, None]
            acc = ((self.sub_g[None, :] - s_a[blk, None]) / diff) @ self.sub_w
            out[blk] = acc
        out += s_a * np.log((self.x_end - a) / a)
        return out / math.pi

    def raw(self, a, allow_extension: bool = False):
        """H_a[exp(f)] itself (not the quotient)."""
        a, scalar = np.asarray(a, dtype=float), np.ndim(a) == 0
        a = np.atleast_1d(a).astype(float)
        hi = self.x_end if allow_extension else self.lambda2
        if np.any(a <= 0.0) or np.any(a >= hi):
            raise ValueError(
                f"evaluation points must lie strictly inside (0, {hi:g})"
            )
        s_a = np.exp(
            hermite_eval(self.ext.nodes, self.ext.values, self.ext.derivs, a)
        )
        h = self._pv(a, s_a)
        if self.tail_coeff is not None:
            h += power_law_tail_integral(self.tail_coeff, self.tail_p, a, self.x_end)
        if not np.all(np.isfinite(h)):
            raise QuadratureError("transform produced non-finite values")
        if scalar:
            return float(h[0])
        return h

    def quotient(self, a, allow_extension: bool = False):
        a_arr = np.atleast_1d(np.asarray(a, dtype=float))
        s_a = np.exp(
            hermite_eval(self.ext.nodes, self.ext.values, self.ext.derivs, a_arr)
        )
        h = self.raw(a_arr, allow_extension=allow_extension)
        out = np.asarray(h) / s_a
        if np.ndim(a) == 0:
            return float(out[0])
        return out


def hilbert_of_exp(f: GridFunction, a, cfg: QuadratureConfig | None = None):
    """Transform quotient H_a[exp(f)]/exp(f(a)) at points a in (0, cutoff)."""
    cfg = cfg or QuadratureConfig()
    return HilbertOfExp(f, cfg).quotient(a)


@dataclass
class SampledPVTransform:
    """Truncated PV transform of an arbitrary sampled function on [0, X].

    Derivative samples are estimated by local cubic differencing when
    not supplied.  Used for transforming the reconstruction angle.
    """

    nodes: np.ndarray
    values: np.ndarray
    derivs: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.derivs is None:
            self.derivs = fd_derivatives(self.nodes, self.values)
        self.x_end = float(self.nodes[-1])
        self.sub_x, self.sub_w = panel_points(self.nodes)
        self.sub_s = hermite_eval(self.nodes, self.values, self.derivs, self.sub_x)

    def at(self, a):
        a, scalar = np.asarray(a, dtype=float), np.ndim(a) == 0
        a = np.atleast_1d(a).astype(float)
        if np.any(a <= 0.0) or np.any(a >= self.x_end):
            raise ValueError("evaluation points must lie strictly inside the grid")
        s_a = hermite_eval(self.nodes, self.values, self.derivs, a)
        out = np.empty_like(a)
        for lo in range(0, a.size, _CHUNK):
            blk = slice(lo, min(lo + _CHUNK, a.size))
            diff = self.sub_x[None, :] - a[blk, None]
            acc = ((self.sub_s[None, :] - s_a[blk, None]) / diff) @ self.sub_w
            out[blk] = acc
        out = (out + s_a * np.log((self.x_end - a) / a)) / math.pi
        if not np.all(np.isfinite(out)):
            raise QuadratureError("transform produced non-finite values")
        return float(out[0]) if scalar else out

    def at_zero(self) -> float:
        """Transform at a = 0 for functions vanishing at 0 (no pole)."""
        if abs(self.values[0]) > 1e-12:
            raise ValueError("zero-point transform needs s(0) = 0")
        return float(np.sum(self.sub_w * self.sub_s / self.sub_x) / math.pi)
