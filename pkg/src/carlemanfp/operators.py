"""The rescaled transform map R, the fixed-point map T, and the norm.

R f(a) = (1 - |lam| pi a H_a[exp f]) / exp f(a) is assembled from the
transform quotient, so no large exponentials appear.  The derivative of
the image,

    (T f)'(b) = -1/(1+b) + |lam| int_0^inf dt / ((|lam| pi t)^2 + (b + Rf(t))^2),

is evaluated on a shared cache of R samples; T f itself is recovered by
cumulative integration from 0, which pins T f(0) = 0 exactly.  Beyond
the quadrature grid the integrand is closed using the asymptotically
affine model of R and the arctan antiderivative
int dt/((alpha t)^2 + (beta + gamma t)^2) = arctan(alpha t/(beta+gamma t))/(alpha beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import Coupling
from .grids import (
    GridFunction,
    HARD_CUTOFF,
    POWER_LAW_EXTEND,
    QuadratureConfig,
    hermite_eval,
)
from .hilbert import HilbertOfExp, QuadratureError
from .quadrature import composite_weights, cumulative_integral

_CHUNK = 256


class PoleRegionError(RuntimeError):
    """b + Rf(t) <= 0 somewhere: the input is far outside the fixed-point
    domain and the integrand develops a near-pole the caller must opt into."""


def lb_norm(f: GridFunction) -> float:
    """|f(0)| + sup over nodes of |(1+x) f'(x)|."""
    return float(abs(f.values[0]) + np.max(np.abs(f.scaled_derivs())))


def lb_distance(f: GridFunction, g: GridFunction) -> float:
    if f.nodes.shape != g.nodes.shape or not np.array_equal(f.nodes, g.nodes):
        raise ValueError("grid functions live on different node sets")
    d0 = abs(f.values[0] - g.values[0])
    return float(d0 + np.max(np.abs(f.scaled_derivs() - g.scaled_derivs())))


@dataclass
class RfCache:
    """R samples on the operator's t-quadrature grid plus the affine tail."""

    t_nodes: np.ndarray
    rf: np.ndarray
    weights: np.ndarray
    hilbert: HilbertOfExp
    tail_r0: float | None
    tail_r1: float | None
    min_rf: float


@dataclass
class OperatorOutput:
    """Image grid function together with the shared R cache it used."""

    grid: GridFunction
    rf_nodes: np.ndarray
    rf_values: np.ndarray
    direct_form_diff: float | None = None


class TOperator:
    """Fixed-point map bound to a coupling, a node set and quadrature knobs."""

    def __init__(
        self,
        coupling: Coupling,
        cfg: QuadratureConfig,
        nodes: np.ndarray,
    ):
        self.coupling = coupling
        self.cfg = cfg
        self.nodes = np.asarray(nodes, dtype=float)

    # -- R ----------------------------------------------------------------

    def rf_cache(self, f: GridFunction) -> RfCache:
        if not np.array_equal(f.nodes, self.nodes):
            raise ValueError("grid function nodes do not match the operator grid")
        al = self.coupling.abs_lambda
        he = HilbertOfExp(f, self.cfg)
        t = he.ext.nodes[:-1]
        if self.cfg.tail_mode == HARD_CUTOFF:
            # The truncated-transform integrand develops a sharp ridge where
            # b + R crosses zero; halve the mesh to resolve it.
            t = np.sort(np.concatenate([t, 0.5 * (t[1:] + t[:-1])]))
        rf = np.empty_like(t)
        rf[0] = math.exp(-f.values[0])
        f_t = hermite_eval(he.ext.nodes, he.ext.values, he.ext.derivs, t[1:])
        if al == 0.0:
            rf[1:] = np.exp(-f_t)
        else:
            quot = he.quotient(t[1:], allow_extension=True)
            rf[1:] = np.exp(-f_t) - al * math.pi * t[1:] * quot
        w = composite_weights(t)
        r0 = r1 = None
        if self.cfg.tail_mode == POWER_LAW_EXTEND:
            # Secant model through the last decade, exact at the grid end;
            # beyond the grid R deviates from affine only sublinearly.
            k = int(np.searchsorted(t, t[-1] / 10.0))
            r1 = float((rf[-1] - rf[k]) / (t[-1] - t[k]))
            r0 = float(rf[-1] - r1 * t[-1])
            if r1 <= 0.0:
                raise QuadratureError("tail model of R has non-positive slope")
        return RfCache(
            t_nodes=t,
            rf=rf,
            weights=w,
            hilbert=he,
            tail_r0=r0,
            tail_r1=r1,
            min_rf=float(rf.min()),
        )

    # -- (Tf)' --------------------------------------------------------------

    def _tail_integral(self, cache: RfCache, b: np.ndarray) -> np.ndarray:
        """int_{T}^inf dt/((al pi t)^2 + (b + r0 + r1 t)^2) via arctan."""
        al = self.coupling.abs_lambda
        alpha = al * math.pi
        t_end = cache.t_nodes[-1]
        beta = b + cache.tail_r0
        # Valid while beta + r1*t stays positive on [t_end, inf); beta itself
        # may be negative (the secant intercept of a sublinear drift).
        if np.any(beta + cache.tail_r1 * t_end <= 0.0):
            raise QuadratureError("affine tail model not applicable beyond the grid")
        with np.errstate(divide="ignore", invalid="ignore"):
            lim = math.atan2(alpha, cache.tail_r1)
            at_end = np.arctan(alpha * t_end / (beta + cache.tail_r1 * t_end))
            out = (lim - at_end) / (alpha * beta)
        exact_zero = 1.0 / ((alpha**2 + cache.tail_r1**2) * t_end)
        return np.where(beta == 0.0, exact_zero, out)

    def derivative(
        self,
        f_or_cache: GridFunction | RfCache,
        b,
        require_positive: bool = True,
    ):
        """(Tf)'(b), vectorised over b >= 0."""
        b_arr = np.atleast_1d(np.asarray(b, dtype=float))
        scalar = np.ndim(b) == 0
        if np.any(b_arr < 0.0):
            raise ValueError("b must be >= 0")
        al = self.coupling.abs_lambda
        if al == 0.0:
            out = -1.0 / (1.0 + b_arr)
            return float(out[0]) if scalar else out
        cache = (
            f_or_cache
            if isinstance(f_or_cache, RfCache)
            else self.rf_cache(f_or_cache)
        )
        if require_positive and b_arr.min() + cache.min_rf <= 0.0:
            raise PoleRegionError(
                f"b + Rf(t) <= 0 at b={b_arr.min():g} (min Rf = {cache.min_rf:g})"
            )
        alpha2 = (al * math.pi * cache.t_nodes) ** 2
        integral = np.empty_like(b_arr)
        for lo in range(0, b_arr.size, _CHUNK):
            blk = slice(lo, min(lo + _CHUNK, b_arr.size))
            denom = alpha2[None, :] + (b_arr[blk, None] + cache.rf[None, :]) ** 2
            integral[blk] = (1.0 / denom) @ cache.weights
        if cache.tail_r0 is not None:
            integral += self._tail_integral(cache, b_arr)
        out = -1.0 / (1.0 + b_arr) + al * integral
        if not np.all(np.isfinite(out)):
            raise QuadratureError("operator derivative produced non-finite values")
        return float(out[0]) if scalar else out

    # -- Tf -------------------------------------------------------------------

    def direct_value(self, cache: RfCache, b: float) -> float:
        """T f(b) via the arctan-difference form (consistency diagnostic)."""
        al = self.coupling.abs_lambda
        alpha = al * math.pi
        t = cache.t_nodes
        rf = cache.rf
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (b + rf) / (alpha * t)
            y = rf / (alpha * t)
            diff = np.arctan2(x - y, 1.0 + x * y)
            integrand = diff / (math.pi * t)
        integrand[t == 0.0] = al * b / (rf[0] * (b + rf[0]))
        val = float(cache.weights @ integrand)
        if cache.tail_r0 is not None:
            r1 = cache.tail_r1
            t_end = t[-1]
            val += b * alpha / (math.pi * (alpha**2 + r1**2) * t_end)
        return -math.log1p(b) + val

    def apply(
        self,
        f: GridFunction,
        require_positive: bool = True,
        debug_check: bool = False,
    ) -> OperatorOutput:
        """Full image T f on the operator grid (values, derivatives, tail)."""
        al = self.coupling.abs_lambda
        if al == 0.0:
            grid = GridFunction(
                self.nodes,
                -np.log1p(self.nodes),
                -1.0 / (1.0 + self.nodes),
                tail_exponent=-1.0,
            )
            return OperatorOutput(grid, self.nodes, np.exp(-f.values))
        cache = self.rf_cache(f)
        d = self.derivative(cache, self.nodes, require_positive=require_positive)
        values = cumulative_integral(self.nodes, d)
        grid = GridFunction(self.nodes, values, d).with_fitted_tail()
        diff = None
        if debug_check:
            rng = np.random.default_rng(0x5EED)
            picks = rng.integers(1, self.nodes.size, size=3)
            diff = max(
                abs(values[i] - self.direct_value(cache, float(self.nodes[i])))
                for i in picks
            )
        return OperatorOutput(grid, cache.t_nodes, cache.rf, diff)


# ---------------------------------------------------------------------------
# Convenience wrappers
# ---------------------------------------------------------------------------

def r_op(f: GridFunction, a, coupling: Coupling, cfg: QuadratureConfig | None = None):
    """R f(a) = exp(-f(a)) - |lam| pi a * (H_a[exp f]/exp f(a)); R f(0) = 1."""
    cfg = cfg or QuadratureConfig()
    a_arr = np.atleast_1d(np.asarray(a, dtype=float))
    scalar = np.ndim(a) == 0
    if np.any(a_arr < 0.0) or np.any(a_arr >= f.nodes[-1]):
        raise ValueError("evaluation points must lie in [0, cutoff)")
    al = coupling.abs_lambda
    out = np.empty_like(a_arr)
    zero = a_arr == 0.0
    out[zero] = math.exp(-f.values[0])
    if np.any(~zero):
        if al == 0.0:
            out[~zero] = np.exp(-f.at(a_arr[~zero]))
        else:
            he = HilbertOfExp(f, cfg)
            quot = he.quotient(a_arr[~zero])
            out[~zero] = np.exp(-f.at(a_arr[~zero])) - al * math.pi * a_arr[~zero] * quot
    return float(out[0]) if scalar else out


def t_prime(
    f: GridFunction,
    b,
    coupling: Coupling,
    cfg: QuadratureConfig | None = None,
    require_positive: bool = True,
):
    """(T f)'(b); absolute accuracy is tied to the grid resolution of f."""
    cfg = cfg or QuadratureConfig()
    op = TOperator(coupling, cfg, f.nodes)
    return op.derivative(f, b, require_positive=require_positive)


def t_op(
    f: GridFunction,
    coupling: Coupling,
    cfg: QuadratureConfig | None = None,
    require_positive: bool = True,
    debug_check: bool = False,
) -> OperatorOutput:
    """T f sampled on f's nodes, with T f(0) = 0 exact by construction."""
    cfg = cfg or QuadratureConfig()
    op = TOperator(coupling, cfg, f.nodes)
    return op.apply(f, require_positive=require_positive, debug_check=debug_check)
