"""Fixed-point iteration for the boundary function, with damping and
envelope monitoring.

The iteration is plain Picard by default: f <- (1-w) f + w T f starting
from the steep-envelope member -(1-|lam|) log(1+b), stopping when the
norm distance between successive iterates falls below tolerance.  The
norm-continuity constant of the map exceeds 1, so contraction is not
guaranteed a priori; the damping factor is halved automatically if the
step size grows for three consecutive iterations.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coupling import Coupling
from .grids import (
    GridFunction,
    POWER_LAW_EXTEND,
    QuadratureConfig,
    TailMode,
    log_envelope_function,
    make_nodes,
)
from .operators import TOperator, lb_distance
from .quadrature import cumulative_integral


class NonConvergenceError(RuntimeError):
    def __init__(self, max_iters: int, last_distance: float, history):
        super().__init__(
            f"no convergence after {max_iters} iterations "
            f"(last step distance {last_distance:.3e})"
        )
        self.max_iters = max_iters
        self.last_distance = last_distance
        self.history = history


class EnvelopeEscapeError(RuntimeError):
    def __init__(self, iteration: int, node: float, margin: float):
        super().__init__(
            f"iterate {iteration} left the envelope band at node {node:g} "
            f"by {-margin:.3e}"
        )
        self.iteration = iteration
        self.node = node
        self.margin = margin


@dataclass(frozen=True)
class SolverConfig:
    coupling: Coupling
    lambda2: float = 1e6
    n_nodes: int = 2000
    damping: float = 1.0
    tol_lb: float = 1e-8
    max_iters: int = 500
    tail_mode: TailMode = POWER_LAW_EXTEND
    envelope_slack: float = 1e-6

    def __post_init__(self) -> None:
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must lie in (0, 1]")
        if self.tol_lb <= 0.0:
            raise ValueError("tolerance must be positive")

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(
            n_nodes=self.n_nodes, lambda2=self.lambda2, tail_mode=self.tail_mode
        )


@dataclass
class IterationReport:
    iteration: int
    lb_distance: float
    envelope_min_margin: float
    residual: float


@dataclass
class SolveResult:
    grid_function: GridFunction
    history: list[IterationReport]
    converged: bool
    residual: float
    tail_exponent: float
    slow_tail: bool

    @property
    def iterations(self) -> int:
        return len(self.history)


def initial_guess(coupling: Coupling, nodes: np.ndarray) -> GridFunction:
    """Steep-envelope start -(1-|lam|) log(1+b); lies in the domain exactly."""
    return log_envelope_function(nodes, -(1.0 - coupling.abs_lambda))


def _blend(f: GridFunction, g: GridFunction, w: float) -> GridFunction:
    out = GridFunction(
        f.nodes,
        (1.0 - w) * f.values + w * g.values,
        (1.0 - w) * f.derivs + w * g.derivs,
    )
    return out.with_fitted_tail()


def solve(cfg: SolverConfig, enforce_envelope: bool = True) -> SolveResult:
    """Iterate f <- (1-w) f + w T f until the norm step drops below tolerance.

    Raises NonConvergenceError at the iteration cap and, when envelope
    enforcement is on, EnvelopeEscapeError if an iterate's scaled
    derivative leaves the admissible band by more than the slack.
    """
    coupling = cfg.coupling
    if enforce_envelope and not coupling.in_theorem_range:
        raise ValueError(
            "coupling outside the stability range; pass enforce_envelope=False "
            "or construct an exploratory coupling for diagnostic runs"
        )
    quad = cfg.quadrature()
    nodes = make_nodes(cfg.n_nodes, cfg.lambda2)
    op = TOperator(coupling, quad, nodes)
    f = initial_guess(coupling, nodes)
    history: list[IterationReport] = []
    omega = cfg.damping
    grew = 0
    prev_dist = math.inf
    for it in range(1, cfg.max_iters + 1):
        out = op.apply(f, require_positive=enforce_envelope)
        tf = out.grid
        lower, upper = tf.envelope_margins(coupling)
        margin = float(min(lower.min(), upper.min()))
        if enforce_envelope and margin < -cfg.envelope_slack:
            node = tf.nodes[int(np.argmin(np.minimum(lower, upper)))]
            raise EnvelopeEscapeError(it, float(node), margin)
        residual = lb_distance(tf, f)
        new = tf if omega == 1.0 else _blend(f, tf, omega)
        dist = residual if omega == 1.0 else lb_distance(new, f)
        history.append(IterationReport(it, dist, margin, residual))
        f = new
        if dist < cfg.tol_lb:
            return SolveResult(
                grid_function=f,
                history=history,
                converged=True,
                residual=residual,
                tail_exponent=f.fitted_tail_exponent(),
                slow_tail=f.has_slow_tail(),
            )
        if dist > prev_dist:
            grew += 1
            if grew >= 3 and omega > 0.0625:
                omega *= 0.5
                grew = 0
        else:
            grew = 0
        prev_dist = dist
    raise NonConvergenceError(cfg.max_iters, history[-1].lb_distance, history)


def consistency_residual(
    f: GridFunction,
    coupling: Coupling,
    cfg: QuadratureConfig | None = None,
    b_max: float | None = None,
) -> float:
    """Worst relative defect of exp(f) against the self-consistency
    equation, whose right-hand side is exp(-log(1+b) + |lam| * cumulative
    integral of the shared operator integrand), i.e. exp of the image of f.

    ``b_max`` restricts the check to nodes <= b_max (the pointwise
    convergence diagnostics need a cutoff-independent window).
    """
    cfg = cfg or QuadratureConfig()
    op = TOperator(coupling, cfg, f.nodes)
    cache = op.rf_cache(f)
    d = op.derivative(cache, f.nodes, require_positive=False)
    inner = cumulative_integral(f.nodes, d + 1.0 / (1.0 + f.nodes))
    rhs = np.exp(-np.log1p(f.nodes) + inner)
    lhs = np.exp(f.values)
    rel = np.abs(lhs - rhs) / lhs
    if b_max is not None:
        rel = rel[f.nodes <= b_max]
    return float(rel.max())


def lambda_scan(
    lambdas,
    lambda2: float = 1e6,
    n_nodes: int = 600,
    tol_lb: float = 1e-8,
    max_iters: int = 500,
    max_workers: int | None = None,
) -> list[dict]:
    """Diagnostic solve per coupling value.

    Couplings inside [-1/6, 0] are solved with envelope enforcement;
    values outside are run in exploratory mode and only recorded, never
    asserted (the fixed-point domain itself degenerates there).  Worker
    count defaults to the CARLEMAN_FP_THREADS environment cap.
    """
    if max_workers is None:
        try:
            max_workers = int(os.environ.get("CARLEMAN_FP_THREADS", "1"))
        except ValueError:
            max_workers = 1

    def one(lam: float) -> dict:
        exploratory = not (-1.0 / 6.0 - 1e-12 <= lam <= 0.0)
        entry: dict = {"lam": float(lam), "exploratory": exploratory}
        try:
            coupling = Coupling(lam, exploratory=exploratory)
            cfg = SolverConfig(
                coupling=coupling,
                lambda2=lambda2,
                n_nodes=n_nodes,
                tol_lb=tol_lb,
                max_iters=max_iters,
            )
            res = solve(cfg, enforce_envelope=not exploratory)
            entry.update(
                converged=res.converged,
                iterations=res.iterations,
                final_distance=res.history[-1].lb_distance,
                envelope_min_margin=min(r.envelope_min_margin for r in res.history),
                tail_exponent=res.tail_exponent,
            )
        except Exception as exc:  # diagnostic mode records failures
            entry.update(converged=False, error=f"{type(exc).__name__}: {exc}")
        return entry

    lambdas = list(lambdas)
    if max_workers is None or max_workers <= 1:
        return [one(lam) for lam in lambdas]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, lambdas))


def envelope_curves(coupling: Coupling, b) -> tuple[np.ndarray, np.ndarray]:
    """Power-law envelopes bounding exp(f) for domain members."""
    b = np.asarray(b, dtype=float)
    lower = (1.0 + b) ** coupling.lower_envelope_exponent()
    upper = (1.0 + b) ** coupling.upper_envelope_exponent()
    return lower, upper


def solution_rows(result: SolveResult, coupling: Coupling) -> np.ndarray:
    """Columns b, f(b), exp(f(b)), lower envelope, upper envelope."""
    f = result.grid_function
    lower, upper = envelope_curves(coupling, f.nodes)
    return np.column_stack([f.nodes, f.values, np.exp(f.values), lower, upper])
