"""Fixed-point solver and inequality certification suite for the boundary
two-point function of a one-sided Hilbert-transform integral equation."""

__version__ = "0.1.0"

from .coupling import Coupling
from .grids import (
    GridFunction,
    HARD_CUTOFF,
    POWER_LAW_EXTEND,
    QuadratureConfig,
    make_nodes,
    random_klambda,
)
from .hilbert import HilbertOfExp, hilbert_of_exp, hilbert_power_law
from .operators import (
    OperatorOutput,
    PoleRegionError,
    TOperator,
    lb_distance,
    lb_norm,
    r_op,
    t_op,
    t_prime,
)
from .report import VerificationReport
from .solver import (
    EnvelopeEscapeError,
    IterationReport,
    NonConvergenceError,
    SolveResult,
    SolverConfig,
    consistency_residual,
    initial_guess,
    lambda_scan,
    solve,
)

__all__ = [
    "Coupling",
    "GridFunction",
    "HARD_CUTOFF",
    "POWER_LAW_EXTEND",
    "QuadratureConfig",
    "make_nodes",
    "random_klambda",
    "HilbertOfExp",
    "hilbert_of_exp",
    "hilbert_power_law",
    "OperatorOutput",
    "PoleRegionError",
    "TOperator",
    "lb_distance",
    "lb_norm",
    "r_op",
    "t_op",
    "t_prime",
    "VerificationReport",
    "EnvelopeEscapeError",
    "IterationReport",
    "NonConvergenceError",
    "SolveResult",
    "SolverConfig",
    "consistency_residual",
    "initial_guess",
    "lambda_scan",
    "solve",
]
