"""fracsolve: product-integration and convolution-quadrature solvers for
Caputo fractional differential equations, with a benchmark problem library
and a Mittag-Leffler special function."""

from .backends import BACKEND
from .errors import (
    DimensionMismatch,
    EmptyTimeSpan,
    FracsolveError,
    LengthMismatch,
    MissingInitialConditions,
    NewtonFailed,
    NoExactSolution,
    NonCommensurate,
    NonConvergence,
    NonPositiveExponent,
    NonPositiveOrder,
    PoleError,
    SingularJacobian,
    SingularMomentSystem,
    ZeroLeadingCoefficient,
)
from .library import (
    CASES,
    BenchmarkCase,
    applicable_methods,
    exact_error,
    get_case,
    run_case,
)
from .multiterm import (
    CompanionSystem,
    MultiTermMethodId,
    mt_method_from_token,
    oscillator_problem,
    solve_multiterm,
    to_companion,
)
from .problems import (
    FodeProblem,
    FractionalOrderVec,
    MultiTermProblem,
    Retcode,
    Solution,
    SolverConfig,
    make_fode_problem,
    make_multiterm_problem,
    uniform_mesh,
)
from .solvers import (
    MethodId,
    method_from_token,
    newton_step,
    solve,
    solve_flmm,
    solve_pece,
    solve_pi_explicit,
    solve_pi_implicit,
)
from .specfun import MittagLefflerParams, mittag_leffler, mittleff
from .weights import (
    FlmmWeights,
    PiCoefficients,
    flmm_omega,
    flmm_weights,
    history_sum,
    pi_coefficients,
    starting_weights,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BenchmarkCase",
    "CASES",
    "CompanionSystem",
    "DimensionMismatch",
    "EmptyTimeSpan",
    "FlmmWeights",
    "FodeProblem",
    "FracsolveError",
    "FractionalOrderVec",
    "LengthMismatch",
    "MethodId",
    "MissingInitialConditions",
    "MittagLefflerParams",
    "MultiTermMethodId",
    "MultiTermProblem",
    "NewtonFailed",
    "NoExactSolution",
    "NonCommensurate",
    "NonConvergence",
    "NonPositiveExponent",
    "NonPositiveOrder",
    "PiCoefficients",
    "PoleError",
    "Retcode",
    "SingularJacobian",
    "SingularMomentSystem",
    "Solution",
    "SolverConfig",
    "ZeroLeadingCoefficient",
    "applicable_methods",
    "exact_error",
    "flmm_omega",
    "flmm_weights",
    "get_case",
    "history_sum",
    "make_fode_problem",
    "make_multiterm_problem",
    "method_from_token",
    "mittag_leffler",
    "mittleff",
    "mt_method_from_token",
    "newton_step",
    "oscillator_problem",
    "pi_coefficients",
    "run_case",
    "solve",
    "solve_flmm",
    "solve_multiterm",
    "solve_pece",
    "solve_pi_explicit",
    "solve_pi_implicit",
    "starting_weights",
    "to_companion",
    "uniform_mesh",
]
