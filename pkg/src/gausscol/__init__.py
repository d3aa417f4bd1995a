"""Gauss collocation for unconstrained Mayer-form optimal control.

The package builds Legendre-Gauss quadrature rules with noncollocated
endpoints, the state and costate differentiation matrices, transcribes
the continuous first-order optimality conditions into a square nonlinear
system, solves it with a damped Newton method, and measures convergence
against closed-form solutions.
"""

from .convergence import (
    ConvergenceReport,
    FittedRates,
    SweepRow,
    dense_sup_error,
    fit_decay_rate,
    omega_norm,
    run_sweep,
    sup_error,
)
from .diffmat import (
    CertEntry,
    CertificationReport,
    DiffMatrices,
    bary_interp,
    bary_weights,
    build_D,
    build_Ddag,
    build_matrices,
    certify,
    check_p1,
    check_p2,
    costate_bary_weights,
    differentiate,
    flip_deviation,
    state_bary_weights,
)
from .ocp import (
    AnalyticSolution,
    ProblemSpec,
    fd_derivative_check,
    get_problem,
    hager_example,
    map_time,
    problem_names,
)
from .quadrature import GaussRule, RootFindingError, gauss_rule, legendre_eval, quad_integrate
from .solver import (
    DiscreteSolution,
    EndpointControlError,
    SolverOptions,
    endpoint_control,
    interpolate,
    newton_solve,
)
from .transcribe import (
    ResidualVector,
    jacobian,
    kkt_transform,
    kkt_transform_inverse,
    pack_unknowns,
    residual,
    terminal_state,
    unpack_residual,
    unpack_unknowns,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticSolution",
    "CertEntry",
    "CertificationReport",
    "ConvergenceReport",
    "DiffMatrices",
    "DiscreteSolution",
    "EndpointControlError",
    "FittedRates",
    "GaussRule",
    "ProblemSpec",
    "ResidualVector",
    "RootFindingError",
    "SolverOptions",
    "SweepRow",
    "bary_interp",
    "bary_weights",
    "build_D",
    "build_Ddag",
    "build_matrices",
    "certify",
    "check_p1",
    "check_p2",
    "costate_bary_weights",
    "dense_sup_error",
    "differentiate",
    "endpoint_control",
    "fd_derivative_check",
    "fit_decay_rate",
    "flip_deviation",
    "gauss_rule",
    "get_problem",
    "hager_example",
    "interpolate",
    "jacobian",
    "kkt_transform",
    "kkt_transform_inverse",
    "legendre_eval",
    "map_time",
    "newton_solve",
    "omega_norm",
    "pack_unknowns",
    "problem_names",
    "quad_integrate",
    "residual",
    "run_sweep",
    "state_bary_weights",
    "sup_error",
    "terminal_state",
    "unpack_residual",
    "unpack_unknowns",
]
