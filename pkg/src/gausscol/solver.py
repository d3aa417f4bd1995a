"""Damped Newton solver for the transcribed optimality system.

The iteration solves T(theta) = 0 for the packed unknowns with a dense
LU factorization per step and a backtracking line search on the residual
sup-norm.  Initial guesses come in three flavors: constant (initial
state, zero control, cost gradient as costate), oracle (sample a known
solution at the nodes), and warm (interpolate a converged solution from
another N).  Non-convergence is reported through the solution status
rather than raised, so the best iterate is always available.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .diffmat import (
    bary_interp,
    build_matrices,
    costate_bary_weights,
    state_bary_weights,
)
from .ocp import AnalyticSolution, ProblemSpec, map_time
from .quadrature import GaussRule, gauss_rule
from .transcribe import jacobian, pack_unknowns, residual, unpack_unknowns

__all__ = [
    "SolverOptions",
    "DiscreteSolution",
    "EndpointControlError",
    "newton_solve",
    "endpoint_control",
    "interpolate",
]

_PIVOT_RTOL = 1e-14


class EndpointControlError(RuntimeError):
    """Newton recovery of an endpoint control failed."""


@dataclass(frozen=True)
class SolverOptions:
    tolerance: float = 1e-10
    max_iterations: int = 50
    backtrack: float = 0.5
    min_step: float = 2.0**-20
    armijo: float = 1e-4
    initial_guess: str = "constant"  # constant | oracle | warm

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError("backtrack factor must lie in (0, 1)")
        if self.initial_guess not in ("constant", "oracle", "warm"):
            raise ValueError(f"unknown initial guess mode {self.initial_guess!r}")


@dataclass
class DiscreteSolution:
    """Solver output at one N.

    X has N + 2 rows (row 0 is the fixed initial state), U has N rows,
    Lam has N + 1 rows for tau_1..tau_N+1.  ``residual_history`` records
    the sup-norm at the initial point and after each accepted step.
    ``hessian_positive_definite`` reports whether the block-diagonal
    Hessian of the discrete Lagrangian is positive definite at the
    solution; it is informational only and never used to reject a root.
    """

    X: np.ndarray
    U: np.ndarray
    Lam: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    status: str
    residual_history: list = field(default_factory=list)
    hessian_positive_definite: bool | None = None

    @property
    def n_collocation(self) -> int:
        return self.U.shape[0]


def _constant_guess(spec: ProblemSpec, N: int):
    X = np.tile(spec.x0, (N + 2, 1))
    U = np.zeros((N, spec.n_controls))
    lam = np.asarray(spec.grad_cost(spec.x0), dtype=float)
    Lam = np.tile(lam, (N + 1, 1))
    return X, U, Lam


def _oracle_guess(spec: ProblemSpec, oracle: AnalyticSolution, rule: GaussRule):
    t = map_time(spec, rule.nodes)
    X = np.stack([np.asarray(oracle.state(ti), dtype=float) for ti in t])
    U = np.stack([np.asarray(oracle.control(ti), dtype=float) for ti in t[1:-1]])
    Lam = np.stack([np.asarray(oracle.costate(ti), dtype=float) for ti in t[1:]])
    X[0] = spec.x0
    return X, U, Lam


def _warm_guess(spec: ProblemSpec, prev: DiscreteSolution, rule: GaussRule):
    old_rule = gauss_rule(prev.n_collocation)
    state_nodes = old_rule.nodes[:-1]
    costate_nodes = old_rule.nodes[1:]
    ws = state_bary_weights(old_rule)
    wc = costate_bary_weights(old_rule)
    interior = old_rule.interior
    n_old = prev.n_collocation

    X = np.stack(
        [bary_interp(state_nodes, prev.X[: n_old + 1], t, ws) for t in rule.nodes]
    )
    U = np.stack([bary_interp(interior, prev.U, t) for t in rule.interior])
    Lam = np.stack(
        [bary_interp(costate_nodes, prev.Lam, t, wc) for t in rule.nodes[1:]]
    )
    X[0] = spec.x0
    return X, U, Lam


def newton_solve(
    spec: ProblemSpec,
    n_collocation: int,
    options: SolverOptions | None = None,
    oracle: AnalyticSolution | None = None,
    warm_from: DiscreteSolution | None = None,
) -> DiscreteSolution:
    """Solve the transcribed system at the given N.

    ``oracle`` is required for the "oracle" initial guess, ``warm_from``
    for the "warm" one.  Deterministic: identical inputs yield
    bit-identical solutions.
    """
    opts = options or SolverOptions()
    N = int(n_collocation)
    if N < 1:
        raise ValueError("need at least one collocation point")
    rule = gauss_rule(N)
    dm = build_matrices(rule)
    n, m = spec.n_states, spec.n_controls

    if opts.initial_guess == "constant":
        X, U, Lam = _constant_guess(spec, N)
    elif opts.initial_guess == "oracle":
        if oracle is None:
            raise ValueError("oracle initial guess requested but no oracle given")
        X, U, Lam = _oracle_guess(spec, oracle, rule)
    else:
        if warm_from is None:
            raise ValueError("warm initial guess requested but no prior solution given")
        X, U, Lam = _warm_guess(spec, warm_from, rule)

    res = residual(spec, dm, X, U, Lam)
    rnorm = res.sup_norm()
    history = [rnorm]
    iterations = 0
    converged = False
    status = "max_iterations"
    best = (rnorm, X, U, Lam)

    while True:
        if rnorm <= opts.tolerance:
            converged = True
            status = "converged"
            break
        if iterations >= opts.max_iterations:
            status = "max_iterations"
            break

        J = jacobian(spec, dm, X, U, Lam)
        lu, piv = lu_factor(J, check_finite=False)
        pivots = np.abs(np.diag(lu))
        if pivots.min() <= _PIVOT_RTOL * pivots.max():
            status = "singular_jacobian"
            break
        step = lu_solve((lu, piv), -res.pack(), check_finite=False)
        step_norm = np.linalg.norm(step)

        # Backtracking on the norm of the simplified Newton step
        # ||J(theta_k)^{-1} T(trial)|| rather than on ||T(trial)|| itself.
        # The raw residual mixes equations of very different scales; its
        # sup-norm plateaus on problems whose control Hessian passes near
        # singularity and full damping then stalls far from the solution.
        # The transformed norm is invariant under row scaling of T, costs
        # one extra triangular solve per trial, and equals ||step|| at
        # alpha = 0, so the Armijo test below reads as usual.
        theta = pack_unknowns(X[1:], U, Lam)
        alpha = 1.0
        accepted = False
        while alpha >= opts.min_step:
            Xt, Ut, Lt = unpack_unknowns(theta + alpha * step, n, m, N)
            X_full = np.vstack([X[:1], Xt])
            trial = residual(spec, dm, X_full, Ut, Lt)
            trial_step = lu_solve((lu, piv), -trial.pack(), check_finite=False)
            tnorm = np.linalg.norm(trial_step)
            if np.isfinite(tnorm) and tnorm <= (1.0 - opts.armijo * alpha) * step_norm:
                X, U, Lam = X_full, Ut, Lt
                res, rnorm = trial, trial.sup_norm()
                accepted = True
                break
            alpha *= opts.backtrack
        if not accepted:
            status = "line_search_stalled"
            break
        iterations += 1
        history.append(rnorm)
        if rnorm < best[0]:
            best = (rnorm, X, U, Lam)

    if not converged:
        rnorm, X, U, Lam = best

    pd_flag = _lagrangian_hessian_pd(spec, rule, X, U, Lam) if converged else None
    return DiscreteSolution(
        X=X,
        U=U,
        Lam=Lam,
        residual_norm=rnorm,
        iterations=iterations,
        converged=converged,
        status=status,
        residual_history=history,
        hessian_positive_definite=pd_flag,
    )


def _lagrangian_hessian_pd(spec, rule, X, U, Lam) -> bool:
    """Positive definiteness of the block-diagonal Lagrangian Hessian.

    Blocks are w_i * [[Q_i, S_i], [S_i^T, R_i]] at each interior node and
    the terminal cost Hessian; the time scale multiplies the Hamiltonian
    blocks but cannot change their sign.
    """
    s = spec.time_scale
    for i in range(1, rule.n_collocation + 1):
        x, u, lam = X[i], U[i - 1], Lam[i - 1]
        Q = s * spec.q_matrix(x, u, lam)
        S = s * spec.s_matrix(x, u, lam)
        R = s * spec.r_matrix(x, u, lam)
        block = rule.weights[i - 1] * np.block([[Q, S], [S.T, R]])
        if np.linalg.eigvalsh(block).min() <= 0.0:
            return False
    terminal = spec.cost_hessian(X[rule.n_collocation + 1])
    return bool(np.linalg.eigvalsh(terminal).min() > 0.0)


def endpoint_control(
    spec: ProblemSpec,
    x,
    lam,
    u_seed,
    tolerance: float = 1e-12,
    max_iterations: int = 50,
) -> np.ndarray:
    """Recover a control at a noncollocated point from stationarity.

    Newton iteration on grad_u H(x, u, lam) = 0 with Jacobian hess_uu,
    seeded at the nearest interior control.
    """
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    u = np.array(u_seed, dtype=float)
    for _ in range(max_iterations):
        g = spec.grad_h_control(x, u, lam)
        if np.abs(g).max() <= tolerance:
            return u
        R = spec.r_matrix(x, u, lam)
        try:
            du = np.linalg.solve(R, -g)
        except np.linalg.LinAlgError as exc:
            raise EndpointControlError("singular stationarity Jacobian") from exc
        u = u + du
    raise EndpointControlError(
        f"no stationary control within {max_iterations} iterations"
    )


def interpolate(rule: GaussRule, nodal_values, basis: str, t):
    """Evaluate the state or costate interpolant at tau = t in [-1, 1].

    basis "state" interpolates over {tau_0, ..., tau_N}; basis "costate"
    over {tau_1, ..., tau_N+1}.  ``nodal_values`` carries one row per
    node.  Returns the nodal row exactly when t matches a node.  ``t``
    may be a scalar or a 1-D array.
    """
    if basis == "state":
        nodes = rule.nodes[:-1]
        weights = state_bary_weights(rule)
    elif basis == "costate":
        nodes = rule.nodes[1:]
        weights = costate_bary_weights(rule)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    values = np.asarray(nodal_values, dtype=float)
    if values.shape[0] != rule.n_collocation + 1:
        raise ValueError(
            f"expected {rule.n_collocation + 1} rows, got {values.shape[0]}"
        )
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < -1.0) or np.any(t_arr > 1.0):
        raise ValueError("t outside [-1, 1]")
    if t_arr.ndim == 0:
        return bary_interp(nodes, values, float(t_arr), weights)
    return np.stack([bary_interp(nodes, values, ti, weights) for ti in t_arr])
