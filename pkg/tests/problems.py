"""Small control problems with hand-checkable solutions, shared by the tests."""

import numpy as np

from gausscol import AnalyticSolution, ProblemSpec


def coast_problem() -> tuple[ProblemSpec, AnalyticSolution]:
    """dx/dt = -u^2, cost -x(1), x(0) = 1 on [-1, 1].

    Any control waste shrinks the terminal state, so the optimum coasts:
    U = 0, X = 1, Lam = -1 everywhere.  The constant initial guess is the
    exact solution, which makes this the canonical zero-iteration check.
    """
    spec = ProblemSpec(
        n_states=1,
        n_controls=1,
        t0=-1.0,
        tf=1.0,
        x0=np.array([1.0]),
        dynamics=lambda x, u: -(u**2),
        cost=lambda x: -x[0],
        jac_state=lambda x, u: np.zeros((1, 1)),
        jac_control=lambda x, u: np.array([[-2.0 * u[0]]]),
        hess_xx=lambda x, u, lam: np.zeros((1, 1)),
        hess_xu=lambda x, u, lam: np.zeros((1, 1)),
        hess_uu=lambda x, u, lam: np.array([[-2.0 * lam[0]]]),
        grad_cost=lambda x: np.array([-1.0]),
        hess_cost=lambda x: np.zeros((1, 1)),
        name="coast",
    )
    oracle = AnalyticSolution(
        state=lambda t: np.array([1.0]),
        control=lambda t: np.array([0.0]),
        costate=lambda t: np.array([-1.0]),
    )
    return spec, oracle


_LQ_A = np.array([[0.0, 1.0], [-1.0, 0.0]])
_LQ_B = np.array([[0.0], [1.0]])
_LQ_P = np.diag([1.0, 2.0])


def lq_problem() -> ProblemSpec:
    """Two-state rotation driven by one control, quadratic terminal cost.

    Linear dynamics and quadratic cost make every second derivative
    constant, so the transcription Jacobian is independent of the point
    where it is evaluated.
    """
    return ProblemSpec(
        n_states=2,
        n_controls=1,
        t0=0.0,
        tf=1.0,
        x0=np.array([1.0, 0.0]),
        dynamics=lambda x, u: _LQ_A @ x + _LQ_B @ u,
        cost=lambda x: 0.5 * float(x @ _LQ_P @ x),
        jac_state=lambda x, u: _LQ_A,
        jac_control=lambda x, u: _LQ_B,
        hess_xx=lambda x, u, lam: np.zeros((2, 2)),
        hess_xu=lambda x, u, lam: np.zeros((2, 1)),
        hess_uu=lambda x, u, lam: np.zeros((1, 1)),
        grad_cost=lambda x: _LQ_P @ x,
        hess_cost=lambda x: _LQ_P,
        name="lq",
    )


def integrator_problem() -> ProblemSpec:
    """dx/dt = u on [0, 4], terminal cost -x(4).

    With state samples from x(t) = t^2 and control samples from u = 2t the
    collocation rows vanish identically: the state is a polynomial the
    differentiation matrix handles exactly.
    """
    return ProblemSpec(
        n_states=1,
        n_controls=1,
        t0=0.0,
        tf=4.0,
        x0=np.array([0.0]),
        dynamics=lambda x, u: u.copy(),
        cost=lambda x: -x[0],
        jac_state=lambda x, u: np.zeros((1, 1)),
        jac_control=lambda x, u: np.eye(1),
        hess_xx=lambda x, u, lam: np.zeros((1, 1)),
        hess_xu=lambda x, u, lam: np.zeros((1, 1)),
        hess_uu=lambda x, u, lam: np.zeros((1, 1)),
        grad_cost=lambda x: np.array([-1.0]),
        hess_cost=lambda x: np.zeros((1, 1)),
        name="integrator",
    )
