"""Problem definitions for Mayer-form optimal control.

A problem minimizes a terminal cost C(x(tf)) subject to dx/dt = f(x, u)
on [t0, tf] with x(t0) fixed.  The control is unconstrained.  First and
second derivatives of the dynamics and cost may be supplied analytically;
anything missing is filled in by central finite differences.  The second
derivatives enter through the Hamiltonian H(x, u, lam) = lam . f(x, u).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "ProblemSpec",
    "AnalyticSolution",
    "map_time",
    "fd_derivative_check",
    "hager_example",
    "get_problem",
    "problem_names",
]

_FD_BASE_STEP = 1e-6


def _fd_matrix(fun: Callable, point: np.ndarray) -> np.ndarray:
    """Central-difference Jacobian of a vector function, one column per coordinate."""
    point = np.asarray(point, dtype=float)
    cols = []
    for b in range(point.size):
        h = _FD_BASE_STEP * (1.0 + abs(point[b]))
        plus = point.copy()
        plus[b] += h
        minus = point.copy()
        minus[b] -= h
        cols.append((np.asarray(fun(plus), dtype=float) - np.asarray(fun(minus), dtype=float)) / (2.0 * h))
    return np.stack(cols, axis=-1)


@dataclass
class ProblemSpec:
    """Continuous problem data.

    Callback conventions: states x and controls u are 1-D arrays of
    length n_states and n_controls.  ``dynamics(x, u)`` returns the state
    rate, ``jac_state``/``jac_control`` its Jacobians with one row per
    state equation.  ``hess_xx``, ``hess_xu``, ``hess_uu`` are the second
    derivatives of the Hamiltonian with respect to (x, x), (x, u) and
    (u, u); ``hess_xu`` has shape (n_states, n_controls) and its
    transpose is used where the (u, x) ordering is needed.  ``cost``,
    ``grad_cost``, ``hess_cost`` describe the terminal cost.

    Derivative callbacks left as None are replaced by central-difference
    closures in ``__post_init__`` and ``derivative_mode`` is then
    "finite-difference"; with a full analytic set it is "analytic".
    Symmetric blocks from analytic callbacks are validated (1e-10), while
    finite-difference blocks are symmetrized.
    """

    n_states: int
    n_controls: int
    t0: float
    tf: float
    x0: np.ndarray
    dynamics: Callable
    cost: Callable
    jac_state: Callable | None = None
    jac_control: Callable | None = None
    hess_xx: Callable | None = None
    hess_xu: Callable | None = None
    hess_uu: Callable | None = None
    grad_cost: Callable | None = None
    hess_cost: Callable | None = None
    name: str = ""
    derivative_mode: str = field(init=False, default="analytic")
    _fd_filled: frozenset = field(init=False, default=frozenset(), repr=False)

    def __post_init__(self):
        if self.n_states < 1 or self.n_controls < 1:
            raise ValueError("need at least one state and one control")
        if not self.tf > self.t0:
            raise ValueError("tf must exceed t0")
        self.x0 = np.asarray(self.x0, dtype=float)
        if self.x0.shape != (self.n_states,):
            raise ValueError(f"x0 has shape {self.x0.shape}, expected ({self.n_states},)")

        filled = set()
        if self.jac_state is None:
            filled.add("jac_state")
            dyn = self.dynamics
            self.jac_state = lambda x, u: _fd_matrix(lambda xx: dyn(xx, u), x)
        if self.jac_control is None:
            filled.add("jac_control")
            dyn = self.dynamics
            self.jac_control = lambda x, u: _fd_matrix(lambda uu: dyn(x, uu), u)
        if self.grad_cost is None:
            filled.add("grad_cost")
            cost = self.cost
            self.grad_cost = lambda x: _fd_matrix(lambda xx: np.array([cost(xx)]), x)[0]
        # Hessians differentiate the (possibly just filled) first derivatives.
        if self.hess_xx is None:
            filled.add("hess_xx")
            jx = self.jac_state
            self.hess_xx = lambda x, u, lam: _fd_matrix(
                lambda xx: np.asarray(jx(xx, u), dtype=float).T @ lam, x
            )
        if self.hess_xu is None:
            filled.add("hess_xu")
            jx = self.jac_state
            self.hess_xu = lambda x, u, lam: _fd_matrix(
                lambda uu: np.asarray(jx(x, uu), dtype=float).T @ lam, u
            )
        if self.hess_uu is None:
            filled.add("hess_uu")
            ju = self.jac_control
            self.hess_uu = lambda x, u, lam: _fd_matrix(
                lambda uu: np.asarray(ju(x, uu), dtype=float).T @ lam, u
            )
        if self.hess_cost is None:
            filled.add("hess_cost")
            gc = self.grad_cost
            self.hess_cost = lambda x: _fd_matrix(lambda xx: np.asarray(gc(xx), dtype=float), x)
        self._fd_filled = frozenset(filled)
        self.derivative_mode = "finite-difference" if filled else "analytic"

    @property
    def time_scale(self) -> float:
        """Half-width of the horizon; multiplies f when time is mapped to [-1, 1]."""
        return 0.5 * (self.tf - self.t0)

    def _symmetric(self, mat: np.ndarray, label: str, fd: bool) -> np.ndarray:
        if fd:
            return 0.5 * (mat + mat.T)
        gap = float(np.abs(mat - mat.T).max())
        if gap > 1e-10 * (1.0 + float(np.abs(mat).max())):
            raise ValueError(f"{label} is not symmetric (gap {gap:.3e})")
        return mat

    def grad_h_state(self, x, u, lam) -> np.ndarray:
        """Gradient of the Hamiltonian in x."""
        return np.asarray(self.jac_state(x, u), dtype=float).T @ lam

    def grad_h_control(self, x, u, lam) -> np.ndarray:
        """Gradient of the Hamiltonian in u."""
        return np.asarray(self.jac_control(x, u), dtype=float).T @ lam

    def q_matrix(self, x, u, lam) -> np.ndarray:
        q = np.asarray(self.hess_xx(x, u, lam), dtype=float)
        return self._symmetric(q, "state-state Hamiltonian Hessian", "hess_xx" in self._fd_filled)

    def s_matrix(self, x, u, lam) -> np.ndarray:
        return np.asarray(self.hess_xu(x, u, lam), dtype=float)

    def r_matrix(self, x, u, lam) -> np.ndarray:
        r = np.asarray(self.hess_uu(x, u, lam), dtype=float)
        return self._symmetric(r, "control-control Hamiltonian Hessian", "hess_uu" in self._fd_filled)

    def cost_hessian(self, x) -> np.ndarray:
        t = np.asarray(self.hess_cost(x), dtype=float)
        return self._symmetric(t, "terminal cost Hessian", "hess_cost" in self._fd_filled)


@dataclass(frozen=True)
class AnalyticSolution:
    """Closed-form optimal state, control, and costate on [t0, tf]."""

    state: Callable
    control: Callable
    costate: Callable


def map_time(spec: ProblemSpec, tau):
    """Affine map from tau in [-1, 1] to physical time in [t0, tf]."""
    arr = np.asarray(tau, dtype=float)
    if np.any(arr < -1.0) or np.any(arr > 1.0):
        raise ValueError("tau outside [-1, 1]")
    out = spec.t0 + (arr + 1.0) * (spec.tf - spec.t0) / 2.0
    return float(out) if np.ndim(tau) == 0 else out


def fd_derivative_check(spec: ProblemSpec, x, u, lam) -> float:
    """Worst relative gap between analytic derivatives and central differences.

    Each analytic first derivative is compared against differences of the
    level below it (dynamics or cost), each second derivative against
    differences of the analytic first derivatives.  Requires a spec with
    a full analytic derivative set.
    """
    if spec.derivative_mode != "analytic":
        raise ValueError("derivative check needs analytic callbacks")
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)

    def gap(analytic, fd):
        analytic = np.asarray(analytic, dtype=float)
        return float(np.abs(fd - analytic).max() / (1.0 + np.abs(analytic).max()))

    worst = gap(spec.jac_state(x, u), _fd_matrix(lambda xx: spec.dynamics(xx, u), x))
    worst = max(worst, gap(spec.jac_control(x, u), _fd_matrix(lambda uu: spec.dynamics(x, uu), u)))
    worst = max(
        worst,
        gap(spec.hess_xx(x, u, lam), _fd_matrix(lambda xx: spec.grad_h_state(xx, u, lam), x)),
    )
    worst = max(
        worst,
        gap(spec.hess_xu(x, u, lam), _fd_matrix(lambda uu: spec.grad_h_state(x, uu, lam), u)),
    )
    worst = max(
        worst,
        gap(spec.hess_uu(x, u, lam), _fd_matrix(lambda uu: spec.grad_h_control(x, uu, lam), u)),
    )
    worst = max(
        worst,
        gap(spec.grad_cost(x), _fd_matrix(lambda xx: np.array([spec.cost(xx)]), x)[0]),
    )
    worst = max(worst, gap(spec.hess_cost(x), _fd_matrix(spec.grad_cost, x)))
    return worst


def hager_example() -> tuple[ProblemSpec, AnalyticSolution]:
    """Benchmark problem with a known closed-form optimum.

    Minimize -x(2) subject to dx/dt = 2.5 (-x + x u - u^2), x(0) = 1 on
    [0, 2].  The optimal control satisfies u = x / 2 and the terminal
    costate equals -1 exactly.
    """
    rate = 2.5

    def dynamics(x, u):
        return rate * (-x + x * u - u**2)

    def jac_state(x, u):
        return np.array([[rate * (u[0] - 1.0)]])

    def jac_control(x, u):
        return np.array([[rate * (x[0] - 2.0 * u[0])]])

    def hess_xx(x, u, lam):
        return np.zeros((1, 1))

    def hess_xu(x, u, lam):
        return np.array([[rate * lam[0]]])

    def hess_uu(x, u, lam):
        return np.array([[-2.0 * rate * lam[0]]])

    spec = ProblemSpec(
        n_states=1,
        n_controls=1,
        t0=0.0,
        tf=2.0,
        x0=np.array([1.0]),
        dynamics=dynamics,
        cost=lambda x: -x[0],
        jac_state=jac_state,
        jac_control=jac_control,
        hess_xx=hess_xx,
        hess_xu=hess_xu,
        hess_uu=hess_uu,
        grad_cost=lambda x: np.array([-1.0]),
        hess_cost=lambda x: np.zeros((1, 1)),
        name="hager-example",
    )

    denom = math.exp(-5.0) + 9.0 * math.exp(5.0) + 6.0

    def a(t):
        return 1.0 + 3.0 * math.exp(rate * t)

    oracle = AnalyticSolution(
        state=lambda t: np.array([4.0 / a(t)]),
        control=lambda t: np.array([2.0 / a(t)]),
        costate=lambda t: np.array([-(a(t) ** 2) * math.exp(-rate * t) / denom]),
    )
    return spec, oracle


_REGISTRY = {
    "hager-example": hager_example,
}


def problem_names() -> list[str]:
    return sorted(_REGISTRY)


def get_problem(name: str) -> tuple[ProblemSpec, AnalyticSolution | None]:
    """Look up a builtin problem by registry name."""
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown problem {name!r}; available: {', '.join(problem_names())}"
        ) from None
    return factory()
