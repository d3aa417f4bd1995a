"""Transcription of the optimality conditions to a discrete root problem.

The unknowns are the states X_1..X_N+1, the controls U_1..U_N, and the
costates Lam_1..Lam_N+1; X_0 is the fixed initial state and is never a
variable.  Stacked in that order the unknown vector has length
n (2N + 2) + m N, and the residual has the same length, split into five
blocks:

  T1_i: collocated dynamics at tau_i,
  T2:   terminal state by quadrature,
  T3_i: collocated costate equation at tau_i,
  T4:   terminal costate versus the cost gradient,
  T5_i: control stationarity at tau_i.

Time runs over [-1, 1] internally; the dynamics and every derivative
block built from them pick up the factor (tf - t0)/2 here, at assembly,
and nowhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffmat import DiffMatrices
from .ocp import ProblemSpec

__all__ = [
    "ResidualVector",
    "pack_unknowns",
    "unpack_unknowns",
    "unpack_residual",
    "residual",
    "jacobian",
    "kkt_transform",
    "kkt_transform_inverse",
    "terminal_state",
]


@dataclass
class ResidualVector:
    """The five residual blocks; shapes (N,n), (n,), (N,n), (n,), (N,m)."""

    T1: np.ndarray
    T2: np.ndarray
    T3: np.ndarray
    T4: np.ndarray
    T5: np.ndarray

    def pack(self) -> np.ndarray:
        return np.concatenate(
            [self.T1.ravel(), self.T2, self.T3.ravel(), self.T4, self.T5.ravel()]
        )

    def sup_norm(self) -> float:
        """Largest Euclidean norm over the 3N + 2 block components."""
        return max(self.block_norms().values())

    def block_norms(self) -> dict:
        def rows(block):
            b = np.atleast_2d(block)
            return float(np.sqrt((b**2).sum(axis=1)).max())

        return {
            "dynamics": rows(self.T1),
            "terminal_state": rows(self.T2),
            "costate": rows(self.T3),
            "terminal_costate": rows(self.T4),
            "stationarity": rows(self.T5),
        }


def pack_unknowns(X, U, Lam) -> np.ndarray:
    """Stack unknown rows X_1..X_N+1, U_1..U_N, Lam_1..Lam_N+1."""
    return np.concatenate([np.ravel(X), np.ravel(U), np.ravel(Lam)])


def unpack_unknowns(theta, n: int, m: int, n_collocation: int):
    """Inverse of pack_unknowns; returns (X_rows, U, Lam)."""
    N = n_collocation
    size = n * (2 * N + 2) + m * N
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (size,):
        raise ValueError(f"theta has shape {theta.shape}, expected ({size},)")
    nx = n * (N + 1)
    nu = m * N
    X = theta[:nx].reshape(N + 1, n)
    U = theta[nx : nx + nu].reshape(N, m)
    Lam = theta[nx + nu :].reshape(N + 1, n)
    return X, U, Lam


def unpack_residual(vec, n: int, m: int, n_collocation: int) -> ResidualVector:
    """Split a packed residual back into its five blocks."""
    N = n_collocation
    size = n * (2 * N + 2) + m * N
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (size,):
        raise ValueError(f"residual has shape {vec.shape}, expected ({size},)")
    o1 = n * N
    o2 = o1 + n
    o3 = o2 + n * N
    o4 = o3 + n
    return ResidualVector(
        T1=vec[:o1].reshape(N, n),
        T2=vec[o1:o2].copy(),
        T3=vec[o2:o3].reshape(N, n),
        T4=vec[o3:o4].copy(),
        T5=vec[o4:].reshape(N, m),
    )


def _check_shapes(spec: ProblemSpec, dm: DiffMatrices, X, U, Lam):
    N = dm.rule.n_collocation
    n, m = spec.n_states, spec.n_controls
    if X.shape != (N + 2, n):
        raise ValueError(f"X has shape {X.shape}, expected {(N + 2, n)}")
    if U.shape != (N, m):
        raise ValueError(f"U has shape {U.shape}, expected {(N, m)}")
    if Lam.shape != (N + 1, n):
        raise ValueError(f"Lam has shape {Lam.shape}, expected {(N + 1, n)}")


def residual(spec: ProblemSpec, dm: DiffMatrices, X, U, Lam) -> ResidualVector:
    """Evaluate the five blocks at the given point.

    X carries N + 2 rows with X[0] the fixed initial state; U has N rows
    and Lam has N + 1 rows (tau_1..tau_N+1).
    """
    X = np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    Lam = np.asarray(Lam, dtype=float)
    _check_shapes(spec, dm, X, U, Lam)
    N = dm.rule.n_collocation
    n, m = spec.n_states, spec.n_controls
    s = spec.time_scale

    F = np.empty((N, n))
    Gx = np.empty((N, n))
    Gu = np.empty((N, m))
    for i in range(1, N + 1):
        x, u, lam = X[i], U[i - 1], Lam[i - 1]
        try:
            F[i - 1] = np.asarray(spec.dynamics(x, u), dtype=float)
            Gx[i - 1] = spec.grad_h_state(x, u, lam)
            Gu[i - 1] = spec.grad_h_control(x, u, lam)
        except Exception as exc:
            raise RuntimeError(
                f"callback evaluation failed at collocation index {i}"
            ) from exc
    F *= s
    Gx *= s
    Gu *= s

    T1 = dm.D @ X[: N + 1] - F
    T2 = X[N + 1] - X[0] - dm.rule.weights @ F
    T3 = dm.Ddag @ Lam + Gx
    T4 = Lam[N] - np.asarray(spec.grad_cost(X[N + 1]), dtype=float)
    return ResidualVector(T1=T1, T2=T2, T3=T3, T4=T4, T5=Gu)


def jacobian(spec: ProblemSpec, dm: DiffMatrices, X, U, Lam) -> np.ndarray:
    """Dense Jacobian of the packed residual in the packed unknowns.

    Row and column ordering match ResidualVector.pack and pack_unknowns.
    """
    X = np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    Lam = np.asarray(Lam, dtype=float)
    _check_shapes(spec, dm, X, U, Lam)
    N = dm.rule.n_collocation
    n, m = spec.n_states, spec.n_controls
    s = spec.time_scale
    w = dm.rule.weights

    size = n * (2 * N + 2) + m * N
    J = np.zeros((size, size))
    oX = 0
    oU = n * (N + 1)
    oL = oU + m * N
    r1 = 0
    r2 = n * N
    r3 = r2 + n
    r4 = r3 + n * N
    r5 = r4 + n
    eye = np.eye(n)

    J[r1:r2, oX : oX + n * N] = np.kron(dm.D[:, 1:], eye)
    J[r3:r4, oL : oL + n * (N + 1)] = np.kron(dm.Ddag, eye)

    for i in range(1, N + 1):
        x, u, lam = X[i], U[i - 1], Lam[i - 1]
        A = s * np.asarray(spec.jac_state(x, u), dtype=float)
        B = s * np.asarray(spec.jac_control(x, u), dtype=float)
        Q = s * spec.q_matrix(x, u, lam)
        S = s * spec.s_matrix(x, u, lam)
        R = s * spec.r_matrix(x, u, lam)
        xi = oX + n * (i - 1)
        ui = oU + m * (i - 1)
        li = oL + n * (i - 1)
        t1 = r1 + n * (i - 1)
        t3 = r3 + n * (i - 1)
        t5 = r5 + m * (i - 1)
        J[t1 : t1 + n, xi : xi + n] -= A
        J[t1 : t1 + n, ui : ui + m] = -B
        J[r2 : r2 + n, xi : xi + n] = -w[i - 1] * A
        J[r2 : r2 + n, ui : ui + m] = -w[i - 1] * B
        J[t3 : t3 + n, xi : xi + n] = Q
        J[t3 : t3 + n, ui : ui + m] = S
        J[t3 : t3 + n, li : li + n] += A.T
        J[t5 : t5 + m, xi : xi + n] = S.T
        J[t5 : t5 + m, ui : ui + m] = R
        J[t5 : t5 + m, li : li + n] = B.T

    J[r2 : r2 + n, oX + n * N : oX + n * (N + 1)] = eye
    J[r4 : r4 + n, oX + n * N : oX + n * (N + 1)] = -spec.cost_hessian(X[N + 1])
    J[r4 : r4 + n, oL + n * N : oL + n * (N + 1)] = eye
    return J


def kkt_transform(weights, lam_raw) -> np.ndarray:
    """Map raw multipliers of the discrete problem to costate estimates.

    Rows 1..N are divided by their quadrature weight and shifted by the
    terminal multiplier; the terminal row passes through unchanged.
    """
    weights = np.asarray(weights, dtype=float)
    lam_raw = np.asarray(lam_raw, dtype=float)
    if np.any(weights <= 0.0):
        raise ValueError("weights must be positive")
    N = weights.shape[0]
    if lam_raw.shape[0] != N + 1:
        raise ValueError(f"expected {N + 1} multiplier rows, got {lam_raw.shape[0]}")
    out = np.array(lam_raw, dtype=float)
    w = weights if lam_raw.ndim == 1 else weights[:, None]
    out[:N] = lam_raw[:N] / w + lam_raw[N]
    return out


def kkt_transform_inverse(weights, Lam) -> np.ndarray:
    """Exact inverse of kkt_transform."""
    weights = np.asarray(weights, dtype=float)
    Lam = np.asarray(Lam, dtype=float)
    if np.any(weights <= 0.0):
        raise ValueError("weights must be positive")
    N = weights.shape[0]
    if Lam.shape[0] != N + 1:
        raise ValueError(f"expected {N + 1} costate rows, got {Lam.shape[0]}")
    out = np.array(Lam, dtype=float)
    w = weights if Lam.ndim == 1 else weights[:, None]
    out[:N] = w * (Lam[:N] - Lam[N])
    return out


def terminal_state(weights, X, U, spec: ProblemSpec) -> np.ndarray:
    """Quadrature propagation of the initial state to the terminal time."""
    weights = np.asarray(weights, dtype=float)
    X = np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    N = weights.shape[0]
    if X.shape[0] < N + 1:
        raise ValueError("X must carry the initial row plus N interior rows")
    if U.shape[0] != N:
        raise ValueError(f"expected {N} control rows, got {U.shape[0]}")
    s = spec.time_scale
    F = np.stack(
        [np.asarray(spec.dynamics(X[i], U[i - 1]), dtype=float) for i in range(1, N + 1)]
    )
    return X[0] + s * (weights @ F)
