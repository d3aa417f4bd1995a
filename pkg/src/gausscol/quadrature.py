"""Legendre-Gauss quadrature: nodes, weights, and integration.

The interior nodes of a rule are the roots of the degree-N Legendre
polynomial, located by Newton iteration from the Chebyshev-angle
estimates.  Roots are computed for one half of the interval and mirrored,
so node and weight symmetry about zero is exact by construction.  The
node vector additionally carries the two noncollocated endpoints -1 and
+1; they receive no quadrature weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GaussRule",
    "RootFindingError",
    "gauss_rule",
    "legendre_eval",
    "quad_integrate",
]

_NEWTON_TOL = 1e-15
_NEWTON_MAX_ITER = 100


class RootFindingError(RuntimeError):
    """Newton iteration failed to locate a Legendre root."""


@dataclass(frozen=True)
class GaussRule:
    """Quadrature rule with an endpoint-augmented node vector.

    Attributes
    ----------
    n_collocation : int
        Number of interior collocation points N.
    nodes : ndarray, shape (N+2,)
        [-1, tau_1, ..., tau_N, +1] with the interior abscissas strictly
        increasing and symmetric about zero.
    weights : ndarray, shape (N,)
        Quadrature weights for the interior nodes.  Positive, symmetric,
        and summing to 2.  The rule integrates polynomials of degree up
        to 2N - 1 exactly.
    """

    n_collocation: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def interior(self) -> np.ndarray:
        """The N interior collocation points tau_1..tau_N."""
        return self.nodes[1:-1]


def legendre_eval(degree: int, t):
    """Evaluate the Legendre polynomial and its derivative at ``t``.

    Uses the three-term recurrence, carrying the derivative alongside the
    value, so the result is finite everywhere including the endpoints.
    ``t`` may be a scalar or an ndarray; outputs match its shape.

    Returns
    -------
    (value, derivative)
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    p = np.ones_like(t)
    dp = np.zeros_like(t)
    if degree >= 1:
        p_prev, dp_prev = p, dp
        p, dp = t.copy(), np.ones_like(t)
        for k in range(1, degree):
            p_next = ((2 * k + 1) * t * p - k * p_prev) / (k + 1)
            dp_next = ((2 * k + 1) * (p + t * dp) - k * dp_prev) / (k + 1)
            p_prev, dp_prev = p, dp
            p, dp = p_next, dp_next
    if scalar:
        return float(p[0]), float(dp[0])
    return p, dp


def _positive_roots(n: int) -> np.ndarray:
    """Newton iteration for the positive roots of P_n, largest first.

    The Chebyshev-angle seeds are accurate enough that a handful of
    iterations reaches machine precision.  Convergence is declared on the
    Newton step: for large n the attainable residual |P_n| at a correctly
    rounded root exceeds any fixed tiny threshold because |P_n'| grows at
    the extreme roots, while the step still collapses below 1e-15.
    """
    half = n // 2
    i = np.arange(1, half + 1)
    roots = np.cos(np.pi * (4 * i - 1) / (4 * n + 2))
    for _ in range(_NEWTON_MAX_ITER):
        p, dp = legendre_eval(n, roots)
        step = p / dp
        roots = roots - step
        if np.all(np.abs(step) <= _NEWTON_TOL) or np.all(np.abs(p) <= _NEWTON_TOL):
            return roots
    raise RootFindingError(
        f"Legendre root search did not converge for degree {n} "
        f"within {_NEWTON_MAX_ITER} iterations"
    )


def gauss_rule(n: int) -> GaussRule:
    """Construct the N-point interior rule with endpoints attached.

    Parameters
    ----------
    n : int
        Number of interior collocation points, at least 1.

    Deterministic: repeated calls return bit-identical arrays.
    """
    if n < 1:
        raise ValueError("rule needs at least one interior node")
    half = n // 2
    roots = _positive_roots(n)

    interior = np.empty(n)
    interior[:half] = -roots
    interior[n - half:] = roots[::-1]

    _, dp = legendre_eval(n, roots)
    w_half = 2.0 / ((1.0 - roots**2) * dp**2)
    weights = np.empty(n)
    weights[:half] = w_half
    weights[n - half:] = w_half[::-1]

    if n % 2 == 1:
        interior[half] = 0.0
        _, dp0 = legendre_eval(n, 0.0)
        weights[half] = 2.0 / dp0**2

    nodes = np.concatenate(([-1.0], interior, [1.0]))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return GaussRule(n_collocation=n, nodes=nodes, weights=weights)


def quad_integrate(rule: GaussRule, samples) -> float:
    """Apply the rule to samples taken at the interior nodes."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.shape[0] != rule.n_collocation:
        raise ValueError(
            f"expected {rule.n_collocation} samples, got shape {samples.shape}"
        )
    return float(rule.weights @ samples)
