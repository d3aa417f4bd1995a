"""Error measurement and convergence-rate studies against an oracle.

Errors are measured at the points where each variable is actually
carried: states at all N + 2 nodes, controls at the N interior nodes,
costates at the interior nodes plus the terminal point.  A sweep solves
the same problem over an ascending list of N, warm-starting each solve
from the previous one, and fits log10(error) against N by least squares
to estimate the exponential decay rate per variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .diffmat import bary_interp
from .ocp import AnalyticSolution, ProblemSpec, map_time
from .quadrature import GaussRule, gauss_rule
from .solver import DiscreteSolution, SolverOptions, interpolate, newton_solve

__all__ = [
    "SweepRow",
    "FittedRates",
    "ConvergenceReport",
    "sup_error",
    "dense_sup_error",
    "omega_norm",
    "fit_decay_rate",
    "run_sweep",
    "CSV_HEADER",
]

ERROR_FLOOR = 1e-12
CSV_HEADER = "N,err_state,err_control,err_costate,iterations,residual"


@dataclass(frozen=True)
class SweepRow:
    n_collocation: int
    err_state: float
    err_control: float
    err_costate: float
    iterations: int
    residual_norm: float


@dataclass(frozen=True)
class FittedRates:
    state: float
    control: float
    costate: float


@dataclass(frozen=True)
class ConvergenceReport:
    problem_name: str
    rows: tuple
    rates: FittedRates
    floor_n: int | None

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for row in self.rows:
            lines.append(
                ",".join(
                    [
                        str(row.n_collocation),
                        _fmt(row.err_state),
                        _fmt(row.err_control),
                        _fmt(row.err_costate),
                        str(row.iterations),
                        _fmt(row.residual_norm),
                    ]
                )
            )
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def sup_error(
    solution: DiscreteSolution,
    oracle: AnalyticSolution,
    spec: ProblemSpec,
    rule: GaussRule,
) -> tuple[float, float, float]:
    """Largest pointwise Euclidean error per variable at its own nodes."""
    t = map_time(spec, rule.nodes)
    x_ref = np.stack([np.asarray(oracle.state(ti), dtype=float) for ti in t])
    u_ref = np.stack([np.asarray(oracle.control(ti), dtype=float) for ti in t[1:-1]])
    l_ref = np.stack([np.asarray(oracle.costate(ti), dtype=float) for ti in t[1:]])

    def worst(diff):
        return float(np.sqrt((diff**2).sum(axis=1)).max())

    return (
        worst(solution.X - x_ref),
        worst(solution.U - u_ref),
        worst(solution.Lam - l_ref),
    )


def dense_sup_error(
    solution: DiscreteSolution,
    oracle: AnalyticSolution,
    spec: ProblemSpec,
    rule: GaussRule,
    num_points: int = 50,
) -> tuple[float, float, float]:
    """Like sup_error but on a uniform tau grid through the interpolants."""
    taus = np.linspace(-1.0, 1.0, num_points)
    t = map_time(spec, taus)
    n_int = rule.n_collocation + 1

    x_hat = interpolate(rule, solution.X[:n_int], "state", taus)
    l_hat = interpolate(rule, solution.Lam, "costate", taus)
    u_hat = np.stack([bary_interp(rule.interior, solution.U, ti) for ti in taus])

    x_ref = np.stack([np.asarray(oracle.state(ti), dtype=float) for ti in t])
    u_ref = np.stack([np.asarray(oracle.control(ti), dtype=float) for ti in t])
    l_ref = np.stack([np.asarray(oracle.costate(ti), dtype=float) for ti in t])

    def worst(diff):
        return float(np.sqrt((diff**2).sum(axis=1)).max())

    return (worst(x_hat - x_ref), worst(u_hat - u_ref), worst(l_hat - l_ref))


def omega_norm(rule: GaussRule, values) -> float:
    """Weighted discrete norm over nodal rows.

    With N + 1 rows the last row is the terminal value and enters with
    unit weight while the first N rows are weighted by the quadrature
    weights (state or costate layout).  With N rows all are weighted
    (control layout).
    """
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    sq = (v**2).sum(axis=1)
    N = rule.n_collocation
    if v.shape[0] == N + 1:
        return float(math.sqrt(rule.weights @ sq[:N] + sq[N]))
    if v.shape[0] == N:
        return float(math.sqrt(rule.weights @ sq))
    raise ValueError(
        f"expected {N} or {N + 1} rows for this rule, got {v.shape[0]}"
    )


def fit_decay_rate(n_values, errors, floor: float = ERROR_FLOOR) -> float:
    """Exponential decay rate from a least-squares fit of log10(err) vs N.

    Rows at or below the floor, or not finite, are excluded.  Returns
    NaN when fewer than 3 points remain.
    """
    n_values = np.asarray(n_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    mask = np.isfinite(errors) & (errors > floor)
    if mask.sum() < 3:
        return float("nan")
    slope = np.polyfit(n_values[mask], np.log10(errors[mask]), 1)[0]
    return float(-slope)


def run_sweep(
    spec: ProblemSpec,
    oracle: AnalyticSolution,
    n_list,
    options: SolverOptions | None = None,
) -> ConvergenceReport:
    """Solve over an ascending list of N and fit per-variable decay rates.

    The first N is seeded from the oracle unless options say otherwise;
    later ones warm-start from the most recent converged solution.  When
    the discrete system carries extra roots away from the reference
    trajectory (the stationarity block degenerates wherever the costate
    passes through zero), a cold start can converge onto one of those,
    so a sweep seeded blind would fit rates of the wrong branch.  A
    failed solve contributes a NaN row and the ladder continues from the
    last success.
    """
    n_list = [int(v) for v in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly ascending")
    opts = options or SolverOptions(initial_guess="oracle")

    rows = []
    prev: DiscreteSolution | None = None
    floor_n: int | None = None
    for N in n_list:
        if prev is None:
            sol = newton_solve(spec, N, opts, oracle=oracle)
        else:
            sol = newton_solve(
                spec, N, replace(opts, initial_guess="warm"), oracle=oracle, warm_from=prev
            )
        if sol.converged:
            errs = sup_error(sol, oracle, spec, gauss_rule(N))
            prev = sol
            if floor_n is None and min(errs) <= ERROR_FLOOR:
                floor_n = N
        else:
            errs = (float("nan"),) * 3
        rows.append(
            SweepRow(
                n_collocation=N,
                err_state=errs[0],
                err_control=errs[1],
                err_costate=errs[2],
                iterations=sol.iterations,
                residual_norm=sol.residual_norm,
            )
        )

    ns = [r.n_collocation for r in rows]
    rates = FittedRates(
        state=fit_decay_rate(ns, [r.err_state for r in rows]),
        control=fit_decay_rate(ns, [r.err_control for r in rows]),
        costate=fit_decay_rate(ns, [r.err_costate for r in rows]),
    )
    return ConvergenceReport(
        problem_name=spec.name, rows=tuple(rows), rates=rates, floor_n=floor_n
    )
