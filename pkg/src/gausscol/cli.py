"""Command line interface.

Subcommands: ``rule`` prints nodes and weights, ``certify`` measures the
differentiation-matrix bounds, ``solve`` runs the Newton solver on a
builtin problem, ``sweep`` runs a convergence study.  Numeric output is
CSV (17 significant digits, so values roundtrip exactly) or JSON, written
to --output, with "-" meaning stdout.  Exit codes: 0 success, 1 numeric
or convergence failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

import numpy as np

from .convergence import run_sweep
from .diffmat import certify
from .ocp import get_problem, map_time
from .quadrature import gauss_rule
from .solver import (
    EndpointControlError,
    SolverOptions,
    endpoint_control,
    interpolate,
    newton_solve,
)

__all__ = ["main", "entry", "fmt_float", "parse_n_list"]

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2


def fmt_float(x: float) -> str:
    """17 significant digits; parsing and re-emitting is byte-stable."""
    return f"{float(x):.17g}"


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("N must be at least 1")
    return value


def parse_n_list(text: str) -> list[int]:
    """Expand a comma list with a:b:c ranges, e.g. "5:25:2" or "25,50,75"."""
    out: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if ":" in token:
            parts = token.split(":")
            if len(parts) not in (2, 3):
                raise ValueError(f"bad range {token!r}, expected start:stop[:step]")
            try:
                start, stop = int(parts[0]), int(parts[1])
                step = int(parts[2]) if len(parts) == 3 else 1
            except ValueError:
                raise ValueError(f"bad range {token!r}") from None
            if step < 1 or stop < start:
                raise ValueError(f"bad range {token!r}")
            out.extend(range(start, stop + 1, step))
        else:
            try:
                out.append(int(token))
            except ValueError:
                raise ValueError(f"not an integer: {token!r}") from None
    if not out or any(v < 1 for v in out):
        raise ValueError("every N must be at least 1")
    return out


def _n_list_arg(text: str) -> list[int]:
    try:
        return parse_n_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausscol",
        description="Gauss collocation for unconstrained optimal control",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rule = sub.add_parser("rule", help="print nodes and weights for one N")
    p_rule.add_argument("--n", type=_positive_int, required=True)
    p_rule.add_argument("--format", choices=("csv", "json"), default="csv")
    p_rule.add_argument("--output", default="-")
    p_rule.set_defaults(func=_cmd_rule)

    p_cert = sub.add_parser("certify", help="check differentiation matrix bounds")
    p_cert.add_argument("--n", type=_n_list_arg, required=True)
    p_cert.add_argument("--format", choices=("csv", "json"), default="csv")
    p_cert.add_argument("--output", default="-")
    p_cert.set_defaults(func=_cmd_certify)

    p_solve = sub.add_parser("solve", help="solve a builtin problem")
    p_solve.add_argument("--problem", required=True)
    p_solve.add_argument("--n", type=_positive_int, required=True)
    p_solve.add_argument("--tolerance", type=float, default=1e-10)
    p_solve.add_argument("--max-iterations", type=_positive_int, default=50)
    p_solve.add_argument("--format", choices=("csv", "json"), default="csv")
    p_solve.add_argument("--output", default="-")
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="convergence study over a list of N")
    p_sweep.add_argument("--problem", required=True)
    p_sweep.add_argument("--n", type=_n_list_arg, required=True)
    p_sweep.add_argument("--tolerance", type=float, default=1e-10)
    p_sweep.add_argument("--max-iterations", type=_positive_int, default=50)
    p_sweep.add_argument("--output", default="-")
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def _cmd_rule(args) -> int:
    rule = gauss_rule(args.n)
    with _output(args.output) as fh:
        if args.format == "json":
            doc = {
                "n": rule.n_collocation,
                "nodes": [float(v) for v in rule.nodes],
                "weights": [float(v) for v in rule.weights],
            }
            fh.write(json.dumps(doc, indent=2) + "\n")
        else:
            fh.write("index,node,weight\n")
            n = rule.n_collocation
            for i, node in enumerate(rule.nodes):
                weight = fmt_float(rule.weights[i - 1]) if 1 <= i <= n else ""
                fh.write(f"{i},{fmt_float(node)},{weight}\n")
    return EXIT_OK


def _cmd_certify(args) -> int:
    report = certify(args.n)
    with _output(args.output) as fh:
        if args.format == "json":
            doc = [
                {
                    "N": e.n_collocation,
                    "p1_norm": e.p1_norm,
                    "p1_minus_one_plus_tauN": e.p1_identity_gap,
                    "p2_norm": e.p2_norm,
                    "p2_argmax_row": e.p2_argmax_row,
                    "flip_max_dev": e.flip_max_dev,
                    "flags": list(e.flags),
                }
                for e in report.entries
            ]
            fh.write(json.dumps(doc, indent=2) + "\n")
        else:
            fh.write("N,p1_norm,p1_minus_one_plus_tauN,p2_norm,p2_argmax_row,flip_max_dev\n")
            for e in report.entries:
                fh.write(
                    ",".join(
                        [
                            str(e.n_collocation),
                            fmt_float(e.p1_norm),
                            fmt_float(e.p1_identity_gap),
                            fmt_float(e.p2_norm),
                            str(e.p2_argmax_row),
                            fmt_float(e.flip_max_dev),
                        ]
                    )
                    + "\n"
                )
    if report.flagged:
        for e in report.entries:
            if e.flags:
                print(
                    f"certify: N={e.n_collocation} flagged: {', '.join(e.flags)}",
                    file=sys.stderr,
                )
        return EXIT_NUMERIC
    return EXIT_OK


def _endpoint_row(spec, sol, rule):
    """Controls at the two noncollocated endpoints, NaN when unavailable."""
    nan = np.full(spec.n_controls, np.nan)
    lam_start = interpolate(rule, sol.Lam, "costate", -1.0)
    try:
        u_start = endpoint_control(spec, sol.X[0], lam_start, sol.U[0])
    except EndpointControlError:
        u_start = nan
    try:
        u_end = endpoint_control(spec, sol.X[-1], sol.Lam[-1], sol.U[-1])
    except EndpointControlError:
        u_end = nan
    return lam_start, u_start, u_end


def _cmd_solve(args) -> int:
    try:
        spec, oracle = get_problem(args.problem)
    except KeyError as exc:
        print(f"solve: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE

    opts = SolverOptions(tolerance=args.tolerance, max_iterations=args.max_iterations)
    sol = newton_solve(spec, args.n, opts)
    rule = gauss_rule(args.n)
    n, m, N = spec.n_states, spec.n_controls, args.n

    lam_start, u_start, u_end = _endpoint_row(spec, sol, rule)
    taus = rule.nodes
    times = map_time(spec, taus)
    lam_rows = np.vstack([lam_start, sol.Lam])
    u_rows = np.vstack([u_start, sol.U, u_end])

    if oracle is not None:
        x_ref = np.stack([np.asarray(oracle.state(t), dtype=float) for t in times])
        u_ref = np.stack([np.asarray(oracle.control(t), dtype=float) for t in times])
        l_ref = np.stack([np.asarray(oracle.costate(t), dtype=float) for t in times])
        err_x = np.sqrt(((sol.X - x_ref) ** 2).sum(axis=1))
        err_u = np.sqrt(((u_rows - u_ref) ** 2).sum(axis=1))
        err_l = np.sqrt(((lam_rows - l_ref) ** 2).sum(axis=1))

    with _output(args.output) as fh:
        if args.format == "json":
            doc = {
                "problem": args.problem,
                "n": N,
                "status": sol.status,
                "converged": sol.converged,
                "iterations": sol.iterations,
                "residual_norm": sol.residual_norm,
                "hessian_positive_definite": sol.hessian_positive_definite,
                "tau": [float(v) for v in taus],
                "t": [float(v) for v in times],
                "state": sol.X.tolist(),
                "control": u_rows.tolist(),
                "costate": lam_rows.tolist(),
            }
            if oracle is not None:
                doc["err_state"] = err_x.tolist()
                doc["err_control"] = err_u.tolist()
                doc["err_costate"] = err_l.tolist()
            fh.write(json.dumps(doc, indent=2) + "\n")
        else:
            cols = ["index", "tau", "t"]
            cols += [f"x{j + 1}" for j in range(n)]
            cols += [f"u{j + 1}" for j in range(m)]
            cols += [f"lambda{j + 1}" for j in range(n)]
            if oracle is not None:
                cols += ["err_state", "err_control", "err_costate"]
            fh.write(",".join(cols) + "\n")
            for i in range(N + 2):
                cells = [str(i), fmt_float(taus[i]), fmt_float(times[i])]
                cells += [fmt_float(v) for v in sol.X[i]]
                cells += [fmt_float(v) for v in u_rows[i]]
                cells += [fmt_float(v) for v in lam_rows[i]]
                if oracle is not None:
                    cells += [fmt_float(err_x[i]), fmt_float(err_u[i]), fmt_float(err_l[i])]
                fh.write(",".join(cells) + "\n")

    print(
        f"solve: problem={args.problem} n={N} status={sol.status} "
        f"iterations={sol.iterations} residual={fmt_float(sol.residual_norm)}"
    )
    return EXIT_OK if sol.converged else EXIT_NUMERIC


def _cmd_sweep(args) -> int:
    try:
        spec, oracle = get_problem(args.problem)
    except KeyError as exc:
        print(f"sweep: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    if oracle is None:
        print(f"sweep: problem {args.problem!r} has no oracle", file=sys.stderr)
        return EXIT_USAGE
    n_list = args.n
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        print("sweep: --n must be strictly ascending", file=sys.stderr)
        return EXIT_USAGE

    opts = SolverOptions(
        tolerance=args.tolerance,
        max_iterations=args.max_iterations,
        initial_guess="oracle",
    )
    report = run_sweep(spec, oracle, n_list, opts)
    with _output(args.output) as fh:
        fh.write(report.to_csv())

    rates = report.rates
    note = ""
    if any(np.isnan(v) for v in (rates.state, rates.control, rates.costate)):
        note = " (insufficient points for fit)"
    print(
        f"rates: state={rates.state:.4f} control={rates.control:.4f} "
        f"costate={rates.costate:.4f}{note}"
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entry() -> None:
    sys.exit(main())
