"""Command-line entry points: gen, solve, experiment, contour."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .diagnostics import (
    DEFAULT_MARGIN,
    certificate_to_json,
    contour_grid,
    map_laplace_scales,
    weighted_l1_certificate,
    write_contour_csv,
)
from .experiments import (
    ExperimentConfig,
    run_experiment,
    write_histogram_csv,
    write_report_csv,
    write_success_curve_csv,
    write_summary_json,
)
from .instances import (
    DEFAULT_NOISE_STD,
    PROFILES,
    generate_instance,
    instance_from_json,
    instance_to_json,
)
from .problems import LeastSquaresObjective, LpProblem, format_float
from .solver import SolveStatus, SolverOptions, solve, write_trace_csv

DEFAULT_OUT_ENV = "IRL1_DEFAULT_OUT"

EXIT_CODES = {
    SolveStatus.CONVERGED: 0,
    SolveStatus.MAX_ITERATIONS: 2,
    SolveStatus.LINE_SEARCH_FAILURE: 3,
}


def _default_out() -> str:
    return os.environ.get(DEFAULT_OUT_ENV, ".")


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    d = SolverOptions()
    parser.add_argument("--p", type=float, default=d.p)
    parser.add_argument("--lambda", dest="lam", type=float, default=d.lam)
    parser.add_argument("--mu", type=float, default=d.mu)
    parser.add_argument("--eps0", type=float, default=d.eps0)
    parser.add_argument("--beta", type=float, default=d.beta)
    parser.add_argument("--gamma", type=float, default=d.gamma)
    parser.add_argument("--gamma-bar", type=float, default=d.gamma_bar)
    parser.add_argument("--opttol", type=float, default=d.opttol)
    parser.add_argument("--max-iter", type=int, default=d.max_iter)
    parser.add_argument(
        "--eps-strategy", choices=("geometric", "sr"), default=d.eps_strategy.value
    )
    parser.add_argument("--model", choices=("prox", "dquad"), default=d.model)
    parser.add_argument(
        "--line-search",
        action=argparse.BooleanOptionalAction,
        default=d.use_line_search,
    )


def _options_from_args(args: argparse.Namespace) -> SolverOptions:
    return SolverOptions(
        p=args.p,
        lam=args.lam,
        eps0=args.eps0,
        mu=args.mu,
        model=args.model,
        beta=args.beta,
        gamma=args.gamma,
        gamma_bar=args.gamma_bar,
        opttol=args.opttol,
        max_iter=args.max_iter,
        eps_strategy=args.eps_strategy,
        use_line_search=args.line_search,
    )


def _result_to_json(result) -> str:
    return (
        '{"status":"%s","iterations":%d,"support_stable_at":%d,'
        '"final_residual":%s,"nnz":%d,"final_x":[%s]}'
        % (
            result.status.value,
            result.iterations,
            result.support_stable_at,
            format_float(result.final_residual),
            int(np.count_nonzero(result.final_x)),
            ",".join(format_float(v) for v in result.final_x.tolist()),
        )
    )


def cmd_gen(args: argparse.Namespace) -> int:
    if args.profile:
        m, n, K = PROFILES[args.profile]
    else:
        if args.m is None or args.n is None or args.k is None:
            print("gen: provide --profile or all of --m/--n/--k", file=sys.stderr)
            return 1
        m, n, K = args.m, args.n, args.k
    os.makedirs(args.out, exist_ok=True)
    for j in range(args.count):
        seed = args.seed + j
        instance = generate_instance(m, n, K, seed, args.noise_std)
        path = os.path.join(args.out, "instance_%d.json" % seed)
        with open(path, "w") as fh:
            fh.write(instance_to_json(instance))
            fh.write("\n")
        print(path)
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        with open(args.instance) as fh:
            instance = instance_from_json(fh.read())
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print("solve: cannot read instance: %s" % exc, file=sys.stderr)
        return 1
    options = _options_from_args(args)
    problem = instance.to_problem(options.lam, options.p)
    result = solve(problem, options)
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "result.json")
    with open(out_path, "w") as fh:
        fh.write(_result_to_json(result))
        fh.write("\n")
    if args.trace:
        write_trace_csv(result, args.trace)
    print(
        "status=%s iterations=%d support_stable_at=%d residual=%.3e"
        % (
            result.status.value,
            result.iterations,
            result.support_stable_at,
            result.final_residual,
        )
    )
    return EXIT_CODES[result.status]


def cmd_experiment(args: argparse.Namespace) -> int:
    try:
        config = ExperimentConfig(
            profile=args.profile,
            count=args.count,
            base_seed=args.base_seed,
            noise_std=args.noise_std,
            options=_options_from_args(args),
            strategies=tuple(args.strategies.split(",")),
            eps0_list=tuple(float(v) for v in args.eps0_list.split(",")),
            jobs=args.jobs,
        )
    except ValueError as exc:
        print("experiment: invalid configuration: %s" % exc, file=sys.stderr)
        return 1
    rows, summary = run_experiment(config)
    os.makedirs(args.out, exist_ok=True)
    write_report_csv(rows, os.path.join(args.out, "report.csv"))
    write_summary_json(summary, os.path.join(args.out, "summary.json"))
    write_histogram_csv(summary, os.path.join(args.out, "histogram.csv"))
    write_success_curve_csv(summary, os.path.join(args.out, "success_curve.csv"))
    for cell in summary["cells"]:
        print(
            "strategy=%s eps0=%g converged=%d/%d correct_support=%d"
            % (
                cell["strategy"],
                cell["eps0"],
                cell["converged"],
                cell["instances"],
                cell["correct_support"],
            )
        )
    return 0


def _axis_stationary_point(c: float, lam: float, p: float) -> float:
    """Positive v with 2(v - c) + lam*p*v**(p-1) = 0, the local minimum near c.

    Bisection on [c/2, c]; for the regularization levels used here the
    stationarity function changes sign on that bracket.
    """
    psi = lambda v: 2.0 * (v - c) + lam * p * v ** (p - 1.0)
    lo, hi = 0.5 * c, c
    if not (psi(lo) < 0.0 < psi(hi)):
        raise ValueError("no sparse stationary point in the bracket [c/2, c]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if psi(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def cmd_contour(args: argparse.Namespace) -> int:
    try:
        t1, t2 = (float(v) for v in args.target.split(","))
        x_range = tuple(float(v) for v in args.x_range.split(","))
        y_range = tuple(float(v) for v in args.y_range.split(","))
        if len(x_range) != 2 or len(y_range) != 2:
            raise ValueError("ranges need exactly two comma-separated numbers")
    except ValueError as exc:
        print("contour: invalid configuration: %s" % exc, file=sys.stderr)
        return 1
    # f(x) = (x1-t1)^2 + (x2-t2)^2, expressed as 0.5||sqrt(2)(x - t)||^2
    root2 = np.sqrt(2.0)
    objective = LeastSquaresObjective(root2 * np.eye(2), root2 * np.array([t1, t2]))
    problem = LpProblem(objective, args.lam, args.p)

    x_star = np.array([0.0, _axis_stationary_point(t2, args.lam, args.p)])
    certificate = weighted_l1_certificate(problem, x_star, margin=args.margin)
    scales = map_laplace_scales(x_star, certificate, args.lam)

    grid_w = contour_grid(
        problem, x_range, y_range, args.resolution, weights=certificate.weight_vector(2)
    )
    grid_l1 = contour_grid(
        problem, x_range, y_range, args.resolution, weights=np.ones(2)
    )

    os.makedirs(args.out, exist_ok=True)
    write_contour_csv(grid_w, os.path.join(args.out, "contour.csv"))
    write_contour_csv(grid_l1, os.path.join(args.out, "contour_l1.csv"))
    with open(os.path.join(args.out, "certificate.json"), "w") as fh:
        fh.write(certificate_to_json(certificate, scales))
        fh.write("\n")
    print("stationary point (0, %.6f); kkt violation %.3e"
          % (x_star[1], certificate.max_kkt_violation))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irl1",
        description="Iteratively reweighted l1 solvers for lp-regularized problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate sparse-recovery instance files")
    gen.add_argument("--profile", choices=sorted(PROFILES), default=None)
    gen.add_argument("--m", type=int, default=None)
    gen.add_argument("--n", type=int, default=None)
    gen.add_argument("--k", type=int, default=None)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--noise-std", type=float, default=DEFAULT_NOISE_STD)
    gen.add_argument("--out", default=_default_out())
    gen.set_defaults(func=cmd_gen)

    slv = sub.add_parser("solve", help="solve one instance file")
    slv.add_argument("instance")
    _add_solver_flags(slv)
    slv.add_argument("--trace", default=None, help="write per-iteration CSV here")
    slv.add_argument("--out", default=_default_out())
    slv.set_defaults(func=cmd_solve)

    exp = sub.add_parser("experiment", help="run a seeded experiment batch")
    exp.add_argument("--profile", choices=sorted(PROFILES), default="small")
    exp.add_argument("--count", type=int, default=None)
    exp.add_argument("--base-seed", type=int, default=0)
    exp.add_argument("--noise-std", type=float, default=DEFAULT_NOISE_STD)
    exp.add_argument("--strategies", default="sr")
    exp.add_argument("--eps0-list", default=None)
    exp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    _add_solver_flags(exp)
    exp.add_argument("--out", default=_default_out())
    exp.set_defaults(func=cmd_experiment)

    cnt = sub.add_parser("contour", help="emit lp / l1 / weighted-l1 contour grids")
    cnt.add_argument("--target", default="0.5,5")
    cnt.add_argument("--x-range", default="-1,1")
    cnt.add_argument("--y-range", default="-1,6")
    cnt.add_argument("--resolution", type=int, default=400)
    cnt.add_argument("--lambda", dest="lam", type=float, default=0.1)
    cnt.add_argument("--p", type=float, default=0.5)
    cnt.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    cnt.add_argument("--out", default=_default_out())
    cnt.set_defaults(func=cmd_contour)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "experiment":
        # desk-scale defaults: 50 small / 10 large problems
        if args.count is None:
            args.count = 50 if args.profile == "small" else 10
        if args.eps0_list is None:
            args.eps0_list = format_float(args.eps0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
