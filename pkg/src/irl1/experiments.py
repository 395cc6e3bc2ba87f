"""Batch sparse-recovery experiments with CSV/JSON reporting.

Every (instance, strategy, eps0) cell is solved independently on the *same*
seeded instances (paired design), reduced to one report row, and aggregated
per cell: success rate, correct-support count, iteration percentiles, the
distribution of the support-stabilization ratio, and the cumulative count
of solved problems per iteration.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .instances import DEFAULT_NOISE_STD, PROFILES, generate_instance
from .problems import format_float
from .reweighting import EpsStrategy
from .solver import SolveStatus, SolverOptions, solve

REPORT_CSV_HEADER = "seed,strategy,eps0,status,N,N_S,ratio,final_residual,support_correct"

NS_RATIO_BIN_WIDTH = 0.05
_NS_RATIO_BINS = 20


@dataclass
class ExperimentConfig:
    profile: str = "small"
    count: int = 50
    base_seed: int = 0
    noise_std: float = DEFAULT_NOISE_STD
    options: SolverOptions = field(default_factory=SolverOptions)
    strategies: tuple[str, ...] = ("sr",)
    eps0_list: tuple[float, ...] = (1.0,)
    jobs: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.profile.lower() not in PROFILES:
            raise ValueError("profile must be one of %s" % sorted(PROFILES))
        if not self.strategies:
            raise ValueError("at least one strategy is required")
        if not self.eps0_list:
            raise ValueError("at least one eps0 is required")
        self.strategies = tuple(EpsStrategy(s).value for s in self.strategies)


@dataclass(frozen=True)
class ExperimentRow:
    seed: int
    strategy: str
    eps0: float
    status: str
    iterations: int
    support_stable_at: int
    ratio: float
    final_residual: float
    support_correct: bool


def _solve_cell(task) -> ExperimentRow:
    m, n, K, seed, noise_std, options, strategy, eps0 = task
    instance = generate_instance(m, n, K, seed, noise_std)
    cell_options = replace(options, eps_strategy=EpsStrategy(strategy), eps0=eps0)
    problem = instance.to_problem(cell_options.lam, cell_options.p)
    result = solve(problem, cell_options)
    correct = np.array_equal(
        np.nonzero(result.final_x)[0], instance.true_support
    )
    return ExperimentRow(
        seed=seed,
        strategy=strategy,
        eps0=eps0,
        status=result.status.value,
        iterations=result.iterations,
        support_stable_at=result.support_stable_at,
        ratio=result.support_stable_at / result.iterations,
        final_residual=result.final_residual,
        support_correct=bool(correct),
    )


def run_experiment(config: ExperimentConfig) -> tuple[list[ExperimentRow], dict]:
    """Solve all

    count x len(strategies) x len(eps0_list)

    cells and return (rows sorted by (seed, strategy, eps0), summary dict).
    Per-instance failures are recorded as rows, never raised.
    """
    m, n, K = PROFILES[config.profile.lower()]
    tasks = [
        (m, n, K, config.base_seed + j, config.noise_std, config.options, s, e0)
        for j in range(config.count)
        for s in config.strategies
        for e0 in config.eps0_list
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_solve_cell, tasks, chunksize=1))
    else:
        rows = [_solve_cell(t) for t in tasks]
    rows.sort(key=lambda r: (r.seed, r.strategy, r.eps0))
    return rows, summarize(rows, config)


def summarize(rows: list[ExperimentRow], config: ExperimentConfig) -> dict:
    """Aggregates per (strategy, eps0) cell, recomputable from the rows."""
    cells = []
    for strategy in config.strategies:
        for eps0 in config.eps0_list:
            cell_rows = [r for r in rows if r.strategy == strategy and r.eps0 == eps0]
            converged = [r for r in cell_rows if r.status == SolveStatus.CONVERGED.value]
            hist = [0] * _NS_RATIO_BINS
            for r in converged:
                b = min(int(r.ratio / NS_RATIO_BIN_WIDTH), _NS_RATIO_BINS - 1)
                hist[b] += 1
            cumulative = [0] * (config.options.max_iter + 1)
            for r in converged:
                for i in range(r.iterations, config.options.max_iter + 1):
                    cumulative[i] += 1
            iters = sorted(r.iterations for r in converged)
            percentiles = (
                {
                    "p50": int(np.percentile(iters, 50, method="nearest")),
                    "p90": int(np.percentile(iters, 90, method="nearest")),
                }
                if iters
                else None
            )
            cells.append(
                {
                    "strategy": strategy,
                    "eps0": eps0,
                    "instances": len(cell_rows),
                    "converged": len(converged),
                    "success_rate": len(converged) / len(cell_rows) if cell_rows else 0.0,
                    "correct_support": sum(r.support_correct for r in cell_rows),
                    "iteration_percentiles": percentiles,
                    "ns_over_n_histogram": {
                        "bin_width": NS_RATIO_BIN_WIDTH,
                        "counts": hist,
                    },
                    "cumulative_converged_by_iteration": cumulative,
                }
            )
    return {
        "profile": config.profile.lower(),
        "count": config.count,
        "base_seed": config.base_seed,
        "noise_std": config.noise_std,
        "cells": cells,
    }


def write_report_csv(rows: list[ExperimentRow], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(REPORT_CSV_HEADER + "\n")
        for r in rows:
            fh.write(
                "%d,%s,%s,%s,%d,%d,%s,%s,%s\n"
                % (
                    r.seed,
                    r.strategy,
                    format_float(r.eps0),
                    r.status,
                    r.iterations,
                    r.support_stable_at,
                    format_float(r.ratio),
                    format_float(r.final_residual),
                    "true" if r.support_correct else "false",
                )
            )


def write_summary_json(summary: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_histogram_csv(summary: dict, path: str) -> None:
    """N_S/N histogram rows: strategy,eps0,bin_low,bin_high,count."""
    with open(path, "w", newline="") as fh:
        fh.write("strategy,eps0,bin_low,bin_high,count\n")
        for cell in summary["cells"]:
            width = cell["ns_over_n_histogram"]["bin_width"]
            for b, count in enumerate(cell["ns_over_n_histogram"]["counts"]):
                fh.write(
                    "%s,%s,%s,%s,%d\n"
                    % (
                        cell["strategy"],
                        format_float(cell["eps0"]),
                        format_float(b * width),
                        format_float((b + 1) * width),
                        count,
                    )
                )


def write_success_curve_csv(summary: dict, path: str) -> None:
    """Cumulative solved-by-iteration rows: strategy,eps0,iteration,converged_count."""
    with open(path, "w", newline="") as fh:
        fh.write("strategy,eps0,iteration,converged_count\n")
        for cell in summary["cells"]:
            for i, count in enumerate(cell["cumulative_converged_by_iteration"]):
                fh.write(
                    "%s,%s,%d,%d\n"
                    % (cell["strategy"], format_float(cell["eps0"]), i, count)
                )
