"""Outer loops: plain iteratively reweighted l1 and the line-search variant.

Each iteration computes weights from the current iterate and smoothing
vector, minimizes the convex local model plus the weighted l1 term, updates
the smoothing vector (inspecting the fresh iterate when the smart rule is
active), and records a full snapshot.  Termination is the support-restricted
stationarity residual

    max_{i: x_i != 0} | grad_i f(x) + lam * p * |x_i|**(p-1) * sign(x_i) |

dropping to `opttol`; iterates with empty support have residual 0 by
convention, and the test is first applied after one step so a zero start
does not terminate vacuously.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .problems import LeastSquaresObjective, LpProblem, format_float
from .reweighting import (
    EpsilonState,
    EpsStrategy,
    compute_weights,
    update_epsilon_geometric,
    update_epsilon_smart,
)
from .subproblem import (
    DEFAULT_SUBPROBLEM_TOL,
    DenseQuadratic,
    ProximalFirstOrder,
    add_proximal_term,
    model_decrease,
    solve_model,
)

TRACE_CSV_HEADER = "k,F,F_eps,residual,nnz,gamma,ls_trials"


class SolveStatus(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    LINE_SEARCH_FAILURE = "LineSearchFailure"


@dataclass
class SolverOptions:
    """All solver tunables.

    Defaults follow the reference experiment configuration: p=0.5,
    lam=0.05, eps0=1, mu=0.9, beta=0.1, gamma=1e-4, gamma_bar=1.1,
    opttol=1e-6, max_iter=500, smart reweighting, line search on, zero
    start.
    """

    p: float = 0.5
    lam: float = 0.05
    eps0: float = 1.0
    mu: float = 0.9
    model: str = "prox"
    beta: float = 0.1
    model_b: Optional[np.ndarray] = None
    gamma: float = 1e-4
    gamma_bar: float = 1.1
    opttol: float = 1e-6
    max_iter: int = 500
    eps_strategy: EpsStrategy = EpsStrategy.SMART_REWEIGHTING
    use_line_search: bool = True
    x0: Optional[np.ndarray] = None
    subproblem_tol: float = DEFAULT_SUBPROBLEM_TOL
    ls_trial_budget: int = 100

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if self.model not in ("prox", "dquad"):
            raise ValueError("model must be 'prox' or 'dquad'")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.gamma_bar > 1.0:
            raise ValueError("gamma_bar must exceed 1")
        if not self.opttol > 0:
            raise ValueError("opttol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.ls_trial_budget < 1:
            raise ValueError("ls_trial_budget must be at least 1")
        self.eps_strategy = EpsStrategy(self.eps_strategy)


@dataclass
class IterateRecord:
    """Snapshot of iteration k.

    `gamma_used` and `ls_trials` describe the step that *produced* this
    iterate (both zero for the starting record).
    """

    k: int
    x: np.ndarray
    eps: np.ndarray
    w: np.ndarray
    F_smoothed: float
    F: float
    residual: float
    support: np.ndarray
    signs: np.ndarray
    gamma_used: float
    ls_trials: int


@dataclass
class SolveResult:
    status: SolveStatus
    final_x: np.ndarray
    iterations: int
    trace: list[IterateRecord] = field(repr=False)
    support_stable_at: int

    @property
    def final_residual(self) -> float:
        return self.trace[-1].residual


def _support_residual(g: np.ndarray, x: np.ndarray, lam: float, p: float) -> float:
    on = x != 0.0
    if not np.any(on):
        return 0.0
    xs = x[on]
    terms = g[on] + lam * p * np.abs(xs) ** (p - 1.0) * np.sign(xs)
    return float(np.max(np.abs(terms)))


def stationarity_residual(
    problem: LpProblem, x: np.ndarray, grad: Optional[np.ndarray] = None
) -> float:
    """First-order residual on the support; 0 when the support is empty."""
    x = np.asarray(x, dtype=np.float64)
    g = problem.objective.grad(x) if grad is None else np.asarray(grad)
    return _support_residual(g, x, problem.lam, problem.p)


def detect_support_stabilization(trace: Sequence[IterateRecord]) -> int:
    """Smallest k from which support and signs never change again."""
    if not trace:
        raise ValueError("trace must be nonempty")
    final = trace[-1].signs
    k = len(trace) - 1
    while k > 0 and np.array_equal(trace[k - 1].signs, final):
        k -= 1
    return k


def _problem_dim(problem: LpProblem, options: SolverOptions) -> int:
    if options.x0 is not None:
        return len(np.asarray(options.x0))
    if isinstance(problem.objective, LeastSquaresObjective):
        return problem.objective.n
    raise ValueError("x0 is required for objectives without an intrinsic dimension")


def _build_dense_hessian(problem: LpProblem, options: SolverOptions, n: int) -> np.ndarray:
    if options.model_b is not None:
        return np.asarray(options.model_b, dtype=np.float64)
    if isinstance(problem.objective, LeastSquaresObjective):
        A = problem.objective.A
        # A^T A is only positive semidefinite when m < n; the beta shift
        # keeps the model strongly convex.
        return A.T @ A + options.beta * np.eye(n)
    raise ValueError("model 'dquad' needs model_b for non-least-squares objectives")


def _gamma_trials(gamma_bar: float, budget: int):
    yield 0.0
    value = 1.0
    for _ in range(budget - 1):
        yield value
        value *= gamma_bar


def _make_record(k, x, eps, f, g, lam, p, gamma_used, ls_trials) -> IterateRecord:
    absx = np.abs(x)
    return IterateRecord(
        k=k,
        x=x.copy(),
        eps=eps,
        w=compute_weights(x, eps, p),
        F_smoothed=f + lam * float(np.sum((absx + eps) ** p)),
        F=f + lam * float(np.sum(absx**p)),
        residual=_support_residual(g, x, lam, p),
        support=np.nonzero(x)[0],
        signs=np.sign(x).astype(np.int8),
        gamma_used=gamma_used,
        ls_trials=ls_trials,
    )


def _run(problem: LpProblem, options: SolverOptions, use_line_search: bool) -> SolveResult:
    obj = problem.objective
    lam, p = problem.lam, problem.p
    n = _problem_dim(problem, options)

    x = (
        np.zeros(n)
        if options.x0 is None
        else np.asarray(options.x0, dtype=np.float64).copy()
    )
    eps_state = EpsilonState(
        np.full(n, options.eps0, dtype=np.float64), options.mu, options.eps_strategy
    )
    smart = options.eps_strategy is EpsStrategy.SMART_REWEIGHTING
    dense_b = _build_dense_hessian(problem, options, n) if options.model == "dquad" else None

    f, g = obj.value_and_grad(x)
    trace = [_make_record(0, x, eps_state.eps, f, g, lam, p, 0.0, 0)]

    k = 0
    while True:
        if k > 0 and trace[-1].residual <= options.opttol:
            status = SolveStatus.CONVERGED
            break
        if k >= options.max_iter:
            status = SolveStatus.MAX_ITERATIONS
            break

        w = trace[-1].w
        if dense_b is not None:
            model = DenseQuadratic(x, g, dense_b)
        else:
            model = ProximalFirstOrder(x, g, options.beta)

        if use_line_search:
            x_new = None
            trials = 0
            for gamma_trial in _gamma_trials(options.gamma_bar, options.ls_trial_budget):
                trials += 1
                trial_model = add_proximal_term(model, gamma_trial)
                cand = solve_model(trial_model, lam, w, options.subproblem_tol)
                f_cand = obj.value(cand)
                d = cand - x
                decrease_needed = model_decrease(trial_model, cand) + options.gamma * float(d @ d)
                if f - f_cand >= decrease_needed:
                    x_new, gamma_used = cand, gamma_trial
                    break
            if x_new is None:
                status = SolveStatus.LINE_SEARCH_FAILURE
                break
        else:
            x_new = solve_model(model, lam, w, options.subproblem_tol)
            gamma_used, trials = 0.0, 0

        if smart:
            eps_state = update_epsilon_smart(eps_state, x_new)
        else:
            eps_state = update_epsilon_geometric(eps_state)
        x = x_new
        f, g = obj.value_and_grad(x)
        k += 1
        trace.append(_make_record(k, x, eps_state.eps, f, g, lam, p, gamma_used, trials))

    return SolveResult(
        status=status,
        final_x=x.copy(),
        iterations=k,
        trace=trace,
        support_stable_at=detect_support_stabilization(trace),
    )


def irl1_solve(problem: LpProblem, options: SolverOptions) -> SolveResult:
    """Plain iteratively reweighted l1 (no line search).

    Monotone decrease of the smoothed objective needs model curvature above
    half the gradient Lipschitz constant; a weaker configuration runs anyway
    but emits a warning.
    """
    if options.use_line_search:
        raise ValueError("irl1_solve requires use_line_search=False")
    lip = problem.objective.lipschitz_estimate
    if lip is not None and options.beta <= 0.5 * lip:
        warnings.warn(
            "model curvature beta=%g does not exceed L_f/2=%g; monotone "
            "decrease is not guaranteed without line search" % (options.beta, 0.5 * lip),
            UserWarning,
        )
    return _run(problem, options, use_line_search=False)


def irl1_ls_solve(problem: LpProblem, options: SolverOptions) -> SolveResult:
    """Iteratively reweighted l1 with line search.

    Each iteration reweighs once, then tries proximal stiffenings
    Gamma in {0, 1, gamma_bar, gamma_bar**2, ...} in order, re-solving the
    model and accepting the first candidate with

        f(x_k) - f(x_new) >= Q(x_k) - Q(x_new) + gamma * ||x_new - x_k||**2.

    Exhausting the trial budget signals inconsistent value/gradient oracles
    and yields status LineSearchFailure.
    """
    if not options.use_line_search:
        raise ValueError("irl1_ls_solve requires use_line_search=True")
    return _run(problem, options, use_line_search=True)


def solve(problem: LpProblem, options: SolverOptions) -> SolveResult:
    """Dispatch on options.use_line_search."""
    if options.use_line_search:
        return irl1_ls_solve(problem, options)
    return irl1_solve(problem, options)


def write_trace_csv(result: SolveResult, path: str) -> None:
    """Stream the trace as CSV with columns k,F,F_eps,residual,nnz,gamma,ls_trials."""
    with open(path, "w", newline="") as fh:
        fh.write(TRACE_CSV_HEADER + "\n")
        for rec in result.trace:
            fh.write(
                "%d,%s,%s,%s,%d,%s,%d\n"
                % (
                    rec.k,
                    format_float(rec.F),
                    format_float(rec.F_smoothed),
                    format_float(rec.residual),
                    rec.support.size,
                    format_float(rec.gamma_used),
                    rec.ls_trials,
                )
            )
