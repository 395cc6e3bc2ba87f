"""Objective abstractions: smooth losses and the lp-regularized objective.

The regularized objective is ``F(x) = f(x) + lam * sum_i |x_i|**p`` with
``0 < p < 1``, together with its smoothed companion
``F(x, eps) = f(x) + lam * sum_i (|x_i| + eps_i)**p`` for ``eps > 0``.
``|0|**p`` is 0 exactly; no smoothing happens inside the unperturbed
objective.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .rng import SplitMix64

_POWER_ITERATION_SEED = 0x51B0
_POWER_ITERATION_MAX_STEPS = 50_000
_LIPSCHITZ_INFLATION = 1.01


class SmoothObjective:
    """Smooth loss term accessed through a joint value+gradient oracle.

    Every solver iteration needs both the value and the gradient, so the
    oracle returns them together.

    Parameters
    ----------
    evaluator : callable
        Maps a 1-D float array ``x`` to ``(value, gradient)``.
    lipschitz_estimate : float, optional
        Upper bound on the gradient's Lipschitz constant, if known.
    """

    def __init__(
        self,
        evaluator: Callable[[np.ndarray], tuple[float, np.ndarray]],
        lipschitz_estimate: Optional[float] = None,
    ):
        self._evaluator = evaluator
        self.lipschitz_estimate = lipschitz_estimate

    def value_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        v, g = self._evaluator(np.asarray(x, dtype=np.float64))
        return float(v), np.asarray(g, dtype=np.float64)

    def value(self, x: np.ndarray) -> float:
        return self.value_and_grad(x)[0]

    def grad(self, x: np.ndarray) -> np.ndarray:
        return self.value_and_grad(x)[1]


class LeastSquaresObjective(SmoothObjective):
    """f(x) = 0.5 * ||A x - y||_2**2 with gradient A^T (A x - y)."""

    def __init__(self, A: np.ndarray, y: np.ndarray):
        A = np.asarray(A, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if A.ndim != 2:
            raise ValueError("A must be a 2-D matrix")
        if y.shape != (A.shape[0],):
            raise ValueError("y must have one entry per row of A")
        self.A = A
        self.y = y
        self._lip: Optional[float] = None
        super().__init__(self._eval)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def _eval(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        r = self.A @ x - self.y
        return 0.5 * float(r @ r), self.A.T @ r

    def value(self, x: np.ndarray) -> float:
        r = self.A @ np.asarray(x, dtype=np.float64) - self.y
        return 0.5 * float(r @ r)

    def value_batch(self, points: np.ndarray) -> np.ndarray:
        """Values at many points at once; `points` has one point per row."""
        R = points @ self.A.T - self.y
        return 0.5 * np.einsum("ij,ij->i", R, R)

    @property
    def lipschitz_estimate(self) -> Optional[float]:
        if self._lip is None:
            self._lip = estimate_lipschitz(self)
        return self._lip

    @lipschitz_estimate.setter
    def lipschitz_estimate(self, value: Optional[float]) -> None:
        self._lip = value


@dataclass(frozen=True)
class LpProblem:
    """Regularized problem data: smooth objective, weight lam > 0, power p in (0,1)."""

    objective: SmoothObjective
    lam: float
    p: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in the open interval (0, 1)")


def evaluate_F(problem: LpProblem, x: np.ndarray) -> float:
    """F(x) = f(x) + lam * sum_i |x_i|**p."""
    x = np.asarray(x, dtype=np.float64)
    return problem.objective.value(x) + problem.lam * float(
        np.sum(np.abs(x) ** problem.p)
    )


def evaluate_F_smoothed(problem: LpProblem, x: np.ndarray, eps: np.ndarray) -> float:
    """F(x, eps) = f(x) + lam * sum_i (|x_i| + eps_i)**p; requires eps > 0."""
    x = np.asarray(x, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if np.any(eps <= 0.0):
        raise ValueError("all smoothing components must be strictly positive")
    return problem.objective.value(x) + problem.lam * float(
        np.sum((np.abs(x) + eps) ** problem.p)
    )


def gradient(objective: SmoothObjective, x: np.ndarray) -> np.ndarray:
    """Gradient oracle access, for callers that only need the gradient."""
    return objective.grad(x)


def estimate_lipschitz(objective: LeastSquaresObjective, tol: float = 1e-8) -> float:
    """Upper bound on lambda_max(A^T A) by power iteration.

    Runs power iteration on A^T A from a fixed pseudo-random start until the
    Rayleigh quotient changes by a relative factor of at most `tol`, then
    inflates the estimate by 1% so the result is a safe upper bound.
    """
    A = objective.A
    v = SplitMix64(_POWER_ITERATION_SEED).normals(A.shape[1])
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise RuntimeError("power iteration start vector degenerate")
    v /= nv
    lam_prev = 0.0
    for _ in range(_POWER_ITERATION_MAX_STEPS):
        u = A.T @ (A @ v)
        lam = float(v @ u)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            raise RuntimeError("power iteration broke down (zero matrix?)")
        v = u / nu
        if abs(lam - lam_prev) <= tol * max(1.0, abs(lam)):
            return _LIPSCHITZ_INFLATION * lam
        lam_prev = lam
    raise RuntimeError("power iteration failed to converge")


def format_float(v: float) -> str:
    """17-significant-digit rendering; round-trips any finite double."""
    return format(float(v), ".17g")


def _float_array_json(a: np.ndarray) -> str:
    return "[" + ",".join(format_float(v) for v in a.ravel().tolist()) + "]"


def least_squares_to_json(objective: LeastSquaresObjective) -> str:
    """Serialize to the {"m","n","A","y"} container (A row-major, 17 digits)."""
    return (
        '{"m":%d,"n":%d,"A":%s,"y":%s}'
        % (
            objective.m,
            objective.n,
            _float_array_json(objective.A),
            _float_array_json(objective.y),
        )
    )


def least_squares_from_json(text: str) -> LeastSquaresObjective:
    doc = json.loads(text)
    m, n = int(doc["m"]), int(doc["n"])
    A = np.asarray(doc["A"], dtype=np.float64).reshape(m, n)
    y = np.asarray(doc["y"], dtype=np.float64)
    return LeastSquaresObjective(A, y)
