"""Per-iteration convex models and the weighted-l1 subproblem solvers.

A local model is a convex quadratic expressed relative to its anchor point
(the current iterate), so ``Q(anchor) = 0`` by convention and
``grad Q(anchor)`` equals the stored anchor gradient.  Adding the weighted
l1 term ``sum_i t_i |x_i|`` (with ``t = lam * w``) gives the subproblem

    minimize_x  Q(x) + sum_i t_i |x_i|

solved in closed form for the proximal and diagonal models and by cyclic
coordinate descent for a dense quadratic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np

DEFAULT_SUBPROBLEM_TOL = 1e-10
_MAX_CD_SWEEPS = 10_000


def prox_weighted_l1(z: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Componentwise soft threshold: sign(z) * max(|z| - t, 0).

    Minimizes 0.5*||x - z||**2 + sum_i t_i |x_i|.  Components with
    |z_i| <= t_i come out as exact zeros (the ``+ 0.0`` also normalizes
    away negative zeros).
    """
    z = np.asarray(z, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise ValueError("thresholds must be nonnegative")
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0) + 0.0


@dataclass(frozen=True)
class ProximalFirstOrder:
    """Q(x) = g.(x - a) + (beta/2)||x - a||**2 with beta > 0."""

    anchor: np.ndarray
    anchor_gradient: np.ndarray
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    @property
    def curvature_lower_bound(self) -> float:
        return self.beta

    def grad_Q(self, x: np.ndarray) -> np.ndarray:
        return self.anchor_gradient + self.beta * (x - self.anchor)

    def Q_rel(self, x: np.ndarray) -> float:
        d = x - self.anchor
        return float(self.anchor_gradient @ d + 0.5 * self.beta * (d @ d))

    def solve(self, t: np.ndarray, tol: float) -> np.ndarray:
        z = self.anchor - self.anchor_gradient / self.beta
        return prox_weighted_l1(z, t / self.beta)

    def shifted(self, gamma: float) -> "ProximalFirstOrder":
        return replace(self, beta=self.beta + gamma)


@dataclass(frozen=True)
class DiagonalQuasiNewton:
    """Q(x) = g.(x - a) + 0.5 * (x - a)^T diag(d) (x - a), all d_i > 0."""

    anchor: np.ndarray
    anchor_gradient: np.ndarray
    diag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=np.float64)
        object.__setattr__(self, "diag", diag)
        if np.any(diag <= 0.0):
            raise ValueError("all diagonal curvatures must be positive")

    @property
    def curvature_lower_bound(self) -> float:
        return float(np.min(self.diag))

    def grad_Q(self, x: np.ndarray) -> np.ndarray:
        return self.anchor_gradient + self.diag * (x - self.anchor)

    def Q_rel(self, x: np.ndarray) -> float:
        d = x - self.anchor
        return float(self.anchor_gradient @ d + 0.5 * (d * d) @ self.diag)

    def solve(self, t: np.ndarray, tol: float) -> np.ndarray:
        z = self.anchor - self.anchor_gradient / self.diag
        return prox_weighted_l1(z, t / self.diag)

    def shifted(self, gamma: float) -> "DiagonalQuasiNewton":
        return replace(self, diag=self.diag + gamma)


@dataclass(frozen=True)
class DenseQuadratic:
    """Q(x) = g.(x - a) + 0.5 * (x - a)^T B (x - a), B symmetric positive definite."""

    anchor: np.ndarray
    anchor_gradient: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.B, dtype=np.float64)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("B must be square")
        if not np.allclose(B, B.T, rtol=1e-10, atol=1e-12):
            raise ValueError("B must be symmetric")
        B = 0.5 * (B + B.T)
        try:
            np.linalg.cholesky(B)
        except np.linalg.LinAlgError as exc:
            raise ValueError("B must be positive definite") from exc
        object.__setattr__(self, "B", B)

    @property
    def curvature_lower_bound(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.B)))

    def grad_Q(self, x: np.ndarray) -> np.ndarray:
        return self.anchor_gradient + self.B @ (x - self.anchor)

    def Q_rel(self, x: np.ndarray) -> float:
        d = x - self.anchor
        return float(self.anchor_gradient @ d + 0.5 * d @ (self.B @ d))

    def solve(
        self,
        t: np.ndarray,
        tol: float,
        sweep_callback: Optional[Callable[[np.ndarray], None]] = None,
    ) -> np.ndarray:
        return _coordinate_descent(self, t, tol, sweep_callback)

    def shifted(self, gamma: float) -> "DenseQuadratic":
        if gamma == 0.0:
            return self
        return replace(self, B=self.B + gamma * np.eye(self.B.shape[0]))


LocalModel = Union[ProximalFirstOrder, DiagonalQuasiNewton, DenseQuadratic]


def _coordinate_descent(model, t, tol, sweep_callback=None):
    """Cyclic coordinate descent on Q(x) + sum t_i |x_i|.

    Maintains r = B (x - anchor); each coordinate is minimized exactly, with
    the dead-zone boundary mapping to a hard zero.  Stops when the maximum
    coordinatewise optimality violation drops to `tol`.
    """
    a = model.anchor
    g = model.anchor_gradient
    B = model.B
    n = a.shape[0]
    x = a.astype(np.float64).copy()
    r = np.zeros(n)
    for _ in range(_MAX_CD_SWEEPS):
        for i in range(n):
            xi_old = x[i]
            bii = B[i, i]
            z = xi_old - (g[i] + r[i]) / bii
            xi_new = float(prox_weighted_l1(np.array([z]), np.array([t[i] / bii]))[0])
            if xi_new != xi_old:
                r += B[:, i] * (xi_new - xi_old)
                x[i] = xi_new
        if sweep_callback is not None:
            sweep_callback(x.copy())
        if _violation_from_grad(g + r, t, x) <= tol:
            return x
    raise RuntimeError(
        "coordinate descent exhausted its sweep budget without reaching the "
        "requested tolerance (ill-conditioned model?)"
    )


def _violation_from_grad(grad_q: np.ndarray, t: np.ndarray, x: np.ndarray) -> float:
    on = x != 0.0
    viol = np.where(
        on,
        np.abs(grad_q + t * np.sign(x)),
        np.maximum(np.abs(grad_q) - t, 0.0),
    )
    return float(np.max(viol)) if viol.size else 0.0


def optimality_violation(
    model: LocalModel, lam: float, w: np.ndarray, x: np.ndarray
) -> float:
    """Max violation of the subproblem first-order conditions at x.

    For x_i != 0 this is |grad_i Q(x) + lam w_i sign(x_i)|; for x_i = 0 it is
    max(|grad_i Q(x)| - lam w_i, 0).
    """
    return _violation_from_grad(model.grad_Q(x), lam * np.asarray(w), np.asarray(x))


def solve_model(
    model: LocalModel,
    lam: float,
    w: np.ndarray,
    tol: float = DEFAULT_SUBPROBLEM_TOL,
) -> np.ndarray:
    """Minimize Q(x) + lam * sum_i w_i |x_i| for the given local model."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    t = lam * np.asarray(w, dtype=np.float64)
    return model.solve(t, tol)


def model_decrease(model: LocalModel, x_new: np.ndarray) -> float:
    """Q(anchor) - Q(x_new); since Q(anchor) = 0 this is -Q(x_new)."""
    return -model.Q_rel(np.asarray(x_new, dtype=np.float64))


def add_proximal_term(model: LocalModel, gamma: float) -> LocalModel:
    """Stiffen the model: Q(x) <- Q(x) + (gamma/2)||x - anchor||**2."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if gamma == 0.0:
        return model
    return model.shifted(gamma)
