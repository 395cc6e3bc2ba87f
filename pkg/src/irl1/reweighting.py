"""Reweighting: the per-iteration weights and the two epsilon schedules."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class EpsStrategy(enum.Enum):
    GEOMETRIC = "geometric"
    SMART_REWEIGHTING = "sr"


@dataclass(frozen=True)
class EpsilonState:
    """Current smoothing vector plus its update rule.

    Components stay strictly positive forever and are componentwise
    nonincreasing across updates.
    """

    eps: np.ndarray
    mu: float
    strategy: EpsStrategy

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=np.float64)
        object.__setattr__(self, "eps", eps)
        if eps.ndim != 1 or np.any(eps <= 0.0):
            raise ValueError("eps must be a 1-D vector with strictly positive entries")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if not isinstance(self.strategy, EpsStrategy):
            object.__setattr__(self, "strategy", EpsStrategy(self.strategy))


def compute_weights(x: np.ndarray, eps: np.ndarray, p: float) -> np.ndarray:
    """w_i = p * (|x_i| + eps_i)**(p-1); finite because eps_i > 0."""
    x = np.asarray(x, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if np.any(eps <= 0.0):
        raise ValueError("weights need strictly positive eps")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    return p * (np.abs(x) + eps) ** (p - 1.0)


def update_epsilon_geometric(state: EpsilonState) -> EpsilonState:
    """Shrink every component: eps' = mu * eps."""
    return EpsilonState(state.mu * state.eps, state.mu, state.strategy)


def update_epsilon_smart(state: EpsilonState, x_new: np.ndarray) -> EpsilonState:
    """Freeze eps_i where the new iterate is exactly zero, shrink elsewhere.

    The zero test is exact equality: the weighted-l1 subproblem solver
    produces hard zeros, so no tolerance is involved.
    """
    x_new = np.asarray(x_new, dtype=np.float64)
    eps = np.where(x_new == 0.0, state.eps, state.mu * state.eps)
    return EpsilonState(eps, state.mu, state.strategy)
