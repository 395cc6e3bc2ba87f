"""Seeded generation of sparse-recovery problem instances.

An instance is y = A x_true + e with A an m x n matrix of i.i.d.
N(0, 1/m) entries, x_true carrying K randomly placed +-1 spikes, and e
i.i.d. Gaussian noise.  All draws come from one SplitMix64 stream in a
fixed order -- A row-major, then spike positions (partial Fisher-Yates),
then spike signs, then noise -- so an instance is a pure function of
(m, n, K, seed, noise_std).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problems import (
    LeastSquaresObjective,
    LpProblem,
    _float_array_json,
)
from .rng import SplitMix64

# measurement noise defaults to variance 1e-4
DEFAULT_NOISE_STD = 1e-2

PROFILES = {"small": (256, 512, 64), "large": (1024, 2048, 256)}

# Column norms of A concentrate near 1 only once m is a few hundred; below
# that the [0.5, 1.5] band is routinely left by perfectly healthy draws.
_COLUMN_NORM_CHECK_MIN_M = 200


@dataclass(frozen=True)
class RecoveryInstance:
    A: np.ndarray
    y: np.ndarray
    x_true: np.ndarray
    seed: int
    m: int
    n: int
    K: int
    noise_std: Optional[float]

    def to_problem(self, lam: float, p: float) -> LpProblem:
        return LpProblem(LeastSquaresObjective(self.A, self.y), lam, p)

    @property
    def true_support(self) -> np.ndarray:
        return np.nonzero(self.x_true)[0]


def generate_instance(
    m: int, n: int, K: int, seed: int, noise_std: float = DEFAULT_NOISE_STD
) -> RecoveryInstance:
    """One seeded instance; deterministic given (m, n, K, seed, noise_std)."""
    if m < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    if not 0 < K <= n:
        raise ValueError("K must satisfy 0 < K <= n")
    if noise_std < 0:
        raise ValueError("noise_std must be nonnegative")

    rng = SplitMix64(seed)
    A = rng.normals(m * n).reshape(m, n) / np.sqrt(m)

    # partial Fisher-Yates: the first K slots of perm become the support
    perm = list(range(n))
    for i in range(K):
        j = i + rng.below(n - i)
        perm[i], perm[j] = perm[j], perm[i]
    x_true = np.zeros(n)
    for i in range(K):
        x_true[perm[i]] = float(rng.sign())

    e = noise_std * rng.normals(m)
    y = A @ x_true + e

    if m >= _COLUMN_NORM_CHECK_MIN_M:
        colsq = np.sum(A * A, axis=0)
        if np.any(colsq < 0.5) or np.any(colsq > 1.5):
            warnings.warn(
                "column squared norms of A fall outside [0.5, 1.5]; the "
                "instance is unusually poorly concentrated",
                UserWarning,
            )

    return RecoveryInstance(
        A=A, y=y, x_true=x_true, seed=seed, m=m, n=n, K=K, noise_std=noise_std
    )


def generate_ensemble(
    profile: str, count: int, base_seed: int, noise_std: float = DEFAULT_NOISE_STD
) -> list[RecoveryInstance]:
    """Instances j = 0..count-1 with seeds base_seed + j at the named size."""
    if count < 1:
        raise ValueError("count must be at least 1")
    try:
        m, n, K = PROFILES[profile.lower()]
    except KeyError:
        raise ValueError("profile must be one of %s" % sorted(PROFILES)) from None
    return [
        generate_instance(m, n, K, base_seed + j, noise_std) for j in range(count)
    ]


def instance_to_json(instance: RecoveryInstance) -> str:
    """The least-squares container extended with x_true, seed and K."""
    return '{"m":%d,"n":%d,"A":%s,"y":%s,"x_true":%s,"seed":%d,"K":%d}' % (
        instance.m,
        instance.n,
        _float_array_json(instance.A),
        _float_array_json(instance.y),
        _float_array_json(instance.x_true),
        instance.seed,
        instance.K,
    )


def instance_from_json(text: str) -> RecoveryInstance:
    doc = json.loads(text)
    m, n = int(doc["m"]), int(doc["n"])
    A = np.asarray(doc["A"], dtype=np.float64).reshape(m, n)
    return RecoveryInstance(
        A=A,
        y=np.asarray(doc["y"], dtype=np.float64),
        x_true=np.asarray(doc["x_true"], dtype=np.float64),
        seed=int(doc["seed"]),
        m=m,
        n=n,
        K=int(doc["K"]),
        noise_std=None,
    )
