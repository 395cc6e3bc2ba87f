"""Post-solve certificates: weighted-l1 equivalence and Laplace-prior scales.

A first-order point x* of the lp-regularized problem is also a stationary
point of a weighted l1 problem whose weights are p|x_i*|**(p-1) on the
support and anything strictly above |grad_i f(x*)|/lam off it.  The
certificate materializes those weights (inactive ones with a margin factor)
and reports the worst KKT violation.  Inverting the weights gives the
per-coordinate Laplace scales under which x* is a MAP point of the linear
Gaussian model with noise variance lam.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problems import LpProblem, format_float

DEFAULT_MARGIN = 2.0
INACTIVE_WEIGHT_FLOOR = 1e-8


@dataclass(frozen=True)
class EquivalenceCertificate:
    """Weighted-l1 stationarity certificate for a candidate point."""

    support: np.ndarray
    support_weights: dict[int, float]
    inactive_weights: dict[int, float]
    inactive_lower_bounds: dict[int, float]
    max_kkt_violation: float
    margin: float

    def weight_vector(self, n: int) -> np.ndarray:
        w = np.empty(n)
        for i, wi in self.support_weights.items():
            w[i] = wi
        for i, wi in self.inactive_weights.items():
            w[i] = wi
        return w


@dataclass(frozen=True)
class MapScales:
    """Laplace prior scales b_i = 1/w_i; sigma_sq (= lam) kept as metadata."""

    b: dict[int, float]
    sigma_sq: float


def weighted_l1_certificate(
    problem: LpProblem,
    x_star: np.ndarray,
    margin: float = DEFAULT_MARGIN,
    floor: float = INACTIVE_WEIGHT_FLOOR,
) -> EquivalenceCertificate:
    """Build the weighted-l1 certificate at x_star.

    Support weights are p|x_i*|**(p-1); inactive weights are
    margin * max(|grad_i f(x*)|/lam, floor), honoring the strict inequality
    required off the support (the floor covers vanishing gradients).  The
    reported violation is the worst of |grad_i f + lam w_i sign(x_i*)| on
    the support and max(|grad_i f| - lam w_i, 0) off it.
    """
    if not margin > 1.0:
        raise ValueError("margin must exceed 1")
    x_star = np.asarray(x_star, dtype=np.float64)
    lam, p = problem.lam, problem.p
    g = problem.objective.grad(x_star)

    on = x_star != 0.0
    support = np.nonzero(on)[0]
    support_weights = {}
    violations = [0.0]
    for i in support:
        wi = p * abs(x_star[i]) ** (p - 1.0)
        support_weights[int(i)] = wi
        violations.append(abs(g[i] + lam * wi * np.sign(x_star[i])))

    inactive_weights = {}
    inactive_lower_bounds = {}
    for i in np.nonzero(~on)[0]:
        bound = abs(g[i]) / lam
        inactive_lower_bounds[int(i)] = bound
        wi = margin * max(bound, floor)
        inactive_weights[int(i)] = wi
        violations.append(max(abs(g[i]) - lam * wi, 0.0))

    return EquivalenceCertificate(
        support=support,
        support_weights=support_weights,
        inactive_weights=inactive_weights,
        inactive_lower_bounds=inactive_lower_bounds,
        max_kkt_violation=float(max(violations)),
        margin=margin,
    )


def map_laplace_scales(
    x_star: np.ndarray, certificate: EquivalenceCertificate, lam: float
) -> MapScales:
    """Scales b_i = 1/w_i for every coordinate; sigma_sq = lam.

    On the support this is |x_i*|**(1-p)/p; off it the margin construction
    guarantees b_i <= lam/|grad_i f(x*)|.
    """
    b = {i: 1.0 / w for i, w in certificate.support_weights.items()}
    b.update({i: 1.0 / w for i, w in certificate.inactive_weights.items()})
    return MapScales(b=dict(sorted(b.items())), sigma_sq=lam)


def certificate_to_json(
    certificate: EquivalenceCertificate, scales: MapScales
) -> str:
    """Serialize certificate + scales as {"support","w","b","kkt_violation"}."""
    w_all = dict(sorted({**certificate.support_weights, **certificate.inactive_weights}.items()))
    support = ",".join(str(int(i)) for i in certificate.support)
    w_body = ",".join('"%d":%s' % (i, format_float(v)) for i, v in w_all.items())
    b_body = ",".join('"%d":%s' % (i, format_float(v)) for i, v in scales.b.items())
    return '{"support":[%s],"w":{%s},"b":{%s},"kkt_violation":%s}' % (
        support,
        w_body,
        b_body,
        format_float(certificate.max_kkt_violation),
    )


@dataclass(frozen=True)
class ContourGrid:
    """Dense objective values over a 2-D grid (for external plotting)."""

    x: np.ndarray
    y: np.ndarray
    f_lp: np.ndarray
    f_wl1: Optional[np.ndarray]


def contour_grid(
    problem: LpProblem,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    resolution: int,
    weights: Optional[np.ndarray] = None,
) -> ContourGrid:
    """Evaluate F over a resolution x resolution grid; 2-D problems only.

    With `weights` given, the weighted-l1 surrogate
    f(x) + lam * (w_1|x_1| + w_2|x_2|) is evaluated on the same grid.
    """
    obj = problem.objective
    n = getattr(obj, "n", 2)
    if n != 2:
        raise ValueError("contour grids are defined for 2-D problems only")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    gx = np.linspace(x_range[0], x_range[1], resolution)
    gy = np.linspace(y_range[0], y_range[1], resolution)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])

    if hasattr(obj, "value_batch"):
        f_vals = obj.value_batch(pts)
    else:
        f_vals = np.array([obj.value(pt) for pt in pts])
    f_vals = f_vals.reshape(resolution, resolution)

    p, lam = problem.p, problem.lam
    f_lp = f_vals + lam * (np.abs(X) ** p + np.abs(Y) ** p)
    f_wl1 = None
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (2,):
            raise ValueError("weights must be a length-2 vector")
        f_wl1 = f_vals + lam * (w[0] * np.abs(X) + w[1] * np.abs(Y))
    return ContourGrid(x=gx, y=gy, f_lp=f_lp, f_wl1=f_wl1)


def write_contour_csv(grid: ContourGrid, path: str) -> None:
    """Write rows x,y,f_lp,f_wl1 in row-major (x outer, y inner) order."""
    if grid.f_wl1 is None:
        raise ValueError("grid has no weighted-l1 surface to write")
    with open(path, "w", newline="") as fh:
        fh.write("x,y,f_lp,f_wl1\n")
        for i, xv in enumerate(grid.x):
            for j, yv in enumerate(grid.y):
                fh.write(
                    "%s,%s,%s,%s\n"
                    % (
                        format_float(xv),
                        format_float(yv),
                        format_float(grid.f_lp[i, j]),
                        format_float(grid.f_wl1[i, j]),
                    )
                )


def grid_argmin(values: np.ndarray) -> tuple[int, int]:
    """Indices (i, j) of the smallest grid value."""
    i, j = np.unravel_index(int(np.argmin(values)), values.shape)
    return int(i), int(j)
