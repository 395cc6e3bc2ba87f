"""Iteratively reweighted l1 methods for lp-regularized smooth minimization."""

from .diagnostics import (
    ContourGrid,
    EquivalenceCertificate,
    MapScales,
    contour_grid,
    map_laplace_scales,
    weighted_l1_certificate,
)
from .instances import (
    RecoveryInstance,
    generate_ensemble,
    generate_instance,
    instance_from_json,
    instance_to_json,
)
from .problems import (
    LeastSquaresObjective,
    LpProblem,
    SmoothObjective,
    estimate_lipschitz,
    evaluate_F,
    evaluate_F_smoothed,
    gradient,
)
from .reweighting import (
    EpsilonState,
    EpsStrategy,
    compute_weights,
    update_epsilon_geometric,
    update_epsilon_smart,
)
from .solver import (
    IterateRecord,
    SolveResult,
    SolveStatus,
    SolverOptions,
    detect_support_stabilization,
    irl1_ls_solve,
    irl1_solve,
    solve,
    stationarity_residual,
)
from .subproblem import (
    DenseQuadratic,
    DiagonalQuasiNewton,
    ProximalFirstOrder,
    add_proximal_term,
    model_decrease,
    optimality_violation,
    prox_weighted_l1,
    solve_model,
)

__all__ = [
    "ContourGrid",
    "DenseQuadratic",
    "DiagonalQuasiNewton",
    "EpsStrategy",
    "EpsilonState",
    "EquivalenceCertificate",
    "IterateRecord",
    "LeastSquaresObjective",
    "LpProblem",
    "MapScales",
    "ProximalFirstOrder",
    "RecoveryInstance",
    "SmoothObjective",
    "SolveResult",
    "SolveStatus",
    "SolverOptions",
    "add_proximal_term",
    "compute_weights",
    "contour_grid",
    "detect_support_stabilization",
    "estimate_lipschitz",
    "evaluate_F",
    "evaluate_F_smoothed",
    "generate_ensemble",
    "generate_instance",
    "gradient",
    "instance_from_json",
    "instance_to_json",
    "irl1_ls_solve",
    "irl1_solve",
    "map_laplace_scales",
    "model_decrease",
    "optimality_violation",
    "prox_weighted_l1",
    "solve",
    "solve_model",
    "stationarity_residual",
    "update_epsilon_geometric",
    "update_epsilon_smart",
    "weighted_l1_certificate",
]
