"""Weighted-l1 prox, local models, subproblem optimality."""

import itertools

import numpy as np
import pytest

from irl1 import (
    DenseQuadratic,
    DiagonalQuasiNewton,
    ProximalFirstOrder,
    add_proximal_term,
    model_decrease,
    optimality_violation,
    prox_weighted_l1,
    solve_model,
)
from irl1.rng import SplitMix64


def grid_min_scalar(z: float, t: float, step: float = 1e-5) -> float:
    """Brute-force minimizer of 0.5*(x-z)**2 + t*|x| over a dense grid."""
    grid = np.arange(-abs(z) - 1.0, abs(z) + 1.0 + step, step)
    vals = 0.5 * (grid - z) ** 2 + t * np.abs(grid)
    return float(grid[np.argmin(vals)])


def orthant_oracle(model: DenseQuadratic, t: np.ndarray) -> np.ndarray:
    """Exhaustive KKT enumeration over all sign patterns (2-D only)."""
    a, g, B = model.anchor, model.anchor_gradient, model.B
    best, best_val = None, np.inf
    for sigma in itertools.product((-1, 0, 1), repeat=2):
        sigma = np.array(sigma)
        free = np.nonzero(sigma)[0]
        zero = np.nonzero(sigma == 0)[0]
        d = np.zeros(2)
        d[zero] = -a[zero]
        if free.size:
            rhs = -g[free] - t[free] * sigma[free]
            if zero.size:
                rhs -= B[np.ix_(free, zero)] @ d[zero]
            try:
                d[free] = np.linalg.solve(B[np.ix_(free, free)], rhs)
            except np.linalg.LinAlgError:
                continue
        x = a + d
        if np.any(np.sign(x[free]) != sigma[free]):
            continue
        grad_q = g + B @ d
        if np.any(np.abs(grad_q[zero]) > t[zero] + 1e-12):
            continue
        val = float(g @ d + 0.5 * d @ (B @ d) + t @ np.abs(x))
        if val < best_val:
            best, best_val = x, val
    assert best is not None
    return best


class TestProx:
    def test_shrinks_by_threshold(self):
        assert prox_weighted_l1(np.array([5.0]), np.array([2.0]))[0] == 3.0

    def test_dead_zone_gives_exact_positive_zero(self):
        out = prox_weighted_l1(np.array([-1.0]), np.array([2.0]))
        assert out[0] == 0.0
        assert not np.signbit(out[0])

    def test_against_grid_oracle(self):
        got = prox_weighted_l1(np.array([0.7]), np.array([0.25]))[0]
        assert got == pytest.approx(0.45, abs=1e-15)
        assert abs(got - grid_min_scalar(0.7, 0.25)) <= 1e-4

    def test_rejects_negative_threshold(self):
        with pytest.raises(ValueError):
            prox_weighted_l1(np.ones(2), np.array([0.1, -0.1]))


class TestModelValidation:
    def test_prox_needs_positive_beta(self):
        with pytest.raises(ValueError):
            ProximalFirstOrder(np.zeros(2), np.zeros(2), 0.0)

    def test_diag_needs_positive_entries(self):
        with pytest.raises(ValueError):
            DiagonalQuasiNewton(np.zeros(2), np.zeros(2), np.array([1.0, 0.0]))

    def test_dense_needs_symmetry(self):
        with pytest.raises(ValueError):
            DenseQuadratic(np.zeros(2), np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_dense_needs_positive_definiteness(self):
        with pytest.raises(ValueError):
            DenseQuadratic(np.zeros(2), np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_gradient_at_anchor_matches_stored_gradient(self):
        rng = SplitMix64(31)
        a, g = rng.normals(3), rng.normals(3)
        models = [
            ProximalFirstOrder(a, g, 0.7),
            DiagonalQuasiNewton(a, g, np.abs(rng.normals(3)) + 0.1),
            DenseQuadratic(a, g, np.diag(np.abs(rng.normals(3)) + 0.5)),
        ]
        for model in models:
            assert np.allclose(model.grad_Q(a), g)
            assert model.Q_rel(a) == 0.0


class TestSolveModel:
    def test_one_dimensional_soft_threshold(self):
        model = ProximalFirstOrder(np.zeros(1), np.array([-3.0]), 1.0)
        x = solve_model(model, lam=1.0, w=np.ones(1))
        assert x[0] == pytest.approx(2.0, abs=1e-15)

    def test_huge_weights_give_zero_vector(self):
        rng = SplitMix64(32)
        model = ProximalFirstOrder(rng.normals(4), rng.normals(4), 0.5)
        x = solve_model(model, lam=1.0, w=np.full(4, 1e6))
        assert np.array_equal(x, np.zeros(4))

    def test_dense_matches_orthant_enumeration(self):
        rng = SplitMix64(33)
        B = np.array([[2.0, 0.3], [0.3, 1.0]])
        for _ in range(25):
            model = DenseQuadratic(rng.normals(2), rng.normals(2), B)
            w = np.abs(rng.normals(2)) + 0.2
            lam = 0.7
            got = solve_model(model, lam, w, tol=1e-12)
            want = orthant_oracle(model, lam * w)
            assert np.allclose(got, want, atol=1e-6)

    def test_prox_agrees_with_dense_scaled_identity(self):
        rng = SplitMix64(34)
        for _ in range(20):
            a, g = rng.normals(5), rng.normals(5)
            beta = 0.4 + float(rng.uniforms(1)[0])
            w = np.abs(rng.normals(5)) + 0.05
            via_prox = solve_model(ProximalFirstOrder(a, g, beta), 0.3, w)
            via_dense = solve_model(
                DenseQuadratic(a, g, beta * np.eye(5)), 0.3, w, tol=1e-13
            )
            assert np.allclose(via_prox, via_dense, atol=1e-8)

    def test_diag_agrees_with_dense_diagonal(self):
        rng = SplitMix64(35)
        for _ in range(20):
            a, g = rng.normals(4), rng.normals(4)
            diag = np.abs(rng.normals(4)) + 0.3
            w = np.abs(rng.normals(4)) + 0.05
            via_diag = solve_model(DiagonalQuasiNewton(a, g, diag), 0.2, w)
            via_dense = solve_model(DenseQuadratic(a, g, np.diag(diag)), 0.2, w, tol=1e-13)
            assert np.allclose(via_diag, via_dense, atol=1e-8)

    def test_optimality_condition_for_all_model_kinds(self):
        rng = SplitMix64(36)
        for _ in range(100):
            n = 1 + rng.below(5)
            a, g = rng.normals(n), rng.normals(n)
            w = np.abs(rng.normals(n)) + 0.02
            lam = 0.1 + float(rng.uniforms(1)[0])
            C = rng.normals(n * n).reshape(n, n) / np.sqrt(n)
            models = [
                ProximalFirstOrder(a, g, 0.2 + float(rng.uniforms(1)[0])),
                DiagonalQuasiNewton(a, g, np.abs(rng.normals(n)) + 0.2),
                DenseQuadratic(a, g, C @ C.T + 0.3 * np.eye(n)),
            ]
            for model in models:
                x = solve_model(model, lam, w, tol=1e-11)
                assert optimality_violation(model, lam, w, x) <= 1e-8

    def test_dense_budget_exhaustion_signals_ill_conditioning(self):
        # condition number ~2e12 stalls coordinate descent
        B = np.array([[1.0, 1.0 - 1e-12], [1.0 - 1e-12, 1.0]])
        model = DenseQuadratic(np.zeros(2), np.array([1.0, -1.0]), B)
        with pytest.raises(RuntimeError):
            solve_model(model, lam=1.0, w=np.full(2, 1e-3), tol=1e-10)

    def test_coordinate_descent_sweeps_never_increase_objective(self):
        rng = SplitMix64(37)
        B = np.array([[3.0, 1.2, 0.0], [1.2, 2.0, -0.4], [0.0, -0.4, 1.5]])
        a, g = rng.normals(3), rng.normals(3)
        model = DenseQuadratic(a, g, B)
        t = 0.4 * (np.abs(rng.normals(3)) + 0.1)
        seen = []

        def objective(x):
            d = x - a
            return float(g @ d + 0.5 * d @ (B @ d) + t @ np.abs(x))

        model.solve(t, tol=1e-12, sweep_callback=lambda x: seen.append(objective(x)))
        assert len(seen) >= 2
        assert all(b <= s + 1e-12 for s, b in zip(seen, seen[1:]))


class TestModelDecrease:
    def test_zero_at_anchor(self):
        model = ProximalFirstOrder(np.array([1.0]), np.array([2.0]), 3.0)
        assert model_decrease(model, np.array([1.0])) == 0.0

    def test_hand_evaluated_example(self):
        # -(g*d + beta/2*d^2) with g=-3, d=2, beta=1 gives 4
        model = ProximalFirstOrder(np.zeros(1), np.array([-3.0]), 1.0)
        assert model_decrease(model, np.array([2.0])) == pytest.approx(4.0, abs=1e-15)

    def test_decrease_bound_at_minimizer(self):
        # decrease + lam*sum w*(|a|-|x|) >= (M/2)||x-a||^2 for solver output
        rng = SplitMix64(38)
        for _ in range(30):
            n = 1 + rng.below(4)
            a, g = rng.normals(n), rng.normals(n)
            w = np.abs(rng.normals(n)) + 0.05
            lam = 0.4
            C = rng.normals(n * n).reshape(n, n) / np.sqrt(n)
            models = [
                ProximalFirstOrder(a, g, 0.6),
                DiagonalQuasiNewton(a, g, np.abs(rng.normals(n)) + 0.4),
                DenseQuadratic(a, g, C @ C.T + 0.5 * np.eye(n)),
            ]
            for model in models:
                x = solve_model(model, lam, w, tol=1e-12)
                lhs = model_decrease(model, x) + lam * float(
                    w @ (np.abs(a) - np.abs(x))
                )
                m_bound = model.curvature_lower_bound
                rhs = 0.5 * m_bound * float((x - a) @ (x - a))
                assert lhs >= rhs - 1e-10


class TestAddProximalTerm:
    def test_zero_shift_is_identity(self):
        model = ProximalFirstOrder(np.zeros(1), np.ones(1), 0.1)
        assert add_proximal_term(model, 0.0) is model

    def test_prox_scalar_shift(self):
        model = ProximalFirstOrder(np.zeros(1), np.ones(1), 0.1)
        assert add_proximal_term(model, 1.0).beta == pytest.approx(1.1)

    def test_diag_shift(self):
        model = DiagonalQuasiNewton(np.zeros(2), np.ones(2), np.array([1.0, 2.0]))
        assert np.allclose(add_proximal_term(model, 0.5).diag, [1.5, 2.5])

    def test_dense_eigenvalues_shift_exactly(self):
        rng = SplitMix64(39)
        C = rng.normals(9).reshape(3, 3)
        B = C @ C.T + 0.5 * np.eye(3)
        model = DenseQuadratic(np.zeros(3), np.zeros(3), B)
        shifted = add_proximal_term(model, 2.0)
        before = np.linalg.eigvalsh(model.B)
        after = np.linalg.eigvalsh(shifted.B)
        assert np.allclose(after, before + 2.0, atol=1e-12)

    def test_anchor_and_gradient_preserved(self):
        rng = SplitMix64(40)
        a, g = rng.normals(2), rng.normals(2)
        model = ProximalFirstOrder(a, g, 0.3)
        shifted = add_proximal_term(model, 4.0)
        assert np.array_equal(shifted.anchor, a)
        assert np.array_equal(shifted.anchor_gradient, g)

    def test_rejects_negative_gamma(self):
        model = ProximalFirstOrder(np.zeros(1), np.ones(1), 0.1)
        with pytest.raises(ValueError):
            add_proximal_term(model, -0.1)
