"""Weight formula and the two epsilon schedules."""

import numpy as np
import pytest

from irl1 import (
    EpsilonState,
    EpsStrategy,
    compute_weights,
    update_epsilon_geometric,
    update_epsilon_smart,
)
from irl1.rng import SplitMix64


class TestComputeWeights:
    def test_known_values(self):
        w = compute_weights(np.array([0.0, 3.0, 0.21]), np.array([1.0, 1.0, 0.04]), 0.5)
        assert w == pytest.approx([0.5, 0.25, 1.0], rel=1e-12)

    def test_rejects_nonpositive_eps(self):
        with pytest.raises(ValueError):
            compute_weights(np.zeros(2), np.array([1.0, 0.0]), 0.5)

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            compute_weights(np.zeros(1), np.ones(1), 1.0)

    def test_antimonotone_in_magnitude_and_eps(self):
        rng = SplitMix64(21)
        for _ in range(50):
            a = np.abs(rng.normals(6))
            b = a + np.abs(rng.normals(6))
            eps = np.abs(rng.normals(6)) + 0.01
            wa = compute_weights(a, eps, 0.5)
            wb = compute_weights(b, eps, 0.5)
            assert np.all(wb <= wa)
            assert np.all(compute_weights(a, 2.0 * eps, 0.5) <= wa)

    def test_strictly_positive_and_finite(self):
        w = compute_weights(np.array([0.0, 1e8]), np.array([1e-12, 1e-12]), 0.3)
        assert np.all(w > 0) and np.all(np.isfinite(w))


class TestEpsilonState:
    def test_validation(self):
        with pytest.raises(ValueError):
            EpsilonState(np.array([1.0, 0.0]), 0.9, EpsStrategy.GEOMETRIC)
        with pytest.raises(ValueError):
            EpsilonState(np.ones(2), 1.0, EpsStrategy.GEOMETRIC)

    def test_strategy_coercion_from_string(self):
        state = EpsilonState(np.ones(2), 0.9, "sr")
        assert state.strategy is EpsStrategy.SMART_REWEIGHTING


class TestGeometricUpdate:
    def test_single_step(self):
        state = EpsilonState(np.ones(2), 0.9, EpsStrategy.GEOMETRIC)
        assert np.array_equal(update_epsilon_geometric(state).eps, [0.9, 0.9])

    def test_power_law(self):
        state = EpsilonState(np.ones(1), 0.9, EpsStrategy.GEOMETRIC)
        for _ in range(50):
            state = update_epsilon_geometric(state)
        assert state.eps[0] == pytest.approx(0.9**50, rel=1e-12)

    def test_stays_positive_after_500_updates(self):
        # 0.9**500 ~ 1.322e-23, still comfortably positive
        state = EpsilonState(np.ones(1), 0.9, EpsStrategy.GEOMETRIC)
        for _ in range(500):
            state = update_epsilon_geometric(state)
        assert state.eps[0] > 0.0
        assert state.eps[0] == pytest.approx(1.322070819480823e-23, rel=1e-12)


class TestSmartUpdate:
    def test_componentwise_rule(self):
        state = EpsilonState(np.array([0.5, 0.5]), 0.9, EpsStrategy.SMART_REWEIGHTING)
        new = update_epsilon_smart(state, np.array([0.0, 1.2]))
        assert new.eps == pytest.approx([0.5, 0.45], rel=1e-15)

    def test_all_zero_iterate_freezes_everything(self):
        state = EpsilonState(np.array([0.3, 0.7]), 0.9, EpsStrategy.SMART_REWEIGHTING)
        assert np.array_equal(update_epsilon_smart(state, np.zeros(2)).eps, state.eps)

    def test_all_nonzero_matches_geometric(self):
        state = EpsilonState(np.array([0.3, 0.7]), 0.9, EpsStrategy.SMART_REWEIGHTING)
        smart = update_epsilon_smart(state, np.array([1.0, -2.0]))
        geo = update_epsilon_geometric(state)
        assert np.array_equal(smart.eps, geo.eps)

    def test_frozen_components_stay_frozen_while_zero(self):
        state = EpsilonState(np.ones(3), 0.9, EpsStrategy.SMART_REWEIGHTING)
        x = np.array([0.0, 1.0, 0.0])
        for _ in range(10):
            state = update_epsilon_smart(state, x)
        assert state.eps[0] == 1.0 and state.eps[2] == 1.0
        assert state.eps[1] == pytest.approx(0.9**10, rel=1e-12)
