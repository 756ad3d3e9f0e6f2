"""Feed-forward baseline: scaling, Jacobian, damped least-squares fitting."""

import math

import numpy as np
import pytest

from fuzzycast.errors import DimensionMismatchError
from fuzzycast.mlp import (
    LmConfig,
    MlpModel,
    damped_step,
    finite_diff_check_mlp,
    init_mlp,
    mlp_forward,
    mlp_forward_batch,
    mlp_jacobian,
    pack_mlp,
    train_lm,
    unpack_mlp,
)


def tiny_net():
    """One input, one hidden unit, identity scaling: y = 2 tanh(3x + 1) - 0.5."""
    return MlpModel(
        hidden_weights=np.array([[3.0]]),
        hidden_bias=np.array([1.0]),
        output_weights=np.array([2.0]),
        output_bias=-0.5,
        input_min=np.array([-1.0]),
        input_max=np.array([1.0]),
    )


class TestForward:
    def test_hand_value(self):
        net = tiny_net()
        x = 0.25
        expected = 2.0 * math.tanh(3.0 * x + 1.0) - 0.5
        assert mlp_forward(net, np.array([x])) == pytest.approx(expected, rel=1e-15)

    def test_scaling_maps_range_to_unit_interval(self):
        net = init_mlp(1, hidden=2, seed=0)
        from dataclasses import replace

        net = replace(net, input_min=np.array([10.0]), input_max=np.array([30.0]))
        from fuzzycast.mlp import _scale

        Z = _scale(net, np.array([[10.0], [20.0], [30.0]]))
        np.testing.assert_allclose(Z[:, 0], [-1.0, 0.0, 1.0])

    def test_constant_column_scales_to_zero(self):
        net = init_mlp(1, hidden=2, seed=0)
        from dataclasses import replace
        from fuzzycast.mlp import _scale

        net = replace(net, input_min=np.array([5.0]), input_max=np.array([5.0]))
        Z = _scale(net, np.array([[5.0], [5.0]]))
        np.testing.assert_array_equal(Z, 0.0)

    def test_wrong_arity(self):
        net = init_mlp(2, hidden=2, seed=0)
        with pytest.raises(DimensionMismatchError):
            mlp_forward(net, np.array([1.0]))

    def test_init_deterministic(self):
        a = init_mlp(3, hidden=5, seed=9)
        b = init_mlp(3, hidden=5, seed=9)
        np.testing.assert_array_equal(pack_mlp(a), pack_mlp(b))

    def test_init_bounded(self):
        net = init_mlp(4, hidden=10, seed=1)
        theta = pack_mlp(net)
        assert np.all(np.abs(theta) <= 0.5)


class TestJacobian:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            d = int(rng.integers(1, 4))
            net = init_mlp(d, hidden=int(rng.integers(2, 8)), seed=int(rng.integers(1000)))
            X = rng.uniform(-1, 1, (12, d))
            t = rng.uniform(-1, 1, 12)
            assert finite_diff_check_mlp(net, (X, t)) < 1e-6

    def test_output_weight_column_is_activation(self):
        net = tiny_net()
        X = np.array([[0.3]])
        J = mlp_jacobian(net, X)
        z = math.tanh(3.0 * 0.3 + 1.0)
        # layout: hidden weight, hidden bias, output weight, output bias
        assert J[0, 2] == pytest.approx(z, rel=1e-15)
        assert J[0, 3] == 1.0

    def test_pack_unpack_roundtrip(self):
        net = init_mlp(3, hidden=4, seed=5)
        theta = pack_mlp(net)
        np.testing.assert_array_equal(pack_mlp(unpack_mlp(net, theta)), theta)


class TestDampedStep:
    def test_solves_augmented_system(self):
        rng = np.random.default_rng(3)
        J = rng.uniform(-1, 1, (20, 4))
        r = rng.uniform(-1, 1, 20)
        lam = 0.7
        delta = damped_step(J, r, lam)
        lhs = (J.T @ J + lam * np.eye(4)) @ delta
        np.testing.assert_allclose(lhs, -J.T @ r, atol=1e-12)

    def test_step_vanishes_as_damping_grows(self):
        rng = np.random.default_rng(4)
        J = rng.uniform(-1, 1, (20, 4))
        r = rng.uniform(-1, 1, 20)
        norms = [np.linalg.norm(damped_step(J, r, lam)) for lam in (1e-2, 1.0, 1e2, 1e6)]
        assert all(a > b for a, b in zip(norms, norms[1:]))
        assert norms[-1] < 1e-5


class TestTrainLm:
    def test_fits_parabola(self):
        X = np.linspace(-1, 1, 50)[:, None]
        t = X[:, 0] ** 2
        net = init_mlp(1, hidden=10, seed=0)
        fitted, rep = train_lm(net, (X, t), LmConfig(max_iter=200))
        rmse = float(np.sqrt(np.mean((mlp_forward_batch(fitted, X) - t) ** 2)))
        assert rmse < 0.01
        assert rep.epochs_run <= 200

    def test_accepted_trace_strictly_decreasing(self):
        X = np.linspace(-1, 1, 50)[:, None]
        t = X[:, 0] ** 2
        net = init_mlp(1, hidden=10, seed=0)
        _, rep = train_lm(net, (X, t), LmConfig(max_iter=100))
        # rejected iterations repeat the previous error; accepted ones drop it
        uniq = []
        for e in rep.epoch_rmse:
            if not uniq or e != uniq[-1]:
                uniq.append(e)
        assert all(a > b for a, b in zip(uniq, uniq[1:]))

    def test_scaling_set_from_training_data(self):
        X = np.linspace(5, 9, 30)[:, None]
        t = np.sin(X[:, 0])
        fitted, _ = train_lm(init_mlp(1, seed=0), (X, t), LmConfig(max_iter=5))
        assert fitted.input_min[0] == 5.0
        assert fitted.input_max[0] == 9.0

    def test_converged_stop_reason(self):
        # an affine target is solved essentially exactly, triggering the
        # small-improvement stop well before max_iter
        X = np.linspace(-1, 1, 40)[:, None]
        t = 0.3 * X[:, 0] + 0.1
        _, rep = train_lm(init_mlp(1, hidden=4, seed=1), (X, t), LmConfig(max_iter=200))
        assert rep.stop_reason in ("error_goal_met", "epochs_exhausted")
        assert rep.epoch_rmse[-1] < 1e-5

    def test_determinism(self):
        X = np.linspace(-1, 1, 30)[:, None]
        t = X[:, 0] ** 3
        a, _ = train_lm(init_mlp(1, seed=7), (X, t), LmConfig(max_iter=40))
        b, _ = train_lm(init_mlp(1, seed=7), (X, t), LmConfig(max_iter=40))
        np.testing.assert_array_equal(pack_mlp(a), pack_mlp(b))

    def test_metadata_stamped(self):
        X = np.linspace(-1, 1, 20)[:, None]
        t = X[:, 0]
        fitted, rep = train_lm(init_mlp(1, seed=0), (X, t), LmConfig(max_iter=10))
        info = fitted.metadata["training"]
        assert info["method"] == "lm"
        assert info["iterations"] == rep.epochs_run
