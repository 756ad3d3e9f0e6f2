"""Wiring, dependency ordering, and recursive multi-day forecasting.

The rollout arithmetic oracles use one-rule models, whose output is exactly
the affine consequent, so every expected trajectory can be written down in
closed form.
"""

import numpy as np
import pytest

from fuzzycast.anfis import AnfisModel, GaussianMf, Rule
from fuzzycast.data import TimeSeries
from fuzzycast.errors import (
    CyclicWiringError,
    DimensionMismatchError,
    InsufficientTestSpanError,
    LengthMismatchError,
    UnknownSignalError,
)
from fuzzycast.pipeline import (
    InputRef,
    PipelineSpec,
    SubsystemSpec,
    build_pipeline,
    evaluate_rollout,
    parse_input_ref,
    rollout,
)

from conftest import day_range


def affine_model(coeffs, intercept, n_inputs):
    """One rule spanning everything: output = coeffs . x + intercept exactly."""
    pools = tuple((GaussianMf(0.0, 1e6),) for _ in range(n_inputs))
    consequent = np.array([*coeffs, intercept], dtype=np.float64)
    return AnfisModel(
        tuple(f"in{i}" for i in range(n_inputs)),
        pools,
        (Rule((0,) * n_inputs, consequent),),
    )


class TestInputRef:
    def test_current_forms(self):
        assert parse_input_ref("btc") == InputRef("btc", False)
        assert parse_input_ref("btc@k") == InputRef("btc", False)
        assert parse_input_ref(" btc@k ") == InputRef("btc", False)

    def test_predicted_forms(self):
        assert parse_input_ref("predicted(btc)@k+1") == InputRef("btc", True)
        assert parse_input_ref("predicted(btc)") == InputRef("btc", True)

    def test_rejects_garbage(self):
        for bad in ("btc@k+2", "predicted()@k+1", "a(b)", "@k"):
            with pytest.raises(ValueError):
                parse_input_ref(bad)

    def test_render_round_trips(self):
        for text in ("btc@k", "predicted(btc)@k+1"):
            assert parse_input_ref(text).render() == text


class TestBuildPipeline:
    def test_missing_model(self):
        spec = PipelineSpec((SubsystemSpec("a", ("a@k",)),))
        with pytest.raises(UnknownSignalError):
            build_pipeline(spec, {})

    def test_arity_mismatch(self):
        spec = PipelineSpec((SubsystemSpec("a", ("a@k",)),))
        with pytest.raises(DimensionMismatchError):
            build_pipeline(spec, {"a": affine_model([1.0, 1.0], 0.0, 2)})

    def test_predicted_ref_must_name_subsystem(self):
        spec = PipelineSpec((SubsystemSpec("a", ("predicted(b)@k+1",)),))
        with pytest.raises(UnknownSignalError):
            build_pipeline(spec, {"a": affine_model([1.0], 0.0, 1)})

    def test_cycle_detected(self):
        spec = PipelineSpec(
            (
                SubsystemSpec("a", ("predicted(b)@k+1",)),
                SubsystemSpec("b", ("predicted(a)@k+1",)),
            )
        )
        models = {
            "a": affine_model([1.0], 0.0, 1),
            "b": affine_model([1.0], 0.0, 1),
        }
        with pytest.raises(CyclicWiringError) as exc:
            build_pipeline(spec, models)
        assert "a" in str(exc.value) and "b" in str(exc.value)

    def test_dependency_order(self):
        # b consumes a's same-cycle prediction, so a must evaluate first
        spec = PipelineSpec(
            (
                SubsystemSpec("b", ("b@k", "predicted(a)@k+1")),
                SubsystemSpec("a", ("a@k",)),
            )
        )
        models = {
            "a": affine_model([1.0], 0.0, 1),
            "b": affine_model([1.0, 1.0], 0.0, 2),
        }
        pipe = build_pipeline(spec, models)
        names_in_order = [spec.subsystems[i].name for i in pipe.order]
        assert names_in_order == ["a", "b"]


class TestRollout:
    def test_identity_model_holds_state(self):
        # y = x: every cycle repeats the anchor value
        spec = PipelineSpec((SubsystemSpec("s", ("s@k",)),), horizon=4)
        pipe = build_pipeline(spec, {"s": affine_model([1.0], 0.0, 1)})
        res = rollout(pipe, {"s": 3.25})
        np.testing.assert_array_equal(res.predictions[:, 0], [3.25] * 4)

    def test_affine_recursion_exact(self):
        # y = 2x + 1 from 1: cycle values 3, 7, 15 (2^k terms)
        spec = PipelineSpec((SubsystemSpec("s", ("s@k",)),), horizon=3)
        pipe = build_pipeline(spec, {"s": affine_model([2.0], 1.0, 1)})
        res = rollout(pipe, {"s": 1.0})
        np.testing.assert_allclose(res.predictions[:, 0], [3.0, 7.0, 15.0], atol=1e-12)

    def test_half_sum_pair_closed_form(self):
        # a' = (a+b)/2, b' = (a'+b)/2 with same-cycle a': anchors 51, 27.5
        spec = PipelineSpec(
            (
                SubsystemSpec("a", ("a@k", "b@k")),
                SubsystemSpec("b", ("predicted(a)@k+1", "b@k")),
            ),
            horizon=1,
        )
        models = {
            "a": affine_model([0.5, 0.5], 0.0, 2),
            "b": affine_model([0.5, 0.5], 0.0, 2),
        }
        pipe = build_pipeline(spec, models)
        res = rollout(pipe, {"a": 51.0, "b": 27.5})
        a1 = 0.5 * (51.0 + 27.5)
        b1 = 0.5 * (a1 + 27.5)
        np.testing.assert_allclose(res.predictions[0], [a1, b1], atol=1e-12)

    def test_two_cycle_coupled_exact(self):
        # start (2, 4); a doubles b, b adds a's fresh prediction to itself
        spec = PipelineSpec(
            (
                SubsystemSpec("a", ("b@k",)),
                SubsystemSpec("b", ("predicted(a)@k+1", "b@k")),
            ),
            horizon=2,
        )
        models = {
            "a": affine_model([2.0], 0.0, 1),
            "b": affine_model([1.0, 1.0], 0.0, 2),
        }
        pipe = build_pipeline(spec, models)
        res = rollout(pipe, {"a": 2.0, "b": 4.0})
        # cycle 1: a1 = 2*4 = 8, b1 = 8 + 4 = 12
        # cycle 2: a2 = 2*12 = 24, b2 = 24 + 12 = 36
        np.testing.assert_allclose(res.predictions, [[8.0, 12.0], [24.0, 36.0]], atol=1e-12)

    def test_missing_initial_signal(self):
        spec = PipelineSpec((SubsystemSpec("s", ("s@k",)),))
        pipe = build_pipeline(spec, {"s": affine_model([1.0], 0.0, 1)})
        with pytest.raises(UnknownSignalError):
            rollout(pipe, {})

    def test_unpredicted_current_input_stays_frozen(self):
        # v has no subsystem, so its value stays at the anchor through every cycle
        spec = PipelineSpec(
            (SubsystemSpec("s", ("s@k", "v@k")),), horizon=3
        )
        pipe = build_pipeline(spec, {"s": affine_model([1.0, 1.0], 0.0, 2)})
        res = rollout(pipe, {"s": 0.0, "v": 5.0})
        # s accumulates the frozen v: 5, 10, 15
        np.testing.assert_allclose(res.predictions[:, 0], [5.0, 10.0, 15.0], atol=1e-12)

    def test_errors_attached_when_actuals_given(self):
        spec = PipelineSpec((SubsystemSpec("s", ("s@k",)),), horizon=2)
        pipe = build_pipeline(spec, {"s": affine_model([1.0], 0.0, 1)})
        res = rollout(pipe, {"s": 10.0}, actuals={"s": [11.0, 12.0]})
        np.testing.assert_allclose(res.abs_errors[:, 0], [1.0, 2.0])
        np.testing.assert_allclose(res.rel_errors[:, 0], [0.1, 0.2])

    def test_csv_layout(self):
        spec = PipelineSpec((SubsystemSpec("s", ("s@k",)),), horizon=1)
        pipe = build_pipeline(spec, {"s": affine_model([1.0], 0.0, 1)})
        res = rollout(pipe, {"s": 1.5})
        lines = res.to_csv_text().strip().split("\n")
        assert lines[0] == "cycle,subsystem,predicted,actual,abs_error,rel_error"
        assert lines[1].startswith("1,s,1.5,")


class TestEvaluateRollout:
    def _identity_pipe(self, horizon):
        spec = PipelineSpec((SubsystemSpec("s", ("s@k",)),), horizon=horizon)
        return build_pipeline(spec, {"s": affine_model([1.0], 0.0, 1)})

    def test_every_anchor_used(self):
        pipe = self._identity_pipe(2)
        series = {"s": TimeSeries("s", day_range(10), np.arange(1.0, 11.0))}
        agg = evaluate_rollout(pipe, series)
        assert agg.n_anchors == 8

    def test_identity_on_linear_ramp_exact_error(self):
        # predicting "no change" on the ramp 1..N: step-s error is exactly s
        pipe = self._identity_pipe(3)
        series = {"s": TimeSeries("s", day_range(10), np.arange(1.0, 11.0))}
        agg = evaluate_rollout(pipe, series)
        np.testing.assert_allclose(agg.rmse[:, 0], [1.0, 2.0, 3.0], atol=1e-12)

    def test_needs_horizon_plus_one_days(self):
        pipe = self._identity_pipe(5)
        series = {"s": TimeSeries("s", day_range(5), np.arange(5.0) + 1)}
        with pytest.raises(InsufficientTestSpanError):
            evaluate_rollout(pipe, series)

    def test_single_calendar_required(self):
        spec = PipelineSpec(
            (SubsystemSpec("a", ("a@k", "b@k")), SubsystemSpec("b", ("b@k",))),
            horizon=1,
        )
        pipe = build_pipeline(
            spec,
            {"a": affine_model([1.0, 0.0], 0.0, 2), "b": affine_model([1.0], 0.0, 1)},
        )
        series = {
            "a": TimeSeries("a", day_range(5), np.arange(5.0) + 1),
            "b": TimeSeries("b", day_range(6), np.arange(6.0) + 1),
        }
        with pytest.raises(LengthMismatchError):
            evaluate_rollout(pipe, series)

    def test_missing_series(self):
        pipe = self._identity_pipe(1)
        with pytest.raises(UnknownSignalError):
            evaluate_rollout(pipe, {})
