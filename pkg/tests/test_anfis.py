"""Forward-pass semantics: memberships, firing, normalization, rule mixing.

The frozen numbers in TestHandChecked were computed by hand (or with a
pocket-calculator level derivation) before the implementation existed.
"""

import math

import numpy as np
import pytest

from fuzzycast.anfis import (
    AnfisModel,
    GaussianMf,
    Rule,
    fire_rules,
    forward,
    forward_batch,
    hard_assignments,
    mf_eval,
    normalize,
    rule_output,
    sigma_floors,
)
from fuzzycast.errors import DimensionMismatchError, ZeroFiringError


def scatter_model(rng, d, n_rules):
    """Random model in the one-membership-per-rule-per-input layout."""
    pools = tuple(
        tuple(
            GaussianMf(float(c), float(s))
            for c, s in zip(rng.uniform(-2, 2, n_rules), rng.uniform(0.3, 1.5, n_rules))
        )
        for _ in range(d)
    )
    rules = tuple(Rule((i,) * d, rng.uniform(-2, 2, d + 1)) for i in range(n_rules))
    return AnfisModel(tuple(f"x{j}" for j in range(d)), pools, rules)


class TestHandChecked:
    def test_membership_one_sigma_from_center(self):
        # exp(-1/2) at one standard deviation
        mf = GaussianMf(3.0, 2.0)
        assert mf_eval(mf, 5.0) == pytest.approx(0.6065306597126334, abs=1e-15)

    def test_membership_peak_is_one(self):
        assert mf_eval(GaussianMf(-7.3, 0.4), -7.3) == 1.0

    def test_product_firing(self):
        # memberships 0.5 and 0.4 -> firing 0.2
        s1 = 1.0 / math.sqrt(2.0 * math.log(2.0))   # mu(1)=0.5 around 0
        s2 = 1.0 / math.sqrt(2.0 * math.log(2.5))   # mu(1)=0.4 around 0
        model = AnfisModel(
            ("a", "b"),
            ((GaussianMf(0.0, s1),), (GaussianMf(0.0, s2),)),
            (Rule((0, 0), np.zeros(3)),),
        )
        w = fire_rules(model, np.array([1.0, 1.0]))
        assert w[0] == pytest.approx(0.2, abs=1e-15)

    def test_normalization(self):
        out = normalize(np.array([1.0, 3.0]))
        np.testing.assert_allclose(out, [0.25, 0.75], atol=1e-16)

    def test_affine_rule_output(self):
        # [1, 2, 3] on x = (4, 5): 1*4 + 2*5 + 3 = 17
        r = Rule((0, 0), np.array([1.0, 2.0, 3.0]))
        assert rule_output(r, np.array([4.0, 5.0])) == 17.0

    def test_two_rule_mix(self):
        model = AnfisModel(
            ("a", "b"),
            (
                (GaussianMf(0.0, 1.0), GaussianMf(1.0, 1.0)),
                (GaussianMf(0.0, 1.0), GaussianMf(1.0, 1.0)),
            ),
            (
                Rule((0, 0), np.array([1.0, 0.0, 0.0])),
                Rule((1, 1), np.array([0.0, 1.0, 0.0])),
            ),
        )
        x = np.array([0.3, 0.7])
        w1 = math.exp(-0.045) * math.exp(-0.245)
        w2 = math.exp(-0.245) * math.exp(-0.045)
        expected = (w1 * 0.3 + w2 * 0.7) / (w1 + w2)
        y, trace = forward(model, x)
        assert y == pytest.approx(expected, rel=1e-15)
        np.testing.assert_allclose(trace.firing, [w1, w2], rtol=1e-15)


class TestStructuralValidation:
    def test_antecedent_index_out_of_range(self):
        with pytest.raises(DimensionMismatchError):
            AnfisModel(
                ("x",), ((GaussianMf(0.0, 1.0),),), (Rule((1,), np.zeros(2)),)
            )

    def test_consequent_length_enforced(self):
        with pytest.raises(DimensionMismatchError):
            AnfisModel(
                ("x",), ((GaussianMf(0.0, 1.0),),), (Rule((0,), np.zeros(3)),)
            )

    def test_sigma_must_be_positive(self):
        with pytest.raises(ValueError):
            GaussianMf(0.0, 0.0)
        with pytest.raises(ValueError):
            GaussianMf(0.0, -1.0)

    def test_input_arity_checked(self):
        model = scatter_model(np.random.default_rng(0), 2, 3)
        with pytest.raises(DimensionMismatchError):
            forward(model, np.array([1.0]))


class TestLayerInvariants:
    """Seeded sweep over random models and inputs."""

    def test_normalized_weights_partition_unity(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            d = int(rng.integers(1, 4))
            model = scatter_model(rng, d, int(rng.integers(2, 9)))
            x = rng.uniform(-3, 3, d)
            w = fire_rules(model, x)
            assert np.all(w >= 0)
            wn = normalize(w)
            assert abs(wn.sum() - 1.0) < 1e-12

    def test_output_bounded_by_rule_outputs(self):
        # a convex mix can never leave the hull of its rule outputs
        rng = np.random.default_rng(12)
        for _ in range(300):
            d = int(rng.integers(1, 4))
            model = scatter_model(rng, d, int(rng.integers(1, 9)))
            x = rng.uniform(-3, 3, d)
            y, trace = forward(model, x)
            f = trace.rule_outputs
            assert f.min() - 1e-9 <= y <= f.max() + 1e-9

    def test_single_rule_collapses_exactly(self):
        # with one rule the normalized weight is exactly 1.0 in floats
        rng = np.random.default_rng(13)
        for _ in range(100):
            d = int(rng.integers(1, 4))
            model = scatter_model(rng, d, 1)
            x = rng.uniform(-3, 3, d)
            y, _ = forward(model, x)
            assert y == rule_output(model.rules[0], x)

    def test_batch_matches_loop(self):
        rng = np.random.default_rng(14)
        model = scatter_model(rng, 3, 5)
        X = rng.uniform(-2, 2, (40, 3))
        batch = forward_batch(model, X)
        single = np.array([forward(model, row)[0] for row in X])
        np.testing.assert_allclose(batch, single, rtol=1e-14)

    def test_far_input_raises_zero_firing(self):
        model = scatter_model(np.random.default_rng(15), 1, 2)
        with pytest.raises(ZeroFiringError):
            forward(model, np.array([1e6]))

    def test_batch_reports_offending_row(self):
        model = scatter_model(np.random.default_rng(16), 1, 2)
        X = np.array([[0.0], [1e6]])
        with pytest.raises(ZeroFiringError) as exc:
            forward_batch(model, X)
        assert "row 1" in str(exc.value)


class TestHelpers:
    def test_hard_assignments_pick_strongest_rule(self):
        model = AnfisModel(
            ("x",),
            ((GaussianMf(0.0, 1.0), GaussianMf(10.0, 1.0)),),
            (Rule((0,), np.zeros(2)), Rule((1,), np.zeros(2))),
        )
        labels = hard_assignments(model, np.array([[0.1], [9.9]]))
        np.testing.assert_array_equal(labels, [0, 1])

    def test_sigma_floor_scales_with_range(self):
        floors = sigma_floors(np.array([100.0, 0.0]))
        assert floors[0] == pytest.approx(1e-7)
        assert floors[1] == 1e-12

    def test_empty_batch(self):
        model = scatter_model(np.random.default_rng(17), 2, 2)
        out = forward_batch(model, np.empty((0, 2)))
        assert out.shape == (0,)
