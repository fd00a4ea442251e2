import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lelulab.activations import (
    PARAMETRIC_KINDS,
    ActivationKind,
    ActivationSpec,
    derivative,
    evaluate,
    flexibility_score,
    param_derivative,
)

ALL_KINDS = list(ActivationKind)


def spec_of(kind, param=0.0, trainable=False):
    return ActivationSpec(kind=kind, param=param, trainable=trainable)


def reasonable_param(kind):
    return 0.3 if kind in PARAMETRIC_KINDS else 0.0


class TestEvaluate:
    def test_lu_is_identity(self):
        x = np.array([-3.0, 0.0, 2.5])
        assert np.array_equal(evaluate(spec_of(ActivationKind.LU), x), x)

    def test_relu_clamps_negatives(self):
        x = np.array([-1.0, 0.0, 2.0])
        assert np.array_equal(evaluate(spec_of(ActivationKind.RELU), x), [0.0, 0.0, 2.0])

    def test_leaky_relu_negative_slope(self):
        s = spec_of(ActivationKind.LEAKY_RELU, param=0.2)
        assert float(evaluate(s, -3.0)) == pytest.approx(-0.6, abs=1e-15)
        assert float(evaluate(s, 4.0)) == 4.0

    def test_elu_negative_branch(self):
        # e^-1 - 1, scalar reference
        assert float(evaluate(spec_of(ActivationKind.ELU), -1.0)) == pytest.approx(
            math.exp(-1.0) - 1.0, abs=1e-15
        )

    def test_tanh(self):
        assert float(evaluate(spec_of(ActivationKind.TANH), 0.7)) == pytest.approx(
            math.tanh(0.7), abs=1e-15
        )

    def test_silu_scalar_reference(self):
        # x * logistic(x) at x=1
        expected = 1.0 / (1.0 + math.exp(-1.0))
        assert float(evaluate(spec_of(ActivationKind.SILU), 1.0)) == pytest.approx(expected, abs=1e-15)

    def test_softplus_at_zero_is_log2(self):
        assert float(evaluate(spec_of(ActivationKind.SOFTPLUS), 0.0)) == pytest.approx(
            math.log(2.0), abs=1e-15
        )

    def test_softplus_no_overflow(self):
        big = evaluate(spec_of(ActivationKind.SOFTPLUS), np.array([800.0, -800.0]))
        assert big[0] == pytest.approx(800.0, abs=1e-12)
        assert big[1] == 0.0

    def test_lelu_negative_branch_oracle(self):
        # beta=0.5, x=-2: exp((1-b)x) - 1 + b x = e^-1 - 2, scalar reference
        got = float(evaluate(spec_of(ActivationKind.LELU, param=0.5), -2.0))
        assert got == pytest.approx(math.exp(-1.0) - 2.0, abs=1e-15)
        assert got == pytest.approx(-1.6321205588285577, abs=1e-15)

    def test_lelu_positive_branch_is_identity(self):
        s = spec_of(ActivationKind.LELU, param=0.3)
        x = np.array([0.5, 1.0, 7.0])
        assert np.array_equal(evaluate(s, x), x)

    def test_lelu_beta_zero_matches_elu(self):
        x = np.linspace(-5.0, 5.0, 101)
        lelu0 = evaluate(spec_of(ActivationKind.LELU, param=0.0), x)
        elu = evaluate(spec_of(ActivationKind.ELU), x)
        np.testing.assert_allclose(lelu0, elu, atol=1e-15)

    def test_scalar_input_gives_scalar_shape(self):
        out = evaluate(spec_of(ActivationKind.RELU), 1.5)
        assert np.shape(out) == ()


class TestDerivative:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_matches_central_difference(self, kind):
        s = spec_of(kind, param=reasonable_param(kind))
        # stay away from the relu/leaky_relu kink
        x = np.array([-3.1, -1.7, -0.4, 0.6, 1.3, 4.2])
        h = 1e-6
        fd = (evaluate(s, x + h) - evaluate(s, x - h)) / (2.0 * h)
        np.testing.assert_allclose(derivative(s, x), fd, rtol=1e-6, atol=1e-9)

    def test_relu_right_continuous_at_zero(self):
        assert float(derivative(spec_of(ActivationKind.RELU), 0.0)) == 1.0
        assert float(derivative(spec_of(ActivationKind.LEAKY_RELU, param=0.2), 0.0)) == 1.0

    def test_lelu_negative_slope_oracle(self):
        # (1-b) e^{(1-b)x} + b at b=0.3, x=-1, scalar reference
        expected = 0.7 * math.exp(-0.7) + 0.3
        got = float(derivative(spec_of(ActivationKind.LELU, param=0.3), -1.0))
        assert got == pytest.approx(expected, abs=1e-15)

    def test_lelu_limits(self):
        s = spec_of(ActivationKind.LELU, param=0.25)
        assert float(derivative(s, -745.0)) == pytest.approx(0.25, abs=1e-12)
        assert float(derivative(s, 100.0)) == 1.0

    def test_silu_derivative_identity(self):
        # silu'(x) + silu'(-x) = 1 for all x
        s = spec_of(ActivationKind.SILU)
        x = np.linspace(-20.0, 20.0, 401)
        np.testing.assert_allclose(derivative(s, x) + derivative(s, -x), 1.0, atol=1e-12)


class TestLeluSmoothness:
    def test_value_continuity_at_zero(self):
        for beta in (0.0, 0.2, 0.5, 0.9):
            s = spec_of(ActivationKind.LELU, param=beta)
            assert float(evaluate(s, 0.0)) == 0.0
            assert float(evaluate(s, -1e-300)) == pytest.approx(0.0, abs=1e-299)

    def test_derivative_continuity_at_zero(self):
        for beta in (0.0, 0.2, 0.5, 0.9):
            s = spec_of(ActivationKind.LELU, param=beta)
            assert float(derivative(s, 0.0)) == 1.0
            # left limit: (1-b) e^0 + b = 1 exactly
            assert float(derivative(s, -1e-300)) == 1.0

    @given(
        beta=st.floats(min_value=0.0, max_value=0.99, exclude_max=False),
        x=st.floats(min_value=-50.0, max_value=50.0),
    )
    @settings(max_examples=200)
    def test_derivative_bounded(self, beta, x):
        s = spec_of(ActivationKind.LELU, param=beta)
        d = float(derivative(s, x))
        assert beta - 1e-12 <= d <= 1.0 + 1e-12

    @given(
        beta=st.floats(min_value=0.0, max_value=0.99),
        x=st.floats(min_value=-50.0, max_value=50.0),
        y=st.floats(min_value=-50.0, max_value=50.0),
    )
    @settings(max_examples=200)
    def test_monotone_increasing(self, beta, x, y):
        s = spec_of(ActivationKind.LELU, param=beta)
        lo, hi = min(x, y), max(x, y)
        assert float(evaluate(s, lo)) <= float(evaluate(s, hi)) + 1e-12


class TestParamDerivative:
    def test_lelu_oracle(self):
        # d/db [exp((1-b)x) - 1 + b x] = x (1 - exp((1-b)x)); b=0.3, x=-1
        expected = -1.0 * (1.0 - math.exp(-0.7))
        got = float(param_derivative(spec_of(ActivationKind.LELU, param=0.3), -1.0))
        assert got == pytest.approx(expected, abs=1e-15)
        assert got == pytest.approx(-0.5034146962085905, abs=1e-15)

    def test_zero_on_positive_side(self):
        s = spec_of(ActivationKind.LELU, param=0.3)
        assert np.array_equal(param_derivative(s, np.array([0.0, 1.0, 9.0])), [0.0, 0.0, 0.0])

    def test_leaky_relu_param_derivative(self):
        s = spec_of(ActivationKind.LEAKY_RELU, param=0.2)
        assert np.array_equal(param_derivative(s, np.array([-2.0, 3.0])), [-2.0, 0.0])

    def test_matches_central_difference_in_beta(self):
        x = np.array([-4.0, -1.0, -0.1])
        h = 1e-6
        up = evaluate(spec_of(ActivationKind.LELU, param=0.4 + h), x)
        dn = evaluate(spec_of(ActivationKind.LELU, param=0.4 - h), x)
        fd = (up - dn) / (2.0 * h)
        np.testing.assert_allclose(
            param_derivative(spec_of(ActivationKind.LELU, param=0.4), x), fd, rtol=1e-6
        )

    def test_rejects_non_parametric_kind(self):
        with pytest.raises(ValueError):
            param_derivative(spec_of(ActivationKind.RELU), 1.0)


class TestFlexibility:
    @pytest.mark.parametrize(
        "kind,param,eta",
        [
            (ActivationKind.LU, 0.0, 0.0),
            (ActivationKind.TANH, 0.0, 1.0),
            (ActivationKind.RELU, 0.0, 1.0),
            (ActivationKind.ELU, 0.0, 1.0),
            (ActivationKind.SOFTPLUS, 0.0, 1.0),
            (ActivationKind.LEAKY_RELU, 0.2, 0.8),
            (ActivationKind.LEAKY_RELU, 0.4, 0.6),
            (ActivationKind.LELU, 0.2, 0.8),
            (ActivationKind.LELU, 0.3, 0.7),
            (ActivationKind.LELU, 0.4, 0.6),
            (ActivationKind.LELU, 0.6, 0.4),
        ],
    )
    def test_closed_form_scores(self, kind, param, eta):
        score = flexibility_score(spec_of(kind, param=param))
        assert score.eta == pytest.approx(eta, abs=1e-15)

    def test_silu_numeric_scan(self):
        score = flexibility_score(spec_of(ActivationKind.SILU))
        assert score.eta == pytest.approx(1.1, abs=0.01)
        assert score.min_slope == pytest.approx(-0.0998, abs=1e-3)
        assert score.max_slope == pytest.approx(1.0998, abs=1e-3)

    def test_score_consistent_with_definition(self):
        score = flexibility_score(spec_of(ActivationKind.LELU, param=0.35))
        assert score.eta == pytest.approx(1.0 - score.min_slope / score.max_slope, abs=1e-15)


class TestSpecValidation:
    def test_param_range_enforced(self):
        with pytest.raises(ValueError):
            spec_of(ActivationKind.LELU, param=1.0)
        with pytest.raises(ValueError):
            spec_of(ActivationKind.LEAKY_RELU, param=-0.1)

    def test_trainable_only_for_parametric(self):
        with pytest.raises(ValueError):
            spec_of(ActivationKind.TANH, trainable=True)
        spec_of(ActivationKind.LELU, param=0.3, trainable=True)

    def test_serialization_names(self):
        names = {k.value for k in ActivationKind}
        assert names == {"lu", "tanh", "relu", "leaky_relu", "elu", "silu", "softplus", "lelu"}
