"""Synthetic generators and the closed-form / quadrature oracles.

The frozen reference numbers in this file were computed independently
before the estimators were written: normal quantile and density values
from the standard normal distribution, spectral reference values by
adaptive quadrature of the weighted quantile integrand, and the uniform
quantile case from its closed-form antiderivative.
"""

import math

import numpy as np
import pytest

from riskboot import (
    Normal,
    SkewedMix,
    StudentT,
    SyntheticSpec,
    generate,
    normal_es_oracle,
    normal_quantile,
    normal_var_oracle,
    srm_quadrature_oracle,
    summary_stats,
)

# adaptive-quadrature references for the standard normal loss quantile
SRM_NORMAL_REF = {
    5.0: 1.0815686725276046,
    20.0: 1.8537326703658912,
    80.0: 2.4241694481793,
}


class TestGenerate:
    def test_deterministic_in_seed(self):
        spec = SyntheticSpec(family=Normal(0.0, 0.01), n=1000, seed=42)
        a, b = generate(spec), generate(spec)
        assert np.array_equal(a.returns, b.returns)
        assert a.dates == b.dates

    def test_different_seeds_differ(self):
        a = generate(SyntheticSpec(family=Normal(), n=100, seed=1))
        b = generate(SyntheticSpec(family=Normal(), n=100, seed=2))
        assert not np.array_equal(a.returns, b.returns)

    def test_row_count_and_consecutive_dates(self):
        series = generate(SyntheticSpec(family=Normal(0.0, 0.01), n=3392, seed=0))
        assert series.n == 3392
        gaps = {(b - a).days for a, b in zip(series.dates, series.dates[1:])}
        assert gaps == {1}

    def test_default_labels_name_the_family(self):
        assert generate(SyntheticSpec(family=Normal(), n=5, seed=0)).label.startswith("normal(")
        assert generate(SyntheticSpec(family=StudentT(dof=4.0), n=5, seed=0)).label.startswith("t(")
        assert generate(SyntheticSpec(family=SkewedMix(), n=5, seed=0)).label.startswith("skewmix(")
        assert generate(SyntheticSpec(family=Normal(), n=5, seed=0, label="SP")).label == "SP"

    def test_normal_moments(self):
        series = generate(SyntheticSpec(family=Normal(mu=0.001, sigma=0.02), n=200_000, seed=3))
        stats = summary_stats(series)
        assert stats.mean == pytest.approx(0.001, abs=3e-4)
        assert stats.std_dev == pytest.approx(0.02, rel=0.01)

    def test_student_t_has_heavy_tails(self):
        series = generate(SyntheticSpec(family=StudentT(dof=4.0, scale=0.01), n=200_000, seed=4))
        assert summary_stats(series).kurtosis > 4.0

    def test_skewed_mix_skews_the_stated_way(self):
        left = generate(SyntheticSpec(family=SkewedMix(shift=-3.0), n=100_000, seed=5))
        right = generate(SyntheticSpec(family=SkewedMix(shift=3.0), n=100_000, seed=5))
        assert summary_stats(left).skewness < -0.3
        assert summary_stats(right).skewness > 0.3

    def test_family_validation(self):
        with pytest.raises(ValueError, match="sigma"):
            Normal(sigma=0.0)
        with pytest.raises(ValueError, match="exceed 2"):
            StudentT(dof=2.0)
        with pytest.raises(ValueError, match="scale"):
            StudentT(dof=4.0, scale=-1.0)
        with pytest.raises(ValueError, match="weight"):
            SkewedMix(weight=1.0)
        with pytest.raises(ValueError, match="n >= 1"):
            SyntheticSpec(family=Normal(), n=0, seed=0)


class TestNormalOracles:
    def test_frozen_quantiles(self):
        assert normal_var_oracle(0.99) == pytest.approx(2.3263478740408408, abs=1e-12)
        assert normal_var_oracle(0.95) == pytest.approx(1.6448536269514722, abs=1e-12)
        assert normal_var_oracle(0.5) == 0.0

    def test_frozen_tail_means(self):
        assert normal_es_oracle(0.99) == pytest.approx(2.665214220345806, abs=1e-12)
        assert normal_es_oracle(0.95) == pytest.approx(2.0627128075074257, abs=1e-12)
        assert normal_es_oracle(0.5) == pytest.approx(0.7978845608028654, abs=1e-12)

    def test_location_scale(self):
        assert normal_var_oracle(0.99, mu=1.0, sigma=2.0) == pytest.approx(
            1.0 + 2.0 * 2.3263478740408408, rel=1e-14)
        assert normal_es_oracle(0.99, mu=1.0, sigma=2.0) == pytest.approx(
            1.0 + 2.0 * 2.665214220345806, rel=1e-14)

    def test_tail_mean_exceeds_quantile(self):
        for alpha in (0.5, 0.9, 0.99, 0.999):
            assert normal_es_oracle(alpha) > normal_var_oracle(alpha)

    def test_quantile_fn_is_vectorized(self):
        p = np.array([0.5, 0.99])
        out = normal_quantile(p, mu=1.0, sigma=3.0)
        assert out == pytest.approx([1.0, 1.0 + 3.0 * 2.3263478740408408])

    def test_bad_arguments(self):
        for bad in (0.0, 1.0):
            with pytest.raises(ValueError):
                normal_var_oracle(bad)
            with pytest.raises(ValueError):
                normal_es_oracle(bad)
        with pytest.raises(ValueError, match="sigma"):
            normal_var_oracle(0.9, sigma=0.0)


class TestQuadratureOracle:
    def test_constant_quantile_returns_the_constant(self):
        value = srm_quadrature_oracle(lambda p: np.full_like(p, 3.25), 12.0)
        assert value == pytest.approx(3.25, abs=1e-9)

    def test_uniform_quantile_closed_form(self):
        """q(p) = p integrates to 1 - (1 - (1+k) e^-k) / (k (1 - e^-k))."""
        for k, expected in ((5.0, 0.8067836549063042), (0.5, 0.5414940825367983)):
            value = srm_quadrature_oracle(lambda p: p, k)
            assert value == pytest.approx(expected, rel=1e-9)

    def test_normal_references(self):
        for k, expected in SRM_NORMAL_REF.items():
            value = srm_quadrature_oracle(normal_quantile, k)
            assert value == pytest.approx(expected, rel=1e-8)

    def test_linear_in_the_quantile_function(self):
        base = srm_quadrature_oracle(normal_quantile, 20.0)
        shifted = srm_quadrature_oracle(lambda p: 2.0 * normal_quantile(p) + 3.0, 20.0)
        assert shifted == pytest.approx(2.0 * base + 3.0, rel=1e-10)

    def test_tiny_aversion_drifts_to_the_distribution_mean(self):
        value = srm_quadrature_oracle(normal_quantile, 1e-6)
        assert abs(value) < 1e-5  # standard normal mean is 0

    def test_panel_floor_enforced(self):
        with pytest.raises(ValueError, match="at least 100 panels"):
            srm_quadrature_oracle(normal_quantile, 5.0, panels=50)

    def test_bad_aversion_rejected(self):
        for k in (0.0, -2.0, float("nan")):
            with pytest.raises(ValueError, match="positive finite"):
                srm_quadrature_oracle(normal_quantile, k)

    def test_unstable_integrand_reports_non_convergence(self):
        calls = {"count": 0}

        def jittery(p):
            calls["count"] += 1
            return np.full_like(p, float(calls["count"]))

        with pytest.raises(ArithmeticError, match="did not settle"):
            srm_quadrature_oracle(jittery, 5.0)
