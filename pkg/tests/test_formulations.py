"""Difficulty formulations, temporal factor, and effective widths.

Derived expected values are frozen from independent evaluations:
closed-form logarithms computed directly, and normal quantiles
cross-checked against scipy's inverse CDF (which this package does not
use in its own implementation).
"""

import math

import numpy as np
import pytest
import scipy.stats as sps
from hypothesis import given, strategies as hst

from antasid.formulations import (
    CalibrationBounds,
    TemporalFactorParams,
    calibrate_generic_t,
    discrete_width_scale,
    effective_width_discrete,
    effective_width_sd,
    error_rate_for_unit_ratio,
    id_na,
    id_sa,
    id_ta,
    id_tsa,
    normal_ppf,
    temporal_factor,
    z_from_error_rate,
)
from antasid.synth import SynthSpec, generate
from antasid.trials import movement_amplitude


class TestTemporalFactor:
    def test_half_second_equilibrium(self):
        assert temporal_factor(0.5) == 1.0

    def test_one_second_is_zero(self):
        assert temporal_factor(1.0) == 0.0

    def test_two_seconds(self):
        assert temporal_factor(2.0) == -1.0

    def test_generic_constants(self):
        params = TemporalFactorParams(a=2.0, b=0.5, c=3.0)
        assert temporal_factor(0.5, params) == pytest.approx(-2.0 * math.log2(1.0) + 3.0)
        assert temporal_factor(1.5, params) == pytest.approx(-2.0 + 3.0)

    def test_nonpositive_shifted_time_is_error(self):
        with pytest.raises(ValueError):
            temporal_factor(0.5, TemporalFactorParams(a=1.0, b=-0.5))
        with pytest.raises(ValueError):
            temporal_factor(0.2, TemporalFactorParams(a=1.0, b=-0.5))

    def test_params_validation(self):
        with pytest.raises(ValueError):
            TemporalFactorParams(a=0.0)
        with pytest.raises(ValueError):
            TemporalFactorParams(a=-1.0)

    @given(hst.floats(min_value=1e-3, max_value=1e3))
    def test_reciprocal_antisymmetry(self, mt):
        assert temporal_factor(mt) + temporal_factor(1.0 / mt) == pytest.approx(
            0.0, abs=1e-9
        )


class TestIdFormulas:
    def test_na_equal_amplitude_and_width(self):
        assert id_na(32.0, 32.0) == 1.0

    def test_na_zero_amplitude(self):
        assert id_na(0.0, 10.0) == 0.0

    def test_na_96_over_32(self):
        assert id_na(96.0, 32.0) == 2.0

    def test_na_rejects_nonpositive_width(self):
        with pytest.raises(ValueError):
            id_na(10.0, 0.0)

    def test_sa_trivials(self):
        assert id_sa(5.0, 5.0) == 1.0
        assert id_sa(0.0, 3.0) == 0.0

    def test_sa_derived_value(self):
        # log2(100/4.133 + 1), evaluated independently.
        assert id_sa(100.0, 4.133) == pytest.approx(4.655094160711693, abs=1e-12)

    def test_sa_rejects_nonpositive_effective_width(self):
        with pytest.raises(ValueError):
            id_sa(10.0, 0.0)

    def test_ta_reduces_to_na_at_unit_t(self):
        assert id_ta(96.0, 32.0, 1.0) == id_na(96.0, 32.0)

    def test_ta_at_t_zero(self):
        # W**0 = 1, so this is log2(97).
        assert id_ta(96.0, 32.0, 0.0) == pytest.approx(6.599912842187128, abs=1e-12)

    def test_ta_at_t_minus_one(self):
        # log2(96*32 + 1) = log2(3073).
        assert id_ta(96.0, 32.0, -1.0) == pytest.approx(11.585432051592962, abs=1e-12)

    def test_ta_overflow_is_error(self):
        with pytest.raises(ValueError, match="overflow"):
            id_ta(96.0, 32.0, 250.0)
        with pytest.raises(ValueError, match="overflow"):
            id_ta(96.0, 32.0, -250.0)

    def test_tsa_mirrors_ta(self):
        assert id_tsa(96.0, 32.0, 1.0) == id_sa(96.0, 32.0)
        assert id_tsa(96.0, 32.0, 0.0) == pytest.approx(6.599912842187128, abs=1e-12)

    def test_tsa_unit_effective_width(self):
        # 1**t == 1 for every t.
        for t in (-3.0, 0.0, 0.7, 4.0):
            assert id_tsa(200.0, 1.0, t) == pytest.approx(math.log2(201.0), abs=1e-12)

    @given(hst.floats(min_value=0.05, max_value=10.0))
    def test_ta_increasing_in_movement_time(self, mt):
        # For W > 1, slower trials mean lower t and a higher index.
        faster = id_ta(96.0, 32.0, temporal_factor(mt))
        slower = id_ta(96.0, 32.0, temporal_factor(mt * 1.5))
        assert slower > faster

    @given(
        hst.floats(min_value=0.1, max_value=1e4),
        hst.floats(min_value=0.1, max_value=1e4),
    )
    def test_na_monotonic_in_amplitude_and_width(self, a, w):
        assert id_na(a * 1.5, w) > id_na(a, w)
        assert id_na(a, w * 1.5) < id_na(a, w)
        t = 0.7
        assert id_ta(a * 1.5, w, t) > id_ta(a, w, t)


class TestEffectiveWidthSd:
    def test_unit_sd(self):
        # Offsets engineered to a sample SD of exactly 1.
        offsets = [-1.0, 0.0, 1.0, 0.0, -1.0, 1.0]
        sd = np.std(offsets, ddof=1)
        assert effective_width_sd(np.array(offsets) / sd) == pytest.approx(4.133, abs=1e-12)

    def test_two_point_scatter(self):
        # Sample SD of {-1, 1} is sqrt(2).
        assert effective_width_sd([-1.0, 1.0]) == pytest.approx(
            5.844944653288002, abs=1e-12
        )

    def test_zero_variance_is_error(self):
        with pytest.raises(ValueError, match="degenerate|scatter"):
            effective_width_sd([5.0, 5.0, 5.0])

    def test_single_offset_is_error(self):
        with pytest.raises(ValueError):
            effective_width_sd([2.0])


class TestZScores:
    def test_reference_error_rate(self):
        # Cross-checked against the scipy inverse normal CDF.
        assert z_from_error_rate(0.03883) == pytest.approx(2.066, abs=1e-3)
        assert z_from_error_rate(0.03883) == pytest.approx(
            sps.norm.ppf(1 - 0.03883 / 2), abs=1e-12
        )

    def test_two_sigma_rate(self):
        assert z_from_error_rate(0.0455) == pytest.approx(2.000, abs=1e-3)

    def test_one_sigma_rate(self):
        assert z_from_error_rate(0.3173) == pytest.approx(1.000, abs=1e-3)

    def test_rejects_out_of_range(self):
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                z_from_error_rate(bad)

    @given(hst.floats(min_value=1e-6, max_value=1 - 1e-6))
    def test_round_trip_with_forward_tail(self, eps):
        z = z_from_error_rate(eps)
        recovered = 2.0 * sps.norm.sf(z)
        assert recovered == pytest.approx(eps, abs=1e-6)

    @given(
        hst.floats(min_value=1e-6, max_value=0.66),
        hst.floats(min_value=1.0001, max_value=1.5),
    )
    def test_strictly_decreasing(self, eps, factor):
        assert z_from_error_rate(eps * factor) < z_from_error_rate(eps)

    def test_ppf_matches_scipy_everywhere(self):
        ps = [1e-12, 1e-9, 1e-4, 0.02, 0.1, 0.5, 0.9, 0.98, 1 - 1e-4, 1 - 1e-9]
        for p in ps:
            assert normal_ppf(p) == pytest.approx(sps.norm.ppf(p), abs=1e-9)


class TestDiscreteEffectiveWidth:
    def test_unit_ratio_at_reference_rate(self):
        ratio = discrete_width_scale(0.03883)
        assert abs(ratio - 1.0) < 1e-4
        mean_w = effective_width_discrete([30.1780, 30.1780], 0.03883)
        assert mean_w == pytest.approx(30.178, abs=1e-3)

    def test_single_width_at_two_sigma(self):
        # 10 * 2.066 / z(0.0455); z cross-checked against scipy above.
        expected = 10.0 * 2.066 / sps.norm.ppf(1 - 0.0455 / 2)
        assert effective_width_discrete([10.0], 0.0455) == pytest.approx(expected, abs=1e-9)
        assert effective_width_discrete([10.0], 0.0455) == pytest.approx(10.33, abs=1e-2)

    def test_constant_widths_scale_identically(self):
        scale = discrete_width_scale(0.1)
        per_trial = scale * np.array([64.0, 64.0, 64.0])
        assert np.all(per_trial == per_trial[0])
        assert effective_width_discrete([64.0] * 3, 0.1) == pytest.approx(per_trial[0])

    def test_direction_around_unit_ratio(self):
        pivot = error_rate_for_unit_ratio()
        assert discrete_width_scale(pivot * 0.5) < 1.0  # W_e < W below the pivot
        assert discrete_width_scale(pivot * 1.5) > 1.0  # W_e > W above it

    def test_empty_widths_is_error(self):
        with pytest.raises(ValueError):
            effective_width_discrete([], 0.05)


class TestErrorRateForUnitRatio:
    def test_value(self):
        eps = error_rate_for_unit_ratio()
        assert eps == pytest.approx(0.0388, abs=2e-4)

    def test_round_trips_to_reference_z(self):
        assert z_from_error_rate(error_rate_for_unit_ratio()) == pytest.approx(
            2.066, abs=1e-9
        )

    def test_width_is_preserved(self):
        eps = error_rate_for_unit_ratio()
        assert effective_width_discrete([30.1780], eps) == pytest.approx(30.178, abs=1e-6)


def _dataset_arrays(dataset):
    amps = np.array([movement_amplitude(t) for t in dataset.trials])
    widths = np.array([t.target_width_px for t in dataset.trials])
    mts = np.array([t.movement_time_s for t in dataset.trials])
    return amps, widths, mts


def _r2_at(amps, widths, mts, a, b, c):
    t = -a * np.log2(mts + b) + c
    ids = np.log2(amps / widths**t + 1.0)
    r = np.corrcoef(ids, mts)[0, 1]
    return r * r


class TestCalibrateGenericT:
    def test_beats_default_inside_bounds(self):
        ds = generate(SynthSpec(n_trials=400, mt_noise_sd=0.05, seed=7))
        amps, widths, mts = _dataset_arrays(ds)
        bounds = CalibrationBounds(a=(0.5, 1.5), b=(0.0, 0.0), c=(-0.5, 0.5))
        params = calibrate_generic_t(amps, widths, mts, bounds)
        r2_default = _r2_at(amps, widths, mts, 1.0, 0.0, 0.0)
        r2_fit = _r2_at(amps, widths, mts, params.a, params.b, params.c)
        assert r2_fit >= r2_default - 1e-12

    def test_recovers_unit_a_against_fine_grid(self):
        # Oracle: exhaustive fine grid over a in [0.5, 1.5] with b = c = 0.
        ds = generate(SynthSpec(n_trials=800, mt_noise_sd=0.02, seed=11))
        amps, widths, mts = _dataset_arrays(ds)
        grid = np.linspace(0.5, 1.5, 401)
        r2s = [_r2_at(amps, widths, mts, a, 0.0, 0.0) for a in grid]
        oracle_a = float(grid[int(np.argmax(r2s))])
        params = calibrate_generic_t(
            amps, widths, mts, CalibrationBounds(a=(0.5, 1.5), b=(0.0, 0.0), c=(0.0, 0.0))
        )
        assert params.b == 0.0 and params.c == 0.0
        assert params.a == pytest.approx(oracle_a, abs=0.05)

    def test_infeasible_b_bounds_is_error(self):
        ds = generate(SynthSpec(n_trials=50, seed=3))
        amps, widths, mts = _dataset_arrays(ds)
        bad_b = -float(np.min(mts)) - 1.0
        with pytest.raises(ValueError, match="empty search space"):
            calibrate_generic_t(
                amps, widths, mts,
                CalibrationBounds(a=(1.0, 1.0), b=(bad_b, bad_b), c=(0.0, 0.0)),
            )

    def test_needs_ten_trials(self):
        with pytest.raises(ValueError, match=">= 10"):
            calibrate_generic_t([100.0] * 5, [32.0] * 5, [0.5] * 5)
