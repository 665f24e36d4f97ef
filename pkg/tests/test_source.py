import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import WORKED_RATE, standard_error_of_fano
from ftir_interrogation import (
    BackgroundModel,
    ConfigError,
    Distribution,
    DomainError,
    SourceModel,
    effective_detected_rate,
    sample_herald_count,
    sample_herald_counts,
)
from ftir_interrogation.source import fano_factor

IDEAL = BackgroundModel()


class TestSourceModel:
    def test_poissonian_inferred(self):
        assert SourceModel(1000.0).distribution is Distribution.POISSONIAN

    def test_sub_poissonian_inferred(self):
        assert SourceModel(1000.0, 0.9).distribution is Distribution.SUB_POISSONIAN_BINOMIAL

    def test_sub_poissonian_needs_fano_below_one(self):
        with pytest.raises(ConfigError):
            SourceModel(1000.0, 1.0, Distribution.SUB_POISSONIAN_BINOMIAL)

    def test_poissonian_forces_unit_fano(self):
        with pytest.raises(ConfigError):
            SourceModel(1000.0, 0.8, Distribution.POISSONIAN)

    @pytest.mark.parametrize("rate, fano", [(0.0, 1.0), (-1.0, 1.0), (10.0, 0.0), (10.0, 1.2)])
    def test_invalid(self, rate, fano):
        with pytest.raises(ConfigError):
            SourceModel(rate, fano)

    def test_realized_mean_reports_rounding(self):
        src = SourceModel(1000.0, 0.7)
        assert src.trials(0.0015) == 5  # round(1.5 / 0.3)
        assert src.realized_mean(0.0015) == pytest.approx(1.5, rel=1e-12)
        assert SourceModel(1000.0, 0.9).realized_mean(1.0) == pytest.approx(1000.0)


class TestSampling:
    def test_zero_duration(self):
        with pytest.raises(DomainError):
            sample_herald_count(SourceModel(10.0), 0.0, 1)

    def test_scalar_is_int(self):
        assert isinstance(sample_herald_count(SourceModel(10.0), 1.0, 1), int)

    def test_seed_determinism(self):
        src = SourceModel(500.0, 0.8)
        a = sample_herald_counts(src, 1.0, 1000, 7)
        b = sample_herald_counts(src, 1.0, 1000, 7)
        assert np.array_equal(a, b)

    def test_poissonian_worked_example_window(self):
        counts = sample_herald_counts(SourceModel(WORKED_RATE), 0.15, 100_000, 11)
        mean = WORKED_RATE * 0.15
        assert abs(counts.mean() - mean) < 3 * math.sqrt(mean / counts.size)
        assert abs(fano_factor(counts) - 1.0) < 0.02

    def test_binomial_fano(self):
        counts = sample_herald_counts(SourceModel(1000.0, 0.9), 1.0, 100_000, 12)
        assert abs(fano_factor(counts) - 0.9) < 0.02

    @pytest.mark.parametrize("eta", [1.0, 0.9, 0.5, 0.2])
    def test_mean_within_five_standard_errors(self, eta):
        src = SourceModel(1000.0, eta)
        counts = sample_herald_counts(src, 1.0, 100_000, 13)
        se = counts.std(ddof=1) / math.sqrt(counts.size)
        assert abs(counts.mean() - src.realized_mean(1.0)) < 5 * se

    def test_fano_standard_error_oracle(self):
        # delta-method SE against the spread of the Fano estimate over replicates
        src = SourceModel(1000.0, 0.5)
        rng = np.random.default_rng(3)
        estimates = [fano_factor(sample_herald_counts(src, 1.0, 2000, rng)) for _ in range(300)]
        se = standard_error_of_fano(sample_herald_counts(src, 1.0, 2000, 99))
        assert np.std(estimates) == pytest.approx(se, rel=0.15)


class TestEffectiveRate:
    def test_ideal_full_reflection(self):
        assert effective_detected_rate(SourceModel(WORKED_RATE), IDEAL, 1.0) == WORKED_RATE

    def test_ideal_damage_budget(self):
        rate = effective_detected_rate(SourceModel(WORKED_RATE), IDEAL, 100 / 101)
        assert rate == pytest.approx(665.7722772277228, rel=1e-14)

    def test_dead_detector(self):
        bg = BackgroundModel(efficiency_s=0.0)
        assert effective_detected_rate(SourceModel(WORKED_RATE), bg, 1.0) == 0.0

    @given(p=st.floats(0.0, 1.0), rate=st.floats(1.0, 1e6))
    def test_ideal_reduction_is_bitwise_product(self, p, rate):
        assert effective_detected_rate(SourceModel(rate), IDEAL, p) == p * rate

    def test_accidentals(self):
        bg = BackgroundModel(
            pump_background_rate=1e5, filter_rejection_pump=0.99, coincidence_window=2e-9,
            dark_rate_s=100.0, dark_rate_i=50.0, efficiency_i=0.6, efficiency_s=0.5,
            filter_transmission_signal=0.9,
        )
        src = SourceModel(1000.0)
        singles_s = 100.0 + 1e5 * 0.01
        singles_i = 1000.0 * 0.6 + 50.0
        expected = 0.8 * 1000.0 * 0.5 * 0.9 + singles_s * 2e-9 * singles_i
        assert effective_detected_rate(src, bg, 0.8) == pytest.approx(expected, rel=1e-14)

    @given(
        p=st.floats(0.0, 0.9), dp=st.floats(0.0, 0.1),
        eff=st.floats(0.0, 0.9), deff=st.floats(0.0, 0.1),
        filt=st.floats(0.0, 0.9), dfilt=st.floats(0.0, 0.1),
    )
    def test_monotone(self, p, dp, eff, deff, filt, dfilt):
        src = SourceModel(1000.0)
        base = BackgroundModel(efficiency_s=eff, filter_transmission_signal=filt, dark_rate_s=10.0)
        r0 = effective_detected_rate(src, base, p)
        assert effective_detected_rate(src, base, p + dp) >= r0
        assert effective_detected_rate(src, BackgroundModel(efficiency_s=eff + deff, filter_transmission_signal=filt, dark_rate_s=10.0), p) >= r0
        assert effective_detected_rate(src, BackgroundModel(efficiency_s=eff, filter_transmission_signal=filt + dfilt, dark_rate_s=10.0), p) >= r0

    def test_rejects_bad_probability(self):
        with pytest.raises(DomainError):
            effective_detected_rate(SourceModel(10.0), IDEAL, 1.5)

    @pytest.mark.parametrize("kwargs", [dict(efficiency_s=1.1), dict(dark_rate_i=-1.0), dict(coincidence_window=0.0)])
    def test_background_validation(self, kwargs):
        with pytest.raises(ConfigError):
            BackgroundModel(**kwargs)
