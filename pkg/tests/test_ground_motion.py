import numpy as np
import pytest
from scipy.signal import periodogram

from sensorq.errors import GenerationFailedError, InvalidParameterError
from sensorq.ground_motion import (
    KanaiTajimiParams,
    filter_frequency_response,
    filter_time_history,
    generate,
    scale_to_pga,
)

PAPER_PARAMS = KanaiTajimiParams(
    omega_g=17.0, zeta_g=0.3, duration=10.0, dt=0.01, target_pga=1.5
)


class TestParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(omega_g=0.0),
            dict(zeta_g=0.0),
            dict(zeta_g=1.0),
            dict(dt=-0.01),
            dict(duration=0.001),
            dict(target_pga=0.0),
            dict(noise_std=0.0),
        ],
    )
    def test_invalid_values_rejected(self, kwargs):
        base = dict(omega_g=17.0, zeta_g=0.3, duration=10.0, dt=0.01, target_pga=1.5)
        base.update(kwargs)
        with pytest.raises(InvalidParameterError):
            KanaiTajimiParams(**base)

    def test_record_length(self):
        assert PAPER_PARAMS.n_steps == 1000
        assert generate(PAPER_PARAMS, 0).shape == (1001,)


class TestFrequencyResponse:
    def test_dc_gain_is_one(self):
        assert filter_frequency_response(PAPER_PARAMS, 0.0) == pytest.approx(1.0)

    def test_gain_at_resonance(self):
        # |F(j wg)| = sqrt(1 + 4 zg^2) / (2 zg), from substituting s = j wg
        expected = np.sqrt(1.0 + 4.0 * 0.3**2) / (2.0 * 0.3)
        got = abs(filter_frequency_response(PAPER_PARAMS, 17.0))
        assert got == pytest.approx(expected, rel=1e-12)

    def test_high_frequency_rolloff(self):
        gains = np.abs(filter_frequency_response(PAPER_PARAMS, [1e3, 1e5, 1e8]))
        assert np.all(np.diff(gains) < 0)
        assert gains[-1] < 1e-6


class TestGenerate:
    def test_peak_exactly_at_target(self):
        for seed in range(25):
            record = generate(PAPER_PARAMS, seed)
            assert np.max(np.abs(record)) == 1.5

    def test_deterministic_per_seed(self):
        np.testing.assert_array_equal(generate(PAPER_PARAMS, 7), generate(PAPER_PARAMS, 7))
        assert not np.array_equal(generate(PAPER_PARAMS, 7), generate(PAPER_PARAMS, 8))

    def test_noise_std_irrelevant_after_scaling(self):
        loud = KanaiTajimiParams(
            omega_g=17.0, zeta_g=0.3, duration=10.0, dt=0.01, target_pga=1.5,
            noise_std=50.0,
        )
        np.testing.assert_allclose(
            generate(PAPER_PARAMS, 3), generate(loud, 3), rtol=1e-12
        )

    def test_zero_record_raises(self):
        with pytest.raises(GenerationFailedError):
            scale_to_pga(np.zeros(100), 1.5)

    def test_filter_is_linear_in_noise(self, rng):
        w1 = rng.standard_normal(PAPER_PARAMS.n_steps)
        w2 = rng.standard_normal(PAPER_PARAMS.n_steps)
        mixed = filter_time_history(PAPER_PARAMS, 2.0 * w1 - 0.5 * w2)
        parts = 2.0 * filter_time_history(PAPER_PARAMS, w1) - 0.5 * filter_time_history(
            PAPER_PARAMS, w2
        )
        np.testing.assert_allclose(mixed, parts, rtol=1e-10, atol=1e-14)

    def test_starts_from_rest(self):
        assert generate(PAPER_PARAMS, 5)[0] == 0.0


class TestSpectrum:
    def test_ensemble_periodogram_peaks_near_filter_resonance(self):
        psd = 0.0
        for seed in range(60):
            freqs, p = periodogram(generate(PAPER_PARAMS, seed), fs=1.0 / PAPER_PARAMS.dt)
            psd = psd + p
        omega = 2.0 * np.pi * freqs
        peak_omega = omega[1:][np.argmax(psd[1:])]
        assert 12.0 <= peak_omega <= 22.0
