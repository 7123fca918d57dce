import numpy as np
import pytest

from pulsekit import (
    BeatTemplate,
    BpmRangeError,
    InputError,
    NumericError,
    PhaseError,
    SamplingError,
    SignalLengthError,
    beat_value,
    load_trace,
    retune,
    synth_physio,
    synth_sine,
)
from pulsekit.pulse import DEFAULT_TEMPLATE


def count_strict_maxima(x, threshold):
    """Oracle: strict interior local maxima above a threshold."""
    return sum(
        1
        for i in range(1, len(x) - 1)
        if x[i] > x[i - 1] and x[i] > x[i + 1] and x[i] > threshold
    )


def autocorr_peak_lag(x, lo, hi):
    """Oracle: lag of the largest autocorrelation value in [lo, hi], by direct dot products."""
    x = np.asarray(x, dtype=float) - np.mean(x)
    best_lag, best = lo, -np.inf
    for lag in range(lo, hi + 1):
        value = float(np.dot(x[:-lag], x[lag:]))
        if value > best:
            best, best_lag = value, lag
    return best_lag


def spectral_peak_hz(x, rate):
    """Oracle: frequency of the largest magnitude bin on a dense padded grid."""
    x = np.asarray(x, dtype=float) - np.mean(x)
    nfft = len(x) * int(np.ceil(rate / (0.005 * len(x))))
    mag = np.abs(np.fft.rfft(x, n=nfft))
    freqs = np.fft.rfftfreq(nfft, d=1.0 / rate)
    return float(freqs[np.argmax(mag)])


class TestBeatTemplate:
    def test_default_shape(self):
        assert DEFAULT_TEMPLATE.bumps == ((0.18, 0.07, 1.0), (0.46, 0.11, 0.42))

    def test_needs_two_bumps(self):
        with pytest.raises(InputError):
            BeatTemplate(((0.2, 0.1, 1.0),))

    def test_systolic_must_dominate(self):
        with pytest.raises(InputError):
            BeatTemplate(((0.2, 0.1, 0.4), (0.5, 0.1, 0.9)))

    def test_centers_must_increase(self):
        with pytest.raises(InputError):
            BeatTemplate(((0.5, 0.1, 1.0), (0.2, 0.1, 0.4)))

    def test_rejects_bad_bumps(self):
        with pytest.raises(InputError):
            BeatTemplate(((1.2, 0.1, 1.0), (0.5, 0.1, 0.4)))
        with pytest.raises(InputError):
            BeatTemplate(((0.2, 0.0, 1.0), (0.5, 0.1, 0.4)))
        with pytest.raises(InputError):
            BeatTemplate(((0.2, 0.1, 1.0), (0.5, 0.1, 0.0)))


class TestBeatValue:
    def test_systolic_center_is_global_max(self):
        grid = np.linspace(0.0, 0.999, 2000)
        values = np.array([beat_value(DEFAULT_TEMPLATE, u) for u in grid])
        assert abs(grid[np.argmax(values)] - 0.18) < 0.01
        assert beat_value(DEFAULT_TEMPLATE, 0.18) >= values.max() - 1e-3

    def test_tail_is_near_zero(self):
        assert beat_value(DEFAULT_TEMPLATE, 0.95) < 0.01

    def test_no_wraparound(self):
        # without wrap the value just left of 1.0 stays tiny, not influenced
        # by the systolic bump sitting at 0.18 of the next cycle
        assert beat_value(DEFAULT_TEMPLATE, 0.999) < 0.01

    @pytest.mark.parametrize("phase", [-0.1, 1.0, 1.5])
    def test_phase_domain(self, phase):
        with pytest.raises(PhaseError):
            beat_value(DEFAULT_TEMPLATE, phase)


class TestSynthPhysio:
    def test_sample_count_and_normalization(self):
        trace = synth_physio(60, 30, 10)
        assert len(trace) == 300
        assert abs(trace.samples.mean()) <= 1e-9
        assert np.ptp(trace.samples) == pytest.approx(1.0, abs=1e-9)
        assert trace.sample_rate == 30.0
        assert trace.nominal_bpm == 60.0

    def test_ten_systolic_peaks_in_ten_seconds(self):
        trace = synth_physio(60, 30, 10)
        assert count_strict_maxima(trace.samples, 0.25) == 10

    def test_autocorrelation_period_at_120_bpm(self):
        trace = synth_physio(120, 30, 10)
        assert autocorr_peak_lag(trace.samples, 5, 120) == 15

    @pytest.mark.parametrize(
        "bpm,fps,duration,beats",
        [(60, 30, 10, 10), (90, 30, 10, 15), (120, 10, 10, 20), (45, 4, 20, 15)],
    )
    def test_beat_count_tracks_rate(self, bpm, fps, duration, beats):
        trace = synth_physio(bpm, fps, duration)
        assert abs(count_strict_maxima(trace.samples, 0.25) - beats) <= 1

    def test_bpm_range(self):
        with pytest.raises(BpmRangeError):
            synth_physio(20, 30, 10)
        with pytest.raises(BpmRangeError):
            synth_physio(500, 30, 10)

    def test_bad_timing(self):
        with pytest.raises(InputError):
            synth_physio(60, 0, 10)
        with pytest.raises(InputError):
            synth_physio(60, 30, -1)

    def test_deterministic(self):
        a = synth_physio(72, 30, 10)
        b = synth_physio(72, 30, 10)
        assert np.array_equal(a.samples, b.samples)


class TestSynthSine:
    def test_quarter_period_peak(self):
        trace = synth_sine(60, 4, 1)
        assert abs(trace.samples[0]) <= 1e-9
        assert trace.samples[1] == pytest.approx(0.5, abs=1e-9)

    def test_normalization(self):
        trace = synth_sine(60, 30, 10)
        assert abs(trace.samples.mean()) <= 1e-9
        assert np.ptp(trace.samples) == pytest.approx(1.0, abs=1e-9)

    def test_matches_physio_amplitude_and_frequency(self):
        sine = synth_sine(60, 30, 10)
        physio = synth_physio(60, 30, 10)
        assert abs(np.ptp(sine.samples) - np.ptp(physio.samples)) <= 1e-9
        assert spectral_peak_hz(sine.samples, 30) == spectral_peak_hz(physio.samples, 30)

    def test_bpm_range(self):
        with pytest.raises(BpmRangeError):
            synth_sine(10, 30, 10)


class TestLoadTrace:
    def rows_of(self, trace):
        return [(i / trace.sample_rate, v) for i, v in enumerate(trace.samples)]

    def test_round_trip(self):
        source = synth_sine(60, 30, 10)
        loaded = load_trace(self.rows_of(source))
        assert np.allclose(loaded.samples, source.samples, atol=1e-9)
        assert loaded.sample_rate == pytest.approx(30.0, rel=1e-9)
        assert loaded.nominal_bpm == pytest.approx(60.0, abs=0.5)

    def test_affine_input_normalizes_to_same_trace(self):
        source = synth_physio(75, 30, 10)
        rows = [(t, 3.0 * v + 0.7) for t, v in self.rows_of(source)]
        loaded = load_trace(rows)
        assert np.allclose(loaded.samples, source.samples, atol=1e-12)

    def test_too_few_rows(self):
        with pytest.raises(InputError):
            load_trace([(0.0, 0.1)])

    def test_non_uniform_spacing(self):
        rows = [(0.0, 0.0), (0.0333, 0.5), (0.08, -0.5), (0.1133, 0.0)]
        with pytest.raises(SamplingError):
            load_trace(rows)

    def test_non_increasing_timestamps(self):
        rows = [(0.0, 0.0), (0.1, 0.5), (0.1, -0.5)]
        with pytest.raises(SamplingError):
            load_trace(rows)

    def test_constant_values(self):
        rows = [(i / 30, 0.4) for i in range(300)]
        with pytest.raises(NumericError):
            load_trace(rows)

    def test_too_short_for_rate_estimate(self):
        source = synth_sine(60, 30, 2)
        with pytest.raises(SignalLengthError):
            load_trace(self.rows_of(source))


class TestRetune:
    def test_doubling_rate_doubles_frequency(self):
        retuned = retune(synth_sine(60, 30, 10), 120)
        assert len(retuned) == 150
        assert retuned.nominal_bpm == 120.0
        assert retuned.sample_rate == 30.0
        assert abs(spectral_peak_hz(retuned.samples, 30) - 2.0) <= 0.01

    def test_identity(self):
        source = synth_physio(60, 30, 10)
        again = retune(source, source.nominal_bpm)
        assert np.allclose(again.samples, source.samples, atol=1e-9)

    def test_halves_autocorrelation_lag(self):
        source = synth_physio(60, 30, 10)
        assert autocorr_peak_lag(source.samples, 5, 120) == 30
        faster = retune(source, 120)
        assert autocorr_peak_lag(faster.samples, 5, 120) == 15

    def test_target_range(self):
        with pytest.raises(BpmRangeError):
            retune(synth_sine(60, 30, 10), 400)

    def test_deterministic(self):
        a = retune(synth_physio(60, 30, 10), 90)
        b = retune(synth_physio(60, 30, 10), 90)
        assert np.array_equal(a.samples, b.samples)
