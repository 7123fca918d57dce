"""Pulse recovery from video, the verification half of the toolkit.

The chain mirrors a plain imaging-photoplethysmography reader: pool each
frame under the mask, project the three channel means onto the color
weights, remove slow illumination drift with a moving mean, bandpass to the
physiological frequency range, then locate the spectral peak and score how
much in-band energy sits at the peak and its first harmonic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BandError, InputError, NoPeak, SignalLengthError
from .model import (
    PHYSIO_WEIGHTS,
    ColorWeights,
    PerfusionMask,
    VideoSequence,
    weighted_spatial_mean,
)

#: Physiological heart-rate band, in Hz (42 to 240 beats per minute).
BAND_LO_HZ = 0.7
BAND_HI_HZ = 4.0

#: Width of the detrending moving-mean window, in seconds.
DETREND_WINDOW_S = 1.0

#: The peak estimator zero-pads until spectral bins are at most this far apart.
MAX_BIN_SPACING_HZ = 0.005

#: Half-width of the signal windows used by the SNR score, in Hz.
SNR_WINDOW_HZ = 0.1

#: Reported ceiling when out-of-peak power is (numerically) zero.
SNR_CAP_DB = 80.0

#: Minimum analyzable signal duration, in seconds.
MIN_ANALYSIS_S = 4.0

#: In-band spectral mass below this fraction of the spectrum maximum (or of
#: unity for all-zero spectra) counts as "no signal".
_NO_PEAK_REL = 1e-12


@dataclass(frozen=True, eq=False)
class RecoveryReport:
    """Outcome of one verification run.

    bpm_estimate is always 60 * peak_freq_hz; signal holds the processed
    time series the estimate was made from.
    """

    bpm_estimate: float
    snr_db: float
    peak_freq_hz: float
    signal: np.ndarray

    def __post_init__(self):
        peak = float(self.peak_freq_hz)
        if not BAND_LO_HZ <= peak <= BAND_HI_HZ:
            raise InputError(f"peak frequency {peak} Hz outside [{BAND_LO_HZ}, {BAND_HI_HZ}] Hz")
        bpm = float(self.bpm_estimate)
        if abs(bpm - 60.0 * peak) > 1e-9:
            raise InputError("bpm_estimate must equal 60 * peak_freq_hz")
        sig = np.array(self.signal, dtype=np.float64)
        sig.setflags(write=False)
        object.__setattr__(self, "bpm_estimate", bpm)
        object.__setattr__(self, "snr_db", float(self.snr_db))
        object.__setattr__(self, "peak_freq_hz", peak)
        object.__setattr__(self, "signal", sig)


def extract_signal(
    video: VideoSequence,
    mask: PerfusionMask,
    weights: ColorWeights = PHYSIO_WEIGHTS,
) -> np.ndarray:
    """Pool each frame under the mask and project onto the color weights.

    Returns one sample per frame:
    s_t = w_r * mean_R + w_g * mean_G + w_b * mean_B.
    """
    w = weights.as_array()
    samples = np.empty(len(video))
    for t, frame in enumerate(video.frames):
        means = weighted_spatial_mean(frame, mask)
        samples[t] = w[0] * means[0] + w[1] * means[1] + w[2] * means[2]
    return samples


def detrend(signal, rate: float, window_s: float = DETREND_WINDOW_S) -> np.ndarray:
    """Subtract a centered moving mean to remove slow drift and offset.

    The window spans round(window_s * rate) samples, widened to the next odd
    count so it is symmetric; at the edges it truncates to the part that
    overlaps the signal.
    """
    s = np.asarray(signal, dtype=np.float64)
    if s.ndim != 1 or s.size < 2:
        raise InputError("detrend needs a 1-D signal with at least 2 samples")
    if not (math.isfinite(rate) and rate > 0.0):
        raise InputError(f"rate must be positive and finite, got {rate}")
    if not (math.isfinite(window_s) and window_s > 0.0):
        raise InputError(f"window_s must be positive and finite, got {window_s}")
    width = max(1, int(round(window_s * rate)))
    if width % 2 == 0:
        width += 1
    kernel = np.ones(width)
    sums = np.convolve(s, kernel, mode="same")
    counts = np.convolve(np.ones(s.size), kernel, mode="same")
    return s - sums / counts


def bandpass(
    signal,
    rate: float,
    lo: float = BAND_LO_HZ,
    hi: float = BAND_HI_HZ,
) -> np.ndarray:
    """Keep only frequency content with lo <= |f| <= hi, via FFT bin zeroing.

    Requires 0 < lo < hi < rate / 2; a band reaching the Nyquist frequency
    raises BandError.  The operation is idempotent up to float rounding.
    """
    s = np.asarray(signal, dtype=np.float64)
    if s.ndim != 1 or s.size < 2:
        raise InputError("bandpass needs a 1-D signal with at least 2 samples")
    if not (math.isfinite(rate) and rate > 0.0):
        raise InputError(f"rate must be positive and finite, got {rate}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo <= 0.0 or hi <= lo:
        raise BandError(f"need 0 < lo < hi, got [{lo}, {hi}]")
    if hi >= rate / 2.0:
        raise BandError(f"band edge {hi} Hz reaches the Nyquist frequency {rate / 2.0} Hz")
    spectrum = np.fft.rfft(s)
    freqs = np.fft.rfftfreq(s.size, d=1.0 / rate)
    spectrum[(freqs < lo) | (freqs > hi)] = 0.0
    return np.fft.irfft(spectrum, n=s.size)


def _padded_spectrum(signal: np.ndarray, rate: float) -> tuple[np.ndarray, np.ndarray]:
    """Magnitude spectrum of the mean-removed signal, zero-padded so the bin
    spacing is at most MAX_BIN_SPACING_HZ.

    The padded length is a multiple of the signal length, which keeps the
    signal's own bins on the padded grid; a periodic signal with a whole
    number of cycles then lands its harmonics exactly on bins.
    """
    centered = signal - signal.mean()
    factor = max(1, int(math.ceil(rate / (MAX_BIN_SPACING_HZ * signal.size))))
    nfft = factor * signal.size
    magnitude = np.abs(np.fft.rfft(centered, n=nfft))
    freqs = np.fft.rfftfreq(nfft, d=1.0 / rate)
    return magnitude, freqs


def estimate_bpm(signal, rate: float) -> tuple[float, float]:
    """Locate the dominant in-band spectral peak and convert it to BPM.

    Returns (bpm, peak_freq_hz).  The windowless magnitude spectrum is
    zero-padded to sub-0.005 Hz bin spacing and the peak bin is refined by
    parabolic interpolation of its two neighbors.  Raises SignalLengthError
    for signals shorter than 4 seconds and NoPeak when the in-band spectrum
    carries no energy.
    """
    s = np.asarray(signal, dtype=np.float64)
    if s.ndim != 1:
        raise InputError("estimate_bpm needs a 1-D signal")
    if not (math.isfinite(rate) and rate > 0.0):
        raise InputError(f"rate must be positive and finite, got {rate}")
    if s.size < MIN_ANALYSIS_S * rate:
        raise SignalLengthError(
            f"signal of {s.size / rate:.2f} s is shorter than the {MIN_ANALYSIS_S:g} s minimum"
        )
    magnitude, freqs = _padded_spectrum(s, rate)
    in_band = (freqs >= BAND_LO_HZ) & (freqs <= BAND_HI_HZ)
    band_mag = magnitude[in_band]
    floor = _NO_PEAK_REL * max(1.0, float(magnitude.max()))
    if band_mag.size == 0 or float(band_mag.max()) <= floor:
        raise NoPeak("spectrum carries no energy inside the physiological band")
    k = int(np.flatnonzero(in_band)[0] + np.argmax(band_mag))
    step = freqs[1] - freqs[0]
    offset = 0.0
    if 1 <= k < magnitude.size - 1:
        left, mid, right = magnitude[k - 1], magnitude[k], magnitude[k + 1]
        denom = left - 2.0 * mid + right
        if denom != 0.0:
            offset = 0.5 * (left - right) / denom
            offset = min(max(offset, -0.5), 0.5)
    peak_freq = float(freqs[k] + offset * step)
    peak_freq = min(max(peak_freq, BAND_LO_HZ), BAND_HI_HZ)
    return 60.0 * peak_freq, peak_freq


def snr(signal, rate: float, peak_freq_hz: float) -> float:
    """In-band signal-to-noise ratio around a known pulse frequency, in dB.

    Signal power is summed over the magnitude-squared spectrum within 0.1 Hz
    of the peak and of its first harmonic; noise power is the remainder of
    the physiological band.  The unpadded spectrum is used, so a pure on-bin
    sine concentrates in the signal windows and hits the 80 dB cap.
    """
    s = np.asarray(signal, dtype=np.float64)
    if s.ndim != 1 or s.size < 2:
        raise InputError("snr needs a 1-D signal with at least 2 samples")
    if not (math.isfinite(rate) and rate > 0.0):
        raise InputError(f"rate must be positive and finite, got {rate}")
    if not BAND_LO_HZ <= peak_freq_hz <= BAND_HI_HZ:
        raise InputError(
            f"peak frequency {peak_freq_hz} Hz outside [{BAND_LO_HZ}, {BAND_HI_HZ}] Hz"
        )
    centered = s - s.mean()
    power = np.abs(np.fft.rfft(centered)) ** 2
    freqs = np.fft.rfftfreq(s.size, d=1.0 / rate)
    signal_bins = (np.abs(freqs - peak_freq_hz) <= SNR_WINDOW_HZ) | (
        np.abs(freqs - 2.0 * peak_freq_hz) <= SNR_WINDOW_HZ
    )
    noise_bins = (freqs >= BAND_LO_HZ) & (freqs <= BAND_HI_HZ) & ~signal_bins
    signal_power = float(power[signal_bins].sum())
    noise_power = float(power[noise_bins].sum())
    if noise_power <= 0.0:
        return SNR_CAP_DB
    if signal_power <= 0.0:
        return float("-inf")
    return min(10.0 * math.log10(signal_power / noise_power), SNR_CAP_DB)


def verify(
    video: VideoSequence,
    mask: PerfusionMask,
    weights: ColorWeights = PHYSIO_WEIGHTS,
) -> RecoveryReport:
    """Run the full recovery chain on a video and report the findings.

    extract -> detrend (1 s window) -> bandpass [0.7, 4.0] Hz -> peak
    estimate -> SNR.  Requires at least 4 seconds of video; propagates
    NoPeak when the processed signal carries no in-band energy.
    """
    if len(video) / video.fps < MIN_ANALYSIS_S:
        raise SignalLengthError(
            f"video of {len(video) / video.fps:.2f} s is shorter than the "
            f"{MIN_ANALYSIS_S:g} s minimum"
        )
    raw = extract_signal(video, mask, weights)
    flat = detrend(raw, video.fps)
    banded = bandpass(flat, video.fps)
    bpm, peak_freq = estimate_bpm(banded, video.fps)
    level = snr(banded, video.fps, peak_freq)
    return RecoveryReport(bpm, level, peak_freq, banded)
