"""Temporal pulse waveforms.

One cardiac cycle is modeled on a normalized phase axis u in [0, 1) as a
sum of Gaussian bumps: a strong early systolic peak and a weaker, wider
diastolic peak, with the dicrotic notch emerging as the dip between them.
Sampling walks the phase at bpm / (60 * fps) per frame.  A matched sine
generator provides the naive baseline waveform at the same frequency and
amplitude, and recorded traces can be loaded from (time, value) rows and
retuned to a different rate.

Every generated or loaded trace is normalized to zero mean and unit
peak-to-peak amplitude, which is what the PulseTrace contract demands.
All functions are deterministic: equal arguments give bit-identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BpmRangeError, InputError, NumericError, PhaseError, SamplingError
from .model import BPM_MAX, BPM_MIN, PulseTrace
from .recover import estimate_bpm

#: Tolerance for non-uniform timestamp spacing when loading traces, seconds.
UNIFORM_DT_TOL_S = 1e-6


@dataclass(frozen=True)
class BeatTemplate:
    """Gaussian-bump description of one cardiac cycle.

    bumps holds (center, width, amplitude) triples on the normalized phase
    axis, ordered by strictly increasing center.  The first bump is the
    systolic peak and the last the diastolic peak, so the first amplitude
    must exceed the last.
    """

    bumps: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        bumps = tuple(tuple(float(v) for v in bump) for bump in self.bumps)
        if len(bumps) < 2:
            raise InputError("a beat template needs at least 2 bumps (systolic and diastolic)")
        for center, width, amplitude in bumps:
            if not 0.0 <= center < 1.0:
                raise InputError(f"bump center {center} outside the phase axis [0, 1)")
            if not width > 0.0:
                raise InputError(f"bump width must be positive, got {width}")
            if not amplitude > 0.0:
                raise InputError(f"bump amplitude must be positive, got {amplitude}")
        centers = [b[0] for b in bumps]
        if any(b >= a for b, a in zip(centers, centers[1:])):
            raise InputError("bump centers must be strictly increasing")
        if not bumps[0][2] > bumps[-1][2]:
            raise InputError("systolic amplitude must exceed diastolic amplitude")
        object.__setattr__(self, "bumps", bumps)


#: Stand-in morphology for a generic adult pulse at rest.
DEFAULT_TEMPLATE = BeatTemplate(
    (
        (0.18, 0.07, 1.0),  # systolic peak
        (0.46, 0.11, 0.42),  # diastolic peak, past the dicrotic notch
    )
)


def _check_bpm(bpm: float) -> float:
    b = float(bpm)
    if not math.isfinite(b) or not BPM_MIN <= b <= BPM_MAX:
        raise BpmRangeError(f"bpm {bpm} outside supported range [{BPM_MIN:g}, {BPM_MAX:g}]")
    return b


def _check_timing(fps: float, duration_s: float) -> tuple[float, float]:
    f = float(fps)
    if not math.isfinite(f) or f <= 0.0:
        raise InputError(f"fps must be positive and finite, got {fps}")
    d = float(duration_s)
    if not math.isfinite(d) or d <= 0.0:
        raise InputError(f"duration_s must be positive and finite, got {duration_s}")
    return f, d


def _beat_values(template: BeatTemplate, phases: np.ndarray) -> np.ndarray:
    values = np.zeros_like(phases)
    for center, width, amplitude in template.bumps:
        values += amplitude * np.exp(-((phases - center) ** 2) / (2.0 * width**2))
    return values


def _normalized(samples: np.ndarray) -> np.ndarray:
    """Shift to zero mean and rescale to unit peak-to-peak."""
    x = np.asarray(samples, dtype=np.float64)
    x = x - x.mean()
    span = float(x.max() - x.min())
    if not math.isfinite(span) or span <= 0.0:
        raise NumericError("cannot normalize a constant trace (zero peak-to-peak)")
    return x / span


def beat_value(template: BeatTemplate, u: float) -> float:
    """Raw (unnormalized) template value at phase u in [0, 1).

    The bumps do not wrap around the cycle boundary; phases outside [0, 1)
    raise PhaseError.
    """
    p = float(u)
    if not 0.0 <= p < 1.0:
        raise PhaseError(f"phase {u} outside [0, 1)")
    return float(_beat_values(template, np.array([p]))[0])


def synth_physio(
    bpm: float,
    fps: float,
    duration_s: float,
    template: BeatTemplate = DEFAULT_TEMPLATE,
) -> PulseTrace:
    """Synthesize a physiological pulse trace.

    round(fps * duration_s) samples are generated by accumulating phase
    from zero at bpm / (60 * fps) per sample and evaluating the beat
    template at the fractional phase, then normalizing.
    """
    bpm = _check_bpm(bpm)
    fps, duration_s = _check_timing(fps, duration_s)
    count = int(round(fps * duration_s))
    if count < 2:
        raise InputError(f"fps {fps:g} and duration {duration_s:g} s yield fewer than 2 samples")
    phase = np.arange(count) * (bpm / (60.0 * fps))
    raw = _beat_values(template, np.mod(phase, 1.0))
    return PulseTrace(_normalized(raw), fps, bpm)


def synth_sine(bpm: float, fps: float, duration_s: float) -> PulseTrace:
    """Synthesize the matched sine baseline: 0.5 * sin(2*pi * (bpm/60) * t / fps).

    The sampled sine is normalized like the physiological trace; when the
    sampling grid hits the extremes the normalization is an identity, and in
    every case the result has the same zero mean and unit peak-to-peak as
    the physiological waveform it stands in for.
    """
    bpm = _check_bpm(bpm)
    fps, duration_s = _check_timing(fps, duration_s)
    count = int(round(fps * duration_s))
    if count < 2:
        raise InputError(f"fps {fps:g} and duration {duration_s:g} s yield fewer than 2 samples")
    t = np.arange(count)
    raw = 0.5 * np.sin(2.0 * np.pi * (bpm / 60.0) * t / fps)
    return PulseTrace(_normalized(raw), fps, bpm)


def load_trace(rows) -> PulseTrace:
    """Build a PulseTrace from (time_s, value) rows.

    Timestamps must be strictly increasing and uniformly spaced within
    1e-6 s; the sample rate is recovered from the spacing, the values are
    normalized, and the nominal BPM is estimated spectrally (which needs at
    least 4 seconds of data).
    """
    rows = list(rows)
    if len(rows) < 2:
        raise InputError(f"a trace needs at least 2 rows, got {len(rows)}")
    times = np.array([float(r[0]) for r in rows])
    values = np.array([float(r[1]) for r in rows])
    if not (np.isfinite(times).all() and np.isfinite(values).all()):
        raise InputError("trace rows contain non-finite numbers")
    steps = np.diff(times)
    if (steps <= 0.0).any():
        raise SamplingError("trace timestamps must be strictly increasing")
    if float(steps.max() - steps.min()) > UNIFORM_DT_TOL_S:
        raise SamplingError(
            f"trace timestamps are not uniform: step spread "
            f"{steps.max() - steps.min():.3e} s exceeds {UNIFORM_DT_TOL_S:g} s"
        )
    rate = (len(rows) - 1) / float(times[-1] - times[0])
    samples = _normalized(values)
    nominal_bpm, _ = estimate_bpm(samples, rate)
    return PulseTrace(samples, rate, nominal_bpm)


def retune(trace: PulseTrace, target_bpm: float) -> PulseTrace:
    """Change the beat rate of a trace by resampling its phase axis.

    The samples are linearly interpolated at positions scaled by
    target_bpm / nominal_bpm while the sample rate stays unchanged, so the
    waveform shape is preserved and the duration scales inversely.
    """
    target = _check_bpm(target_bpm)
    ratio = target / trace.nominal_bpm
    count = int(math.floor((len(trace) - 1) / ratio)) + 1
    if count < 2:
        raise InputError(f"trace too short to retune to {target_bpm:g} bpm")
    positions = np.arange(count) * ratio
    resampled = np.interp(positions, np.arange(len(trace)), trace.samples)
    return PulseTrace(_normalized(resampled), trace.sample_rate, target)
