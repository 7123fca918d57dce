"""Core data types and elementary numeric contracts.

Images are carried as float intensities in [0, 1].  8-bit file samples map
to v / 255 on read and round(v * 255) on write; everything in between stays
in float space because the additive pulse term at study strength spans only
a few 8-bit steps and integer arithmetic would quantize it away.  No
colorspace conversion is performed: weights are defined directly in the
storage RGB space.

All types are immutable after construction, their invariants are enforced
at construction time, and every operation here is a pure function, so
concurrent use needs no synchronization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BpmRangeError,
    DimensionError,
    EmptyMask,
    InputError,
    InvalidWeights,
    NumericError,
)

BPM_MIN = 30.0
BPM_MAX = 240.0

#: Per-channel strength of the pulse signal as measured in camera RGB.
CHANNEL_PULSE_STRENGTH = (0.39, 0.70, 0.60)

#: Pulse strength calibrated for subtle, study-grade output.
DEFAULT_GAMMA = 0.15
#: Pulse strength magnified 5x for visualization output.
VISUALIZATION_GAMMA = 0.75

WAVEFORM_MODES = ("physio", "sine", "file")
WEIGHT_MODES = ("physio", "red-baseline")
MASK_MODES = ("file", "skin-segmentation")

_MEAN_TOL = 1e-9
_PTP_TOL = 1e-9


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FrameBuffer:
    """A single RGB image: shape (height, width, 3), intensities in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64)
        if px.ndim != 3 or px.shape[2] != 3:
            raise DimensionError(f"expected (height, width, 3) pixels, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise DimensionError("frame must be at least 1x1")
        if not np.isfinite(px).all():
            raise NumericError("frame contains non-finite samples")
        if px.min() < 0.0 or px.max() > 1.0:
            raise NumericError("frame intensities must lie in [0, 1]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def channel(self, index: int) -> np.ndarray:
        """Read-only view of one color plane (0=R, 1=G, 2=B)."""
        return self.pixels[:, :, index]


@dataclass(frozen=True, eq=False)
class VideoSequence:
    """Ordered frames of identical size plus a frame rate."""

    frames: tuple[FrameBuffer, ...]
    fps: float

    def __post_init__(self):
        frames = tuple(self.frames)
        if len(frames) < 1:
            raise InputError("a video needs at least one frame")
        size = (frames[0].height, frames[0].width)
        for i, frame in enumerate(frames):
            if (frame.height, frame.width) != size:
                raise DimensionError(
                    f"frame {i} is {frame.width}x{frame.height}, expected {size[1]}x{size[0]}"
                )
        fps = float(self.fps)
        if not math.isfinite(fps) or fps <= 0.0:
            raise InputError(f"fps must be a positive finite number, got {self.fps}")
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "fps", fps)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def duration_s(self) -> float:
        return len(self.frames) / self.fps


@dataclass(frozen=True, eq=False)
class PerfusionMask:
    """Per-pixel weight grid in [0, 1] giving local pulse visibility."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2:
            raise DimensionError(f"expected a 2-D weight grid, got shape {w.shape}")
        if w.shape[0] < 1 or w.shape[1] < 1:
            raise DimensionError("mask must be at least 1x1")
        if not np.isfinite(w).all():
            raise NumericError("mask contains non-finite weights")
        if w.min() < 0.0 or w.max() > 1.0:
            raise NumericError("mask weights must lie in [0, 1]")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def height(self) -> int:
        return self.weights.shape[0]

    @property
    def width(self) -> int:
        return self.weights.shape[1]

    @property
    def total(self) -> float:
        """Sum of all weights; zero means the mask selects nothing."""
        return float(self.weights.sum())


@dataclass(frozen=True, eq=False)
class PulseTrace:
    """Uniformly sampled pulse waveform, zero mean with unit peak-to-peak.

    nominal_bpm is metadata describing the dominant beat rate of the
    samples; synthesis sets it exactly, loading estimates it spectrally.
    """

    samples: np.ndarray
    sample_rate: float
    nominal_bpm: float

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.float64)
        if s.ndim != 1:
            raise DimensionError(f"expected a 1-D sample vector, got shape {s.shape}")
        if s.size < 2:
            raise InputError("a pulse trace needs at least 2 samples")
        if not np.isfinite(s).all():
            raise NumericError("pulse trace contains non-finite samples")
        if abs(float(s.mean())) > _MEAN_TOL:
            raise NumericError(f"pulse trace mean {s.mean():.3e} exceeds tolerance {_MEAN_TOL}")
        span = float(s.max() - s.min())
        if abs(span - 1.0) > _PTP_TOL:
            raise NumericError(f"pulse trace peak-to-peak {span!r} is not 1 within {_PTP_TOL}")
        rate = float(self.sample_rate)
        if not math.isfinite(rate) or rate <= 0.0:
            raise InputError(f"sample_rate must be positive and finite, got {self.sample_rate}")
        bpm = float(self.nominal_bpm)
        if not math.isfinite(bpm) or bpm <= 0.0:
            raise InputError(f"nominal_bpm must be positive and finite, got {self.nominal_bpm}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "sample_rate", rate)
        object.__setattr__(self, "nominal_bpm", bpm)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class ColorWeights:
    """Per-channel strength of the additive pulse term (red, green, blue)."""

    w_r: float
    w_g: float
    w_b: float

    def __post_init__(self):
        values = (self.w_r, self.w_g, self.w_b)
        for name, value in zip(("w_r", "w_g", "w_b"), values):
            v = float(value)
            if not math.isfinite(v) or v < 0.0:
                raise InvalidWeights(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, v)
        if self.w_r + self.w_g + self.w_b <= 0.0:
            raise InvalidWeights("color weights must not be all zero")

    def as_array(self) -> np.ndarray:
        return np.array([self.w_r, self.w_g, self.w_b])


#: Physiological compositing weights.  These are the two-decimal roundings of
#: normalize_weights(*CHANNEL_PULSE_STRENGTH); unlike the full-precision
#: quotients they sum to exactly one, and they are the canonical constants of
#: the additive model, so compositing and recovery both use this set.
PHYSIO_WEIGHTS = ColorWeights(0.23, 0.41, 0.36)

#: Naive single-channel alternative: all pulse energy in red.
RED_BASELINE_WEIGHTS = ColorWeights(1.0, 0.0, 0.0)


@dataclass(frozen=True)
class AnimationConfig:
    """Settings for one animation run."""

    gamma: float = DEFAULT_GAMMA
    bpm: float = 60.0
    duration_s: float = 10.0
    fps: float = 30.0
    waveform_mode: str = "physio"
    weight_mode: str = "physio"
    mask_mode: str = "file"

    def __post_init__(self):
        gamma = float(self.gamma)
        if not math.isfinite(gamma) or gamma < 0.0:
            raise InputError(f"gamma must be finite and >= 0, got {self.gamma}")
        bpm = float(self.bpm)
        if not math.isfinite(bpm) or not BPM_MIN <= bpm <= BPM_MAX:
            raise BpmRangeError(f"bpm {self.bpm} outside supported range [{BPM_MIN:g}, {BPM_MAX:g}]")
        duration = float(self.duration_s)
        if not math.isfinite(duration) or duration <= 0.0:
            raise InputError(f"duration_s must be positive and finite, got {self.duration_s}")
        fps = float(self.fps)
        if not math.isfinite(fps) or fps <= 0.0:
            raise InputError(f"fps must be positive and finite, got {self.fps}")
        if self.waveform_mode not in WAVEFORM_MODES:
            raise InputError(f"waveform_mode must be one of {WAVEFORM_MODES}, got {self.waveform_mode!r}")
        if self.weight_mode not in WEIGHT_MODES:
            raise InputError(f"weight_mode must be one of {WEIGHT_MODES}, got {self.weight_mode!r}")
        if self.mask_mode not in MASK_MODES:
            raise InputError(f"mask_mode must be one of {MASK_MODES}, got {self.mask_mode!r}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "bpm", bpm)
        object.__setattr__(self, "duration_s", duration)
        object.__setattr__(self, "fps", fps)

    @property
    def weights(self) -> ColorWeights:
        if self.weight_mode == "physio":
            return PHYSIO_WEIGHTS
        return RED_BASELINE_WEIGHTS

    @property
    def frame_count(self) -> int:
        """Number of frames a static source expands to."""
        return int(round(self.fps * self.duration_s))


def normalize_weights(w_r: float, w_g: float, w_b: float) -> ColorWeights:
    """Scale a raw non-negative weight triple so the components sum to one.

    Raises InvalidWeights when any component is negative or non-finite, or
    when all three are zero.
    """
    for name, value in zip(("w_r", "w_g", "w_b"), (w_r, w_g, w_b)):
        v = float(value)
        if not math.isfinite(v) or v < 0.0:
            raise InvalidWeights(f"{name} must be finite and >= 0, got {value}")
    total = float(w_r) + float(w_g) + float(w_b)
    if total <= 0.0:
        raise InvalidWeights("cannot normalize an all-zero weight triple")
    return ColorWeights(w_r / total, w_g / total, w_b / total)


def clamp01(value: float) -> float:
    """Clamp a real number into [0, 1]; non-finite input raises NumericError."""
    v = float(value)
    if not math.isfinite(v):
        raise NumericError(f"cannot clamp non-finite value {value}")
    return min(max(v, 0.0), 1.0)


def weighted_spatial_mean(frame: FrameBuffer, mask: PerfusionMask) -> tuple[float, float, float]:
    """Mask-weighted mean intensity of each channel.

    Returns (mean_r, mean_g, mean_b) where each component is
    sum(mask * channel) / sum(mask).  Raises DimensionError on mismatched
    shapes and EmptyMask when the mask weights sum to zero.
    """
    if (mask.height, mask.width) != (frame.height, frame.width):
        raise DimensionError(
            f"mask {mask.width}x{mask.height} does not match frame {frame.width}x{frame.height}"
        )
    total = mask.total
    if total <= 0.0:
        raise EmptyMask("mask has zero total weight")
    sums = np.tensordot(mask.weights, frame.pixels, axes=([0, 1], [0, 1]))
    means = sums / total
    return (float(means[0]), float(means[1]), float(means[2]))
