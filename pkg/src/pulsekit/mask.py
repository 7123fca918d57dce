"""Spatial weighting of the pulse: skin segmentation and mask conditioning.

Segmentation uses a histogram-mode rule on the region of interest: a pixel
counts as skin when each of its three channel values lies within half a
standard deviation of that channel's modal value.  The rule needs no
training data and behaves well on the near-unimodal color distribution of
a face crop, where non-skin pixels (hair, eyes, background) sit far from
the mode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter1d

from .errors import DimensionError, EmptyMask, InputError, RoiError
from .model import FrameBuffer, PerfusionMask

#: Histogram resolution used to find the per-channel modal value.
HIST_BINS = 256

#: Channel standard deviations below this are treated as degenerate.
_DEGENERATE_STD = 1e-12

#: Minimum region-of-interest side length, in pixels.
MIN_ROI_SIDE = 8


@dataclass(frozen=True)
class FaceRoi:
    """Axis-aligned region of interest: top-left corner plus size."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            value = getattr(self, name)
            if int(value) != value:
                raise RoiError(f"roi {name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.x < 0 or self.y < 0:
            raise RoiError(f"roi corner ({self.x}, {self.y}) must be non-negative")
        if self.w < MIN_ROI_SIDE or self.h < MIN_ROI_SIDE:
            raise RoiError(
                f"roi size {self.w}x{self.h} is below the minimum "
                f"{MIN_ROI_SIDE}x{MIN_ROI_SIDE}"
            )


def _bin_index(values: np.ndarray) -> np.ndarray:
    # np.histogram over [0, 1] puts v in bin floor(v * HIST_BINS), with 1.0
    # folded into the last bin.
    return np.clip(np.floor(values * HIST_BINS).astype(int), 0, HIST_BINS - 1)


def segment_skin(frame: FrameBuffer, roi: FaceRoi) -> PerfusionMask:
    """Binary skin mask from the half-sigma histogram-mode rule.

    For each channel, the modal value is the center of the most populated
    of 256 equal bins over [0, 1] (ties resolve to the lowest bin) and the
    spread is the standard deviation of the raw values.  A pixel inside the
    roi is selected if and only if every channel value is within half a
    standard deviation of that channel's mode; everything outside the roi
    is zero.  A channel with (numerically) zero spread degenerates to exact
    modal-bin membership and emits a warning.
    """
    if roi.x + roi.w > frame.width or roi.y + roi.h > frame.height:
        raise RoiError(
            f"roi {roi.w}x{roi.h}+{roi.x}+{roi.y} is not contained in the "
            f"{frame.width}x{frame.height} frame"
        )
    region = frame.pixels[roi.y : roi.y + roi.h, roi.x : roi.x + roi.w, :]
    selected = np.ones((roi.h, roi.w), dtype=bool)
    for c in range(3):
        values = region[:, :, c]
        counts, _ = np.histogram(values.ravel(), bins=HIST_BINS, range=(0.0, 1.0))
        mode_bin = int(np.argmax(counts))
        mode = (mode_bin + 0.5) / HIST_BINS
        spread = float(values.std())
        if spread < _DEGENERATE_STD:
            warnings.warn(
                f"channel {c} of the roi has zero spread; selecting exact modal pixels",
                stacklevel=2,
            )
            selected &= _bin_index(values) == mode_bin
        else:
            selected &= np.abs(values - mode) <= spread / 2.0
    weights = np.zeros((frame.height, frame.width))
    weights[roi.y : roi.y + roi.h, roi.x : roi.x + roi.w] = selected.astype(np.float64)
    return PerfusionMask(weights)


def load_mask(gray) -> PerfusionMask:
    """Turn a single-plane grid of 8-bit values into weights via v / 255."""
    arr = np.asarray(gray)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D grayscale grid, got shape {arr.shape}")
    return PerfusionMask(arr.astype(np.float64) / 255.0)


def smooth_mask(mask: PerfusionMask, radius: float) -> PerfusionMask:
    """Feather mask edges with a repeated separable box blur.

    ceil(radius) passes of a (2 * ceil(radius) + 1)-wide box mean run along
    each axis, with edge values clamped (replicated); the result is
    re-clamped to [0, 1].  radius 0 is the identity.  The blur preserves
    total mask mass whenever the support stays clear of the borders.
    """
    r = float(radius)
    if not r >= 0.0:
        raise InputError(f"radius must be >= 0, got {radius}")
    passes = int(np.ceil(r))
    if passes == 0:
        return mask
    window = 2 * passes + 1
    weights = np.array(mask.weights)
    for _ in range(passes):
        weights = uniform_filter1d(weights, size=window, axis=1, mode="nearest")
        weights = uniform_filter1d(weights, size=window, axis=0, mode="nearest")
    return PerfusionMask(np.clip(weights, 0.0, 1.0))


def normalize_mask(mask: PerfusionMask) -> PerfusionMask:
    """Scale weights so the largest equals one; all-zero masks raise EmptyMask.

    Idempotent: normalizing twice changes nothing.
    """
    peak = float(mask.weights.max())
    if peak <= 0.0:
        raise EmptyMask("cannot normalize an all-zero mask")
    return PerfusionMask(mask.weights / peak)
