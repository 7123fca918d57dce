"""Space-time scanline visualization.

Stacking one pixel column from every frame along a time axis turns the
periodic intensity change into visible stripes.  Temporal deviation from
each pixel's mean can be amplified to make study-strength output readable
by eye.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError
from .model import VideoSequence


def build_scanline(video: VideoSequence, column: int, magnify: float = 1.0) -> np.ndarray:
    """Space-time image of one column: shape (height, frame_count, 3).

    Output column t holds frame t's pixel column, with each pixel's temporal
    deviation from its own mean scaled by magnify and the result clamped to
    [0, 1].  magnify 1 reproduces the source values.
    """
    if not 0 <= int(column) < video.width:
        raise InputError(f"column {column} outside frame width {video.width}")
    k = float(magnify)
    if not (math.isfinite(k) and k >= 0.0):
        raise InputError(f"magnify must be finite and >= 0, got {magnify}")
    columns = np.stack([frame.pixels[:, int(column), :] for frame in video.frames], axis=1)
    mean = columns.mean(axis=1, keepdims=True)
    return np.clip(mean + k * (columns - mean), 0.0, 1.0)


def pixel_series(video: VideoSequence, x: int, y: int) -> np.ndarray:
    """RGB time series of one pixel: shape (frame_count, 3)."""
    if not 0 <= int(x) < video.width:
        raise InputError(f"x {x} outside frame width {video.width}")
    if not 0 <= int(y) < video.height:
        raise InputError(f"y {y} outside frame height {video.height}")
    return np.stack([frame.pixels[int(y), int(x), :] for frame in video.frames], axis=0)
