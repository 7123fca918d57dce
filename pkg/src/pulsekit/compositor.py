"""Compositing the pulse onto frames.

The model is additive and linear below the clamp: each channel gains
gamma * weight_c * mask_xy * pulse_t, then the result is clamped to [0, 1].
With gamma 0 the output is bit-identical to the input, and wherever the
mask is zero pixels pass through untouched.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    DimensionError,
    EmptyMask,
    InputError,
    MaskCountError,
    NumericError,
    SamplingError,
    TraceLengthError,
)
from .model import (
    AnimationConfig,
    ColorWeights,
    FrameBuffer,
    PerfusionMask,
    PulseTrace,
    VideoSequence,
)

#: Relative tolerance when comparing sample rates against the configured fps.
RATE_MATCH_RTOL = 1e-6


def augment_frame(
    frame: FrameBuffer,
    mask: PerfusionMask,
    pulse_value: float,
    gamma: float,
    weights: ColorWeights,
) -> FrameBuffer:
    """One frame of the additive model: out_c = clamp(in_c + g * w_c * M * p).

    The input frame is never modified.  Raises DimensionError when mask and
    frame disagree in size and EmptyMask when the mask is all zero.
    """
    if (mask.height, mask.width) != (frame.height, frame.width):
        raise DimensionError(
            f"mask {mask.width}x{mask.height} does not match frame "
            f"{frame.width}x{frame.height}"
        )
    if mask.total <= 0.0:
        raise EmptyMask("mask has zero total weight")
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise InputError(f"gamma must be finite and >= 0, got {gamma}")
    p = float(pulse_value)
    if not math.isfinite(p):
        raise NumericError(f"pulse value must be finite, got {pulse_value}")
    term = (gamma * p) * mask.weights[:, :, None] * weights.as_array()[None, None, :]
    return FrameBuffer(np.clip(frame.pixels + term, 0.0, 1.0))


def _rates_match(rate: float, fps: float) -> bool:
    return abs(rate - fps) <= RATE_MATCH_RTOL * fps


def animate(
    source: FrameBuffer | VideoSequence,
    masks: PerfusionMask | list[PerfusionMask] | tuple[PerfusionMask, ...],
    trace: PulseTrace,
    config: AnimationConfig,
) -> VideoSequence:
    """Drive augment_frame across a whole sequence.

    A single FrameBuffer source is replicated to round(fps * duration_s)
    frames (the static-portrait case); a VideoSequence is augmented frame
    by frame and must already run at config.fps.  The trace must be sampled
    at config.fps and cover every output frame, and the mask count must be
    one or the frame count.
    """
    if isinstance(source, FrameBuffer):
        frames = [source] * config.frame_count
    else:
        if not _rates_match(source.fps, config.fps):
            raise SamplingError(
                f"source fps {source.fps:g} does not match configured fps {config.fps:g}"
            )
        frames = list(source.frames)
    count = len(frames)
    if not _rates_match(trace.sample_rate, config.fps):
        raise SamplingError(
            f"trace sample rate {trace.sample_rate:g} does not match "
            f"configured fps {config.fps:g}"
        )
    if len(trace) < count:
        raise TraceLengthError(
            f"trace has {len(trace)} samples but {count} frames are needed"
        )
    if isinstance(masks, PerfusionMask):
        mask_list = [masks] * count
    else:
        mask_list = list(masks)
        if len(mask_list) == 1:
            mask_list = mask_list * count
        elif len(mask_list) != count:
            raise MaskCountError(
                f"need 1 or {count} masks, got {len(mask_list)}"
            )
    weights = config.weights
    out = [
        augment_frame(frame, mask_list[t], float(trace.samples[t]), config.gamma, weights)
        for t, frame in enumerate(frames)
    ]
    return VideoSequence(tuple(out), config.fps)
