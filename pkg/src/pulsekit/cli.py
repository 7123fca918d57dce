"""Command-line surface of the toolkit.

Subcommands
    pulse     synthesize a pulse trace CSV
    mask      segment skin or ingest a perfusion heat map
    animate   composite a pulse onto an image or frame sequence
    verify    recover the pulse from an animated sequence
    scanline  render a space-time column image

Exit codes: 0 success, 2 usage or validation error, 3 processing error,
4 no pulse signal found.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .compositor import animate
from .errors import (
    BpmRangeError,
    EmptyMask,
    InputError,
    NoPeak,
    PulseKitError,
    RoiError,
)
from .mask import FaceRoi, normalize_mask, segment_skin, smooth_mask
from .model import DEFAULT_GAMMA, AnimationConfig, VideoSequence
from .pulse import load_trace, synth_physio, synth_sine
from .recover import verify
from .scanline import build_scanline, pixel_series

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PROCESSING = 3
EXIT_NO_SIGNAL = 4

_FALLBACK_FPS = 30.0


class _UsageError(Exception):
    """Flag or input validation failure; maps to exit code 2."""


def _parse_roi(text: str) -> FaceRoi:
    parts = text.split(",")
    if len(parts) != 4:
        raise _UsageError(f"--roi: expected x,y,w,h integers, got {text!r}")
    try:
        x, y, w, h = (int(p) for p in parts)
    except ValueError:
        raise _UsageError(f"--roi: expected x,y,w,h integers, got {text!r}") from None
    try:
        return FaceRoi(x, y, w, h)
    except RoiError as exc:
        raise _UsageError(f"--roi: {type(exc).__name__}: {exc}") from exc


def _load_input(action, flag: str):
    """Run a loader, mapping any toolkit error onto exit code 2."""
    try:
        return action()
    except FileNotFoundError as exc:
        raise _UsageError(f"{flag}: file not found: {exc.filename or exc}") from exc
    except OSError as exc:
        raise _UsageError(f"{flag}: cannot read input: {exc}") from exc
    except PulseKitError as exc:
        raise _UsageError(f"{flag}: {type(exc).__name__}: {exc}") from exc


def cmd_pulse(args) -> int:
    if not args.fps > 0:
        raise _UsageError(f"--fps: must be positive, got {args.fps:g}")
    if not args.duration > 0:
        raise _UsageError(f"--duration: must be positive, got {args.duration:g}")
    try:
        if args.waveform == "sine":
            trace = synth_sine(args.bpm, args.fps, args.duration)
        else:
            trace = synth_physio(args.bpm, args.fps, args.duration)
    except BpmRangeError as exc:
        raise _UsageError(f"--bpm: {type(exc).__name__}: {exc}") from exc
    except InputError as exc:
        raise _UsageError(f"--fps/--duration: {type(exc).__name__}: {exc}") from exc
    io.write_trace(args.out, trace)
    print(f"wrote {len(trace)} samples at {trace.sample_rate:g} Hz to {args.out}")
    return EXIT_OK


def cmd_mask(args) -> int:
    if args.roi is not None:
        if args.input is None:
            raise _UsageError("--roi: requires --input with the frame to segment")
        roi = _parse_roi(args.roi)
        frame = _load_input(lambda: io.read_image_rgb(args.input), "--input")
        try:
            result = segment_skin(frame, roi)
        except RoiError as exc:
            raise _UsageError(f"--roi: {type(exc).__name__}: {exc}") from exc
    else:
        loaded = _load_input(lambda: io.read_mask_image(args.load), "--load")
        try:
            result = normalize_mask(loaded)
        except EmptyMask as exc:
            raise _UsageError(f"--load: {type(exc).__name__}: {exc}") from exc
    if args.smooth < 0:
        raise _UsageError(f"--smooth: must be >= 0, got {args.smooth:g}")
    result = _stage(lambda: smooth_mask(result, args.smooth), "smooth")
    io.write_mask_image(args.out, result)
    print(f"wrote {result.width}x{result.height} mask to {args.out}")
    return EXIT_OK


def _stage(action, name: str):
    """Run a processing step, tagging toolkit errors with the stage name."""
    try:
        return action()
    except NoPeak:
        raise
    except PulseKitError as exc:
        exc.stage = name
        raise


def _read_video(frames_dir, flag_fps, *, need_fps: bool) -> tuple[VideoSequence, io.Manifest | None]:
    frames, manifest = _load_input(lambda: io.read_frames(frames_dir), "--frames")
    try:
        fps = io.resolve_fps(manifest, flag_fps)
    except InputError as exc:
        if need_fps:
            raise _UsageError(f"--fps: {type(exc).__name__}: {exc}") from exc
        fps = _FALLBACK_FPS
    return VideoSequence(tuple(frames), fps), manifest


def cmd_animate(args) -> int:
    if not args.gamma >= 0:
        raise _UsageError(f"--gamma: must be >= 0, got {args.gamma:g}")
    rows = _load_input(lambda: io.read_trace_rows(args.pulse), "--pulse")
    trace = _load_input(lambda: load_trace(rows), "--pulse")
    if args.image is not None:
        source = _load_input(lambda: io.read_image_rgb(args.image), "--image")
        fps = args.fps if args.fps is not None else _FALLBACK_FPS
        duration = args.duration
    else:
        video, _ = _read_video(args.frames, args.fps, need_fps=True)
        source = video
        fps = video.fps
        duration = len(video) / fps
    if args.mask is not None:
        masks = _load_input(lambda: io.read_mask_image(args.mask), "--mask")
    else:
        masks = _load_input(lambda: io.read_mask_dir(args.mask_dir), "--mask-dir")
    weight_mode = "physio" if args.weights == "physio" else "red-baseline"
    try:
        config = AnimationConfig(
            gamma=args.gamma,
            bpm=trace.nominal_bpm,
            duration_s=duration,
            fps=fps,
            waveform_mode="file",
            weight_mode=weight_mode,
            mask_mode="file",
        )
    except PulseKitError as exc:
        raise _UsageError(f"{type(exc).__name__}: {exc}") from exc
    video_out = _stage(lambda: animate(source, masks, trace, config), "animate")
    manifest = io.Manifest(
        fps=config.fps,
        width=video_out.width,
        height=video_out.height,
        frame_count=len(video_out),
        gamma=config.gamma,
        bpm=trace.nominal_bpm,
        waveform_mode=config.waveform_mode,
        weight_mode=config.weight_mode,
    )
    _stage(lambda: io.write_frames(args.out, video_out, manifest), "write")
    print(f"wrote {len(video_out)} frames to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    video, _ = _read_video(args.frames, args.fps, need_fps=True)
    mask = _load_input(lambda: io.read_mask_image(args.mask), "--mask")
    try:
        report = _stage(lambda: verify(video, mask), "verify")
    except NoPeak:
        if args.out:
            Path(args.out).write_text("error=NoPeak\n")
        raise
    if args.out:
        io.write_report(args.out, report)
    sys.stdout.write(io.format_report(report))
    return EXIT_OK


def cmd_scanline(args) -> int:
    video, _ = _read_video(args.frames, None, need_fps=False)
    if not 0 <= args.column < video.width:
        raise _UsageError(f"--column: {args.column} outside frame width {video.width}")
    if not args.magnify >= 0:
        raise _UsageError(f"--magnify: must be >= 0, got {args.magnify:g}")
    image = _stage(lambda: build_scanline(video, args.column, args.magnify), "scanline")
    io.write_scanline_image(args.out, image)
    print(f"wrote {image.shape[1]}x{image.shape[0]} scanline to {args.out}")
    if args.trace_out:
        row = args.row if args.row is not None else video.height // 2
        if not 0 <= row < video.height:
            raise _UsageError(f"--row: {row} outside frame height {video.height}")
        series = pixel_series(video, args.column, row)
        times = np.arange(len(video)) / video.fps
        io.write_pixel_trace(args.trace_out, times, series)
        print(f"wrote pixel ({args.column}, {row}) trace to {args.trace_out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulsekit",
        description="Animate blood-flow appearance on face images and verify the injected pulse.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pulse", help="synthesize a pulse trace CSV")
    p.add_argument("--bpm", type=float, default=60.0, help="heart rate in beats per minute")
    p.add_argument("--fps", type=float, default=30.0, help="samples per second")
    p.add_argument("--duration", type=float, default=10.0, help="trace length in seconds")
    p.add_argument(
        "--waveform",
        choices=("physio", "sine"),
        default="physio",
        help="beat morphology: physiological template or matched sine",
    )
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_pulse)

    p = sub.add_parser("mask", help="segment skin or ingest a perfusion heat map")
    p.add_argument("--input", help="RGB frame to segment (with --roi)")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--roi", metavar="X,Y,W,H", help="face region to segment within --input")
    source.add_argument("--load", help="grayscale heat map to ingest and normalize")
    p.add_argument("--smooth", type=float, default=0.0, help="feathering radius in pixels")
    p.add_argument("--out", required=True, help="output mask PNG path")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("animate", help="composite a pulse onto an image or frame sequence")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--image", help="static RGB portrait to animate")
    source.add_argument("--frames", help="directory of frames to augment")
    masks = p.add_mutually_exclusive_group(required=True)
    masks.add_argument("--mask", help="single mask PNG applied to every frame")
    masks.add_argument("--mask-dir", help="directory of per-frame mask_NNNNNN.png files")
    p.add_argument("--pulse", required=True, help="pulse trace CSV (see the pulse command)")
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA, help="pulse strength")
    p.add_argument(
        "--weights",
        choices=("physio", "red"),
        default="physio",
        help="color weighting: physiological triple or red-only baseline",
    )
    p.add_argument("--fps", type=float, default=None, help="output frame rate")
    p.add_argument(
        "--duration", type=float, default=10.0, help="output length in seconds (static image source)"
    )
    p.add_argument("--out", required=True, help="output frame directory")
    p.set_defaults(func=cmd_animate)

    p = sub.add_parser("verify", help="recover the pulse from an animated sequence")
    p.add_argument("--frames", required=True, help="directory of frames to analyze")
    p.add_argument("--mask", required=True, help="mask PNG for spatial pooling")
    p.add_argument("--fps", type=float, default=None, help="frame rate (read from manifest if present)")
    p.add_argument("--out", help="report file of key=value lines")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scanline", help="render a space-time column image")
    p.add_argument("--frames", required=True, help="directory of frames to visualize")
    p.add_argument("--column", type=int, required=True, help="pixel column to track")
    p.add_argument("--magnify", type=float, default=1.0, help="temporal deviation amplification")
    p.add_argument("--row", type=int, default=None, help="pixel row for --trace-out (default: middle)")
    p.add_argument("--out", required=True, help="output scanline PNG path")
    p.add_argument("--trace-out", help="optional CSV of one pixel's t,r,g,b values")
    p.set_defaults(func=cmd_scanline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoPeak as exc:
        print(f"no signal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NO_SIGNAL
    except PulseKitError as exc:
        stage = getattr(exc, "stage", "processing")
        print(f"error [{stage}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PROCESSING
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
