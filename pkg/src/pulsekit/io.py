"""File formats at the toolkit boundary.

Frames travel as directories of lossless 8-bit RGB PNGs named
frame_000000.png, frame_000001.png, ... with an optional manifest.json
describing provenance; masks are single-channel 8-bit grayscale PNGs (a
directory of per-frame masks uses mask_NNNNNN.png); pulse traces are CSV
files with a `t,value` header; recovery reports are plain key=value lines.

8-bit samples map to v / 255 on read and round(v * 255) on write.  Numbers
in CSVs carry 12 significant digits so round trips stay within 1e-9.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InputError
from .model import FrameBuffer, PerfusionMask, PulseTrace, VideoSequence
from .recover import RecoveryReport

MANIFEST_NAME = "manifest.json"
_FRAME_RE = re.compile(r"^frame_(\d{6})\.png$")
_MASK_RE = re.compile(r"^mask_(\d{6})\.png$")

_MANIFEST_KEYS = (
    "fps",
    "width",
    "height",
    "frame_count",
    "gamma",
    "bpm",
    "waveform_mode",
    "weight_mode",
)


@dataclass(frozen=True)
class Manifest:
    """Provenance of an animated frame directory."""

    fps: float
    width: int
    height: int
    frame_count: int
    gamma: float
    bpm: float
    waveform_mode: str
    weight_mode: str


def frame_name(index: int) -> str:
    return f"frame_{index:06d}.png"


def mask_name(index: int) -> str:
    return f"mask_{index:06d}.png"


def to_uint8(values: np.ndarray) -> np.ndarray:
    """Quantize [0, 1] intensities to 8-bit by round(v * 255)."""
    return np.rint(np.asarray(values) * 255.0).astype(np.uint8)


def from_uint8(values: np.ndarray) -> np.ndarray:
    """Map 8-bit samples to [0, 1] intensities by v / 255."""
    return np.asarray(values).astype(np.float64) / 255.0


def read_image_rgb(path) -> FrameBuffer:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"))
    return FrameBuffer(from_uint8(arr))


def write_image_rgb(path, frame: FrameBuffer) -> None:
    Image.fromarray(to_uint8(frame.pixels), mode="RGB").save(path, format="PNG")


def read_mask_image(path) -> PerfusionMask:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    return PerfusionMask(from_uint8(arr))


def write_mask_image(path, mask: PerfusionMask) -> None:
    Image.fromarray(to_uint8(mask.weights), mode="L").save(path, format="PNG")


def write_scanline_image(path, image: np.ndarray) -> None:
    """Write an (height, width, 3) float image in [0, 1] as RGB PNG."""
    Image.fromarray(to_uint8(image), mode="RGB").save(path, format="PNG")


def _indexed_files(directory: Path, pattern: re.Pattern, kind: str) -> list[Path]:
    found = {}
    for entry in directory.iterdir():
        match = pattern.match(entry.name)
        if match:
            found[int(match.group(1))] = entry
    if not found:
        raise InputError(f"no {kind} files found in {directory}")
    count = len(found)
    missing = sorted(set(range(count)) - set(found))
    if missing or max(found) != count - 1:
        raise InputError(
            f"{kind} files in {directory} are not contiguous from index 000000"
        )
    return [found[i] for i in range(count)]


def write_frames(directory, video: VideoSequence, manifest: Manifest | None = None) -> None:
    """Write a frame directory, plus its manifest when one is given."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(video.frames):
        write_image_rgb(directory / frame_name(i), frame)
    if manifest is not None:
        write_manifest(directory / MANIFEST_NAME, manifest)


def read_frames(directory) -> tuple[list[FrameBuffer], Manifest | None]:
    """Read a frame directory and its manifest, if present.

    Frames must be contiguously numbered from 000000 and share one size;
    when a manifest exists its frame_count and geometry must agree with the
    directory contents.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"{directory} is not a directory")
    files = _indexed_files(directory, _FRAME_RE, "frame")
    frames = [read_image_rgb(f) for f in files]
    size = (frames[0].height, frames[0].width)
    for i, frame in enumerate(frames):
        if (frame.height, frame.width) != size:
            raise InputError(
                f"{files[i].name} is {frame.width}x{frame.height}, others are "
                f"{size[1]}x{size[0]}"
            )
    manifest = None
    manifest_path = directory / MANIFEST_NAME
    if manifest_path.exists():
        manifest = read_manifest(manifest_path)
        if manifest.frame_count != len(frames):
            raise InputError(
                f"manifest says {manifest.frame_count} frames but directory "
                f"holds {len(frames)}"
            )
        if (manifest.height, manifest.width) != size:
            raise InputError(
                f"manifest says {manifest.width}x{manifest.height} but frames "
                f"are {size[1]}x{size[0]}"
            )
    return frames, manifest


def read_mask_dir(directory) -> list[PerfusionMask]:
    """Read a directory of mask_NNNNNN.png files, contiguous from 000000."""
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"{directory} is not a directory")
    return [read_mask_image(f) for f in _indexed_files(directory, _MASK_RE, "mask")]


def resolve_fps(manifest: Manifest | None, flag_fps: float | None) -> float:
    """Reconcile a --fps flag with a manifest; both present must agree."""
    if manifest is not None and flag_fps is not None:
        if abs(manifest.fps - flag_fps) > 1e-6 * max(manifest.fps, flag_fps):
            raise InputError(
                f"fps flag {flag_fps:g} disagrees with manifest fps {manifest.fps:g}"
            )
        return manifest.fps
    if manifest is not None:
        return manifest.fps
    if flag_fps is not None:
        return float(flag_fps)
    raise InputError("no manifest found; pass --fps explicitly")


def write_manifest(path, manifest: Manifest) -> None:
    payload = asdict(manifest)
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def read_manifest(path) -> Manifest:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise InputError(f"manifest {path} must hold a JSON object")
    missing = [k for k in _MANIFEST_KEYS if k not in payload]
    if missing:
        raise InputError(f"manifest {path} is missing keys: {', '.join(missing)}")
    try:
        return Manifest(
            fps=float(payload["fps"]),
            width=int(payload["width"]),
            height=int(payload["height"]),
            frame_count=int(payload["frame_count"]),
            gamma=float(payload["gamma"]),
            bpm=float(payload["bpm"]),
            waveform_mode=str(payload["waveform_mode"]),
            weight_mode=str(payload["weight_mode"]),
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"manifest {path} holds malformed values: {exc}") from exc


def write_trace(path, trace: PulseTrace) -> None:
    """Write a pulse trace as CSV with a `t,value` header."""
    lines = ["t,value"]
    for i, sample in enumerate(trace.samples):
        t = i / trace.sample_rate
        lines.append(f"{t:.12g},{sample:.12g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace_rows(path) -> list[tuple[float, float]]:
    """Parse a trace CSV into (time_s, value) rows; header must be `t,value`."""
    text = Path(path).read_text()
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or lines[0].replace(" ", "") != "t,value":
        raise InputError(f"trace {path} must start with a `t,value` header")
    rows = []
    for number, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise InputError(f"trace {path} line {number}: expected two columns")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise InputError(f"trace {path} line {number}: {exc}") from exc
    return rows


def write_pixel_trace(path, times: np.ndarray, series: np.ndarray) -> None:
    """Write one pixel's RGB time series as CSV with a `t,r,g,b` header."""
    lines = ["t,r,g,b"]
    for t, (r, g, b) in zip(times, series):
        lines.append(f"{t:.12g},{r:.12g},{g:.12g},{b:.12g}")
    Path(path).write_text("\n".join(lines) + "\n")


def format_report(report: RecoveryReport) -> str:
    return (
        f"bpm={report.bpm_estimate:.6f}\n"
        f"snr_db={report.snr_db:.6f}\n"
        f"peak_freq_hz={report.peak_freq_hz:.6f}\n"
    )


def write_report(path, report: RecoveryReport) -> None:
    Path(path).write_text(format_report(report))


def read_report(path) -> dict[str, str]:
    """Parse key=value report lines into a dict (values stay strings)."""
    entries = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"report {path}: malformed line {line!r}")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    return entries
