import numpy as np
import pytest

from pulsekit import FrameBuffer, PerfusionMask
from pulsekit.cli import main


def make_face(height=64, width=64, seed=11, lo=0.3, hi=0.7):
    """Deterministic synthetic portrait with skin-like tones and mild texture.

    Values stay inside [lo, hi] so study-strength augmentation never clamps.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    shade = 0.06 * np.sin(2.0 * np.pi * yy / height) * np.cos(np.pi * xx / width)
    base = np.empty((height, width, 3))
    base[:, :, 0] = 0.58 + shade
    base[:, :, 1] = 0.46 + shade
    base[:, :, 2] = 0.40 + shade
    base += rng.normal(0.0, 0.015, size=base.shape)
    return FrameBuffer(np.clip(base, lo, hi))


def all_ones_mask(height=64, width=64):
    return PerfusionMask(np.ones((height, width)))


def run_cli(args):
    """Invoke the CLI in-process and return its exit code."""
    try:
        return main([str(a) for a in args])
    except SystemExit as exc:  # argparse handles usage errors itself
        return int(exc.code or 0)


@pytest.fixture
def face():
    return make_face()


@pytest.fixture
def ones_mask():
    return all_ones_mask()
