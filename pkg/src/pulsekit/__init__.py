"""pulsekit: animate blood-flow appearance on faces and verify the result.

The toolkit adds a physiologically weighted, mask-shaped, pulse-shaped
term to the RGB channels of face images, and recovers the injected pulse
from the output with a plain imaging-photoplethysmography reader.
"""

from .compositor import animate, augment_frame
from .errors import (
    BandError,
    BpmRangeError,
    DimensionError,
    EmptyMask,
    InputError,
    InvalidWeights,
    MaskCountError,
    NoPeak,
    NumericError,
    PhaseError,
    PulseKitError,
    RoiError,
    SamplingError,
    SignalLengthError,
    TraceLengthError,
)
from .mask import FaceRoi, load_mask, normalize_mask, segment_skin, smooth_mask
from .model import (
    BPM_MAX,
    BPM_MIN,
    CHANNEL_PULSE_STRENGTH,
    DEFAULT_GAMMA,
    PHYSIO_WEIGHTS,
    RED_BASELINE_WEIGHTS,
    VISUALIZATION_GAMMA,
    AnimationConfig,
    ColorWeights,
    FrameBuffer,
    PerfusionMask,
    PulseTrace,
    VideoSequence,
    clamp01,
    normalize_weights,
    weighted_spatial_mean,
)
from .pulse import (
    DEFAULT_TEMPLATE,
    BeatTemplate,
    beat_value,
    load_trace,
    retune,
    synth_physio,
    synth_sine,
)
from .recover import (
    RecoveryReport,
    bandpass,
    detrend,
    estimate_bpm,
    extract_signal,
    snr,
    verify,
)
from .scanline import build_scanline, pixel_series

__version__ = "0.1.0"
