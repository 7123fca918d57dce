"""Exception types shared across the toolkit.

Every error raised by pulsekit derives from PulseKitError, so callers can
catch one base class at pipeline boundaries.  The CLI maps these onto its
exit-code contract.
"""


class PulseKitError(Exception):
    """Base class for all toolkit errors."""


class InvalidWeights(PulseKitError):
    """Color weight triple is negative, non-finite, or sums to zero."""


class NumericError(PulseKitError):
    """A value is non-finite or outside its numeric contract."""


class DimensionError(PulseKitError):
    """Array shapes do not match the operation's expectations."""


class EmptyMask(PulseKitError):
    """Mask has zero total weight, so spatial pooling is undefined."""


class PhaseError(PulseKitError):
    """Beat phase lies outside the normalized cycle [0, 1)."""


class BpmRangeError(PulseKitError):
    """Heart rate outside the supported range."""


class SamplingError(PulseKitError):
    """Sample timing is non-uniform or disagrees with the expected rate."""


class InputError(PulseKitError):
    """Malformed or inconsistent input data."""


class RoiError(PulseKitError):
    """Region of interest is degenerate or not contained in the frame."""


class TraceLengthError(PulseKitError):
    """Pulse trace has fewer samples than the frames to be animated."""


class MaskCountError(PulseKitError):
    """Mask count is neither one nor the frame count."""


class BandError(PulseKitError):
    """Frequency band is empty or extends past the Nyquist limit."""


class SignalLengthError(PulseKitError):
    """Signal is too short for spectral analysis."""


class NoPeak(PulseKitError):
    """No spectral peak found inside the physiological band."""
