"""Exception types shared across the toolkit."""


class SoilLinkError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SoilLinkError, ValueError):
    """An input violates a model precondition (non-physical or out of domain)."""


class CalibrationError(SoilLinkError):
    """Calibration data is internally inconsistent (e.g. non-monotone anchors)."""


class OutOfRangeError(SoilLinkError):
    """A query falls outside the calibrated/tabulated range; never clamped silently."""


class NoDipError(SoilLinkError):
    """A trace contains no notch deeper than the detection threshold."""


class NoDefinedPatternError(SoilLinkError):
    """A bias point does not map onto any defined radiation pattern."""
