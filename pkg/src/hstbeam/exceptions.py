"""Exception types raised by hstbeam.

All of them subclass :class:`ValueError` so callers that only care about
"bad input" can catch that.
"""


class HSTBeamError(ValueError):
    """Base class for every error raised by this package."""


class ConfigError(HSTBeamError):
    """An array, geometry or run configuration value is invalid."""


class OutOfCoverageError(HSTBeamError):
    """The base-station angle lies outside the sector tiled by the beams."""


class DegenerateGeometryError(HSTBeamError):
    """The angle is too close to 0 or pi for a finite rail intercept."""


class StructuralLimitError(HSTBeamError):
    """The BS is abreast of the train; the beam count cannot help there."""


class DualityError(HSTBeamError):
    """A spacing/beam-count rescaling does not give an integral beam count."""


class ResolutionError(HSTBeamError):
    """The angular sampling is too coarse to resolve the main lobe."""
