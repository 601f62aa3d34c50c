"""Exception types raised across the package."""


class WeedSimError(Exception):
    """Base class for all weedsim errors."""


class EmptyPattern(WeedSimError):
    """An operation that needs at least one point received an empty pattern."""


class DegenerateGeometry(WeedSimError):
    """Fewer than two distinct points, or all points collinear."""


class GridMismatch(WeedSimError):
    """Raster regions with different origin or step cannot be combined."""


class NotNormalized(WeedSimError):
    """Intensity model used before its normalization constant was computed."""


class ZeroIntensity(WeedSimError):
    """The base intensity integrates to zero over the field."""


class BandwidthSelectionFailed(WeedSimError):
    """No bandwidth candidate produced a finite cross-validation likelihood."""


class LambdaMaxViolation(WeedSimError):
    """Rejection sampling encountered an intensity above the assumed maximum."""


class InvalidStart(WeedSimError):
    """The tool start point lies outside the field."""


class MissingMeasure(WeedSimError):
    """A strategy outcome lacks one of the requested performance measures."""


class AggregationMismatch(WeedSimError):
    """Attempted to aggregate run results from different scenarios."""


class IngestError(WeedSimError):
    """A data file could not be parsed.

    Carries the 1-based line number when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)
