"""Exception hierarchy shared by every wulffkit module."""


class WulffkitError(Exception):
    """Base class for all library errors."""


class DegenerateInput(WulffkitError):
    """Points or bodies that are not full-dimensional."""


class UnboundedBody(WulffkitError):
    """Half-space system whose intersection is unbounded."""


class OriginNotInterior(WulffkitError):
    """Polarity requested for a body without the origin in its interior."""


class MeasureError(WulffkitError, ValueError):
    """Invalid discrete measure or weight function."""


class AlignmentError(MeasureError):
    """Weight function and measure have different support sizes."""


class GenerationFailed(WulffkitError):
    """Random instance generator exhausted its retry budget."""


class NotNormalized(WulffkitError):
    """Lift requested for a measure/function pair that is not isotropic,
    f-centered and unit-normed."""


class NotIsotropic(WulffkitError):
    pass


class HypothesisViolated(WulffkitError):
    pass


class DisplacementNotZero(WulffkitError):
    pass


class NotEven(WulffkitError):
    pass


class SolverFailure(WulffkitError):
    pass


class SingularM(WulffkitError):
    pass


class NotInJohnPosition(WulffkitError):
    pass


class CentroidNotAtOrigin(WulffkitError):
    pass


class DomainError(WulffkitError, ValueError):
    pass


class SchemaError(WulffkitError, ValueError):
    """Malformed measure file; the message names the offending field/index."""
