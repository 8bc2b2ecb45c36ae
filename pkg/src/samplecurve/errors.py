"""Exception hierarchy.

``PreconditionError`` subclasses signal bad input (CLI exit code 2);
``EstimationError`` subclasses signal that the data did not support the
requested recovery (CLI exit code 3).
"""


class SampleCurveError(Exception):
    pass


class PreconditionError(SampleCurveError, ValueError):
    pass


class EstimationError(SampleCurveError):
    pass


class InvalidSpec(PreconditionError):
    pass


class TooFewTrains(PreconditionError):
    pass


class DimensionTooSmall(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class BandViolation(PreconditionError):
    pass


class NoOverlap(PreconditionError):
    pass


class NoGroundTruth(PreconditionError):
    pass


class OrderingFailed(EstimationError):
    pass


class MatchFailed(EstimationError):
    pass


class NotAHomeomorphism(EstimationError):
    pass


class NotCovering(EstimationError):
    pass


class Unconverged(EstimationError):
    pass


class RationalRatioSuspected(EstimationError):
    pass
