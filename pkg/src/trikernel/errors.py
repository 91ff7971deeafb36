"""Exception types raised across the package."""


class TrikernelError(Exception):
    """Base class for every error raised by trikernel."""

    exit_code = 2


class ValidationError(TrikernelError):
    """Input rejected before any computation started."""

    exit_code = 2


class NumericError(TrikernelError):
    """A numerical tolerance or convergence check failed."""

    exit_code = 3


# model
class DegenerateModel(ValidationError):
    pass


# enumerate
class StartOutsideDomain(ValidationError):
    pass


class HypothesisViolated(ValidationError):
    pass


# pseries
class DivisionByZeroSeries(NumericError):
    pass


class NonSquareLeading(NumericError):
    pass


class NoConvergence(NumericError):
    pass


# kernel
class StepsTooLarge(ValidationError):
    pass


class ClassificationFailure(NumericError):
    pass


class LeadingCoefficientVanishes(NumericError):
    def __init__(self, message, root=None):
        super().__init__(message)
        self.root = root


# geometry
class OnCurve(NumericError):
    pass


class PhaseJumpTooLarge(NumericError):
    pass


# conformal
class EvaluationAtPole(NumericError):
    pass


class PoleAlreadyAtY2(ValidationError):
    pass


class QuadratureNotConverged(NumericError):
    pass


class InversionOutsideFundamentalDomain(NumericError):
    pass


class BranchPointImageInfinite(ValidationError):
    pass


# bvp
class TruncationTailTooLarge(NumericError):
    pass


class PointTooCloseToContour(NumericError):
    pass


class IndexMismatch(NumericError):
    pass


class BranchDiscontinuity(NumericError):
    pass


class TruncationInsufficient(NumericError):
    pass


class KernelZero(NumericError):
    pass


class ConvergenceDomainViolated(ValidationError):
    pass
