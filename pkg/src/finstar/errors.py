"""Exception types raised by finstar."""


class FinstarError(Exception):
    """Base class for all library errors."""


class ShapeError(FinstarError, ValueError):
    """Matrices with incompatible shapes were combined."""


class NotHermitianError(FinstarError, ValueError):
    """A self-adjoint input was required."""


class ClosureOverflowError(FinstarError):
    """The closure loop produced more than n**2 basis elements."""


class NotInAlgebraError(FinstarError, ValueError):
    """A matrix expected to lie in an algebra does not."""


class UnitNotFoundError(FinstarError):
    """The unit of a matrix algebra could not be solved for."""


class StateError(FinstarError, ValueError):
    """A functional is not a positive state on the algebra."""


class NotAProjectionError(FinstarError, ValueError):
    """Input is not a self-adjoint idempotent."""


class SplitFailureError(FinstarError):
    """Randomized corner splitting failed to split a non-minimal projection."""


class StructureError(FinstarError):
    """The recovered block structure is internally inconsistent."""


class AdmissibilityError(FinstarError, ValueError):
    """A point lies outside the domain of a nonexpansive map."""
