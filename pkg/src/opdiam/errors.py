"""Exception types raised across the package."""


class OpDiamError(Exception):
    """Base class for all package errors."""


class ValidationError(OpDiamError, ValueError):
    """Input failed a structural precondition."""


class NonSquare(ValidationError):
    pass


class NonHermitian(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class NotNormal(ValidationError):
    """Matrix is not normal; use the numerical diameter instead."""


class NonSelfAdjoint(ValidationError):
    pass


class NotParaunital(ValidationError):
    pass


class NotScaledTP(ValidationError):
    pass


class NullSpaceTooLarge(ValidationError):
    pass


class UnknownExample(ValidationError):
    pass


class NotAnObservable(ValidationError):
    pass


class NotUCP(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class ResourceLimit(OpDiamError):
    """A requested dimension exceeds the configured cap."""


class InsufficientCertificates(OpDiamError):
    """A relation needs an upper bound that no certificate provides."""
