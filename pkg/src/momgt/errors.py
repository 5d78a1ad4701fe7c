"""Exception types shared across the package."""


class MomError(Exception):
    """Base class for all errors raised by momgt."""


class InvalidArgumentError(MomError, ValueError):
    pass


class ResourceLimitError(MomError):
    """A configured state or enumeration cap was exceeded."""


class NearSingularError(MomError, ArithmeticError):
    """A determinant or denominator fell below the numerical tolerance."""


class IntegrityError(MomError):
    """An exact certification step failed; this signals a counting bug."""
