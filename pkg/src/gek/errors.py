"""Exception types shared across the package."""


class GekError(Exception):
    """Base class for all package errors."""


class DomainError(GekError, ValueError):
    """Input outside the mathematical domain of an operation."""


class RangeError(GekError, OverflowError):
    """Result not representable in double precision."""


class StructureError(GekError, ValueError):
    """Matrix input lacks the required structure (shape, antisymmetry)."""


class ConvergenceError(GekError, RuntimeError):
    """Quadrature or iteration failed to reach the requested tolerance."""


class CapacityError(GekError, ValueError):
    """Requested problem size exceeds the supported limits."""


class UsageError(GekError, ValueError):
    """Invalid combination of options."""
