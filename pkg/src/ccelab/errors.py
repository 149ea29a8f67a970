"""Exception types shared across the package."""


class CCEError(Exception):
    """Base class for all errors raised by ccelab."""


class InputError(CCEError, ValueError):
    """Malformed or inconsistent input (bad index, wrong dimension, invalid distribution)."""


class ResourceError(CCEError):
    """An enumeration would exceed its configured size cap."""


class CapabilityError(CCEError):
    """The requested procedure does not apply to the given inputs (e.g. open or non-convex C)."""


class DomainError(CCEError, ValueError):
    """An argument lies outside the domain of a function (e.g. an infeasible deviation map)."""
