"""Exception types shared across the package."""


class KacLevyError(Exception):
    """Base class for all package errors."""


class InvalidParams(KacLevyError, ValueError):
    """Parameters violate a model invariant."""


class UnsupportedDomain(KacLevyError, ValueError):
    """A transform was requested outside the argument domain where it is finite."""


class WrongVariant(KacLevyError, TypeError):
    """Operation requires the other restart regime (renewal vs jump)."""


class InvalidCase(KacLevyError, ValueError):
    """No closed form is available for the requested parameter case."""
