"""Exception hierarchy shared by every module.

The CLI maps these onto its exit codes, so keep the classes distinct.
"""


class BosonBoundError(Exception):
    """Base class for library errors."""


class DomainError(BosonBoundError, ValueError):
    """Inputs outside an operation's mathematical domain."""


class SizeError(BosonBoundError, ValueError):
    """A configured size cap would be exceeded."""


class ValidationError(BosonBoundError, ValueError):
    """A numerical precondition (e.g. unitarity) failed."""


class UnsupportedError(BosonBoundError):
    """The requested computation has no available reference path."""
