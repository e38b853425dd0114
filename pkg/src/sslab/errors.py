"""Error taxonomy shared by every sslab module.

Three failure classes cover the whole library: bad inputs (DomainError),
requested accuracy not reachable with the given budget (AccuracyError,
which carries the tolerance actually achieved so callers can decide
whether to retry), and a method whose geometry degenerates for the given
parameters (MethodError, e.g. no valid separating contour).  File-format
problems get their own subclass of DomainError so loaders can be caught
narrowly.
"""

from __future__ import annotations


class SslabError(Exception):
    """Base class for all library errors."""


class DomainError(SslabError, ValueError):
    """Input outside the documented domain (pole hit, bad range, bad shape)."""


class AccuracyError(SslabError, RuntimeError):
    """Requested tolerance not met.

    Attributes
    ----------
    achieved : float
        Best relative error estimate actually reached.
    requested : float
        Tolerance that was asked for.
    suggestion : str
        Human-readable hint (e.g. a larger N or Y that should suffice).
    """

    def __init__(self, message: str, achieved: float, requested: float,
                 suggestion: str = ""):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested
        self.suggestion = suggestion


class MethodError(SslabError, RuntimeError):
    """Evaluation method degenerate for these parameters (caller may retry
    with a perturbed parameter or a different representation)."""


class DataFormatError(DomainError):
    """Malformed or failed-validation data file."""
