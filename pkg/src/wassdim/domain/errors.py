"""
Exception hierarchy for wassdim.

Every error raised by the library derives from WassdimError so callers can
catch the whole family at once. Precondition failures additionally derive from
ValueError, which keeps them compatible with plain numeric code.
"""

from typing import Optional


class WassdimError(Exception):
    """Base class for all wassdim errors."""


class InvalidInputError(WassdimError, ValueError):
    """An argument violates a documented precondition."""


class IdxFormatError(WassdimError, ValueError):
    """An IDX file has an unexpected magic number or header."""


class IdxLengthError(WassdimError, ValueError):
    """An IDX payload is shorter than its header announces."""


class GraphDisconnectedError(WassdimError):
    """A neighbor graph splits into more than one connected component."""

    def __init__(self, message: str, n_components: int):
        super().__init__(message)
        self.n_components = n_components


class NonDecreasingDecayError(WassdimError):
    """Wasserstein distances do not decrease with sample size."""


class InsufficientDataError(WassdimError, ValueError):
    """The source cloud is too small for the requested scales."""


class EstimationError(WassdimError):
    """A pipeline step failed; carries the scale at which it happened."""

    def __init__(self, message: str, scale: Optional[int] = None):
        prefix = f"scale k={scale}: " if scale is not None else ""
        super().__init__(f"{prefix}{message}")
        self.scale = scale


class ConfigError(WassdimError, ValueError):
    """An experiment configuration is malformed."""
