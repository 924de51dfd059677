"""Exception types shared across the package.

The CLI maps these onto exit codes, so library code should raise the most
specific type that applies rather than bare ValueError.
"""


class AfdmError(Exception):
    """Base class for all package errors."""


class DimensionError(AfdmError):
    """Input length or shape does not match the declared transform size."""


class ConfigurationError(AfdmError):
    """Inconsistent or unsatisfiable parameter combination."""


class CapacityError(AfdmError):
    """Requested computation exceeds an explicit enumeration budget."""


class EstimationError(AfdmError):
    """Channel estimation failed (ambiguous inversion or singular system)."""


class InsufficientDataError(AfdmError):
    """Not enough usable measurement points for the requested fit."""
