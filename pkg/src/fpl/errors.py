"""Shared exception types.

The CLI maps these onto exit codes: input errors (bad shapes, unknown names,
inconsistent data) exit 2; capacity errors (guards against exponential blowup)
exit 3.
"""


class InputError(ValueError):
    """Malformed or inconsistent input (dimension mismatch, unknown name, ...)."""


class DimensionError(InputError):
    """Matrix or state dimensions do not match the operation's contract."""


class CapacityError(RuntimeError):
    """Problem size exceeds a configured guard (permanent cap, space size, ...)."""


class SingularityError(InputError):
    """Rank-deficient input where full rank is required."""


class UndefinedVisibilityError(InputError):
    """Two-photon visibility undefined: classical coincidence probability ~ 0."""


class ReferenceChoiceError(InputError):
    """Tomography reference row/column unusable (zero divisor or negative moduli)."""
