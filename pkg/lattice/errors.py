# ternary_navigator/lattice/errors.py

"""Exception hierarchy shared by the lattice library and the agents."""


class LatticeError(Exception):
    """Base class for every error raised by ternary_navigator."""


class InvalidFormError(LatticeError):
    """Raised when a form cannot be parsed or is not a symmetric 3x3 integer matrix."""


class HalfIntegralFormError(InvalidFormError):
    """Raised for forms with half-integral (non classically integral) entries."""


class NotPositiveDefiniteError(InvalidFormError):
    """Raised when a leading principal minor is not positive."""


class NotStableError(LatticeError):
    """Raised when a stable-genus computation receives a lattice that is not stable."""


class OutOfContractError(LatticeError):
    """Raised when the ascent formulas do not cover a requested step."""


class InvariantViolation(LatticeError):
    """Raised when an internal consistency check fails (non-integral count, mass mismatch, ...)."""


class BoundExceededError(LatticeError):
    """Raised when a discriminant exceeds the configured enumeration bound."""


class TableGapError(LatticeError):
    """Raised when a 2-adic class has no row in the representation-density table."""
