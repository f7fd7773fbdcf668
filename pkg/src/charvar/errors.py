"""Exception hierarchy shared by the engines and mapped to CLI exit codes."""
from __future__ import annotations


class CharvarError(Exception):
    """Base class for all engine errors."""


class AlgorithmFailure(CharvarError):
    """The stratification engine reached its failure case on a sub-problem."""

    def __init__(self, message: str, spec=None):
        super().__init__(message)
        self.spec = spec


class BranchFailure(CharvarError):
    """Orbit-representative search found a coordinate it cannot normalize."""

    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail


class ResourceLimit(CharvarError):
    """A configured depth, size or enumeration budget was exceeded."""


class SizeLimit(ResourceLimit):
    """Brute-force enumeration would exceed its budget."""


class InexactDivision(CharvarError):
    """A quotient that theory says is exact left a remainder."""


class InterpolationFailure(CharvarError):
    """A closed form in g could not be fitted or failed verification."""
