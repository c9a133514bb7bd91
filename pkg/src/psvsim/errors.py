"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration/validation problems exit
with 1, physically impossible requests with 2, I/O failures with 3.
"""


class PsvError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(PsvError):
    """A scenario, surface or operator is malformed (wrong dimension,
    non-unitary matrix, incomplete outcome set, ...)."""


class OrderingViolationError(ConfigurationError):
    """An apex would be adjoined strictly below the current surface, i.e.
    a detector would act on an already-reduced region."""


class PhysicsError(PsvError):
    """A request that is well-formed but physically impossible."""


class ImpossibleBranchError(PhysicsError):
    """A fixed outcome was requested whose Born probability is zero."""


class AmbiguousRegionError(PhysicsError):
    """A spacetime point lies exactly on a backward light cone, so its
    Hellwig-Kraus region is undefined (regions are open sets)."""
