"""Exception and warning types shared across the package."""


class RotlandError(Exception):
    """Base class for all errors raised by rotland."""


class InvalidParam(RotlandError, ValueError):
    """A parameter is outside its documented domain."""


class AngleNearPi(RotlandError):
    """The rotation angle is too close to pi for a well-defined principal log."""


class NearZeroResidual(RotlandError):
    """An edge residual is too small for the l_p derivatives to exist (p < 2)."""


class EigenFailure(RotlandError):
    """A symmetric eigendecomposition failed its residual check."""


class Degenerate(RotlandError):
    """A matrix is too close to singular for the requested projection."""


class DegenerateDegree(RotlandError):
    """Some vertex has zero residual degree, so the normalized bound is undefined."""


class AlphaNonpositive(RotlandError):
    """The smallest isotropic edge weight is not positive."""


class DisconnectedGraph(RotlandError):
    """A graph that must be connected is not."""


class DidNotConverge(RotlandError):
    """A local solve hit its iteration cap or stalled."""


class AlignmentAmbiguous(RuntimeWarning):
    """Gauge alignment of two solutions did not contract to a unique rotation."""
