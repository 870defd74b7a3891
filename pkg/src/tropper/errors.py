"""Exception hierarchy.  Domain errors map to CLI exit code 1."""


class TropperError(Exception):
    """Base class for all domain errors raised by the library."""


class NotWeightPositive(TropperError, ValueError):
    """A series is not of the form ``unit * (1 + positive-weight terms)``."""


class WeightSearchFailed(TropperError):
    """No grading makes the given series weight-positive."""


class OnAmoeba(TropperError):
    """The torus over the requested point meets the zero set."""


class Inconclusive(TropperError):
    """Numerical winding/quadrature did not settle within the refinement budget."""


class SceneError(TropperError):
    """Malformed or inconsistent scene description."""


class ForbiddenStratum(TropperError):
    """A path or vertex meets the singular locus it must avoid."""


class CycleError(TropperError):
    """A tropical cycle violates a structural requirement."""
