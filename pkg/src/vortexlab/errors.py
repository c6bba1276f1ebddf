"""Exception hierarchy.

Every error the library raises on bad input derives from :class:`ValidationError`
(CLI exit 2); numerical failures derive from :class:`NonConvergence` (exit 3);
bubbling ambiguity is :class:`AmbiguousExponents` (exit 4).
"""


class VortexLabError(Exception):
    pass


class ValidationError(VortexLabError, ValueError):
    """Input violates a documented invariant."""


class DomainTooSmall(ValidationError):
    pass


class NonConvergence(VortexLabError, RuntimeError):
    """Newton iteration did not reach the requested tolerance."""


class ResolutionFailure(NonConvergence):
    """Grid too coarse to resolve the vortex core; treated as a solver failure."""


class AmbiguousZero(VortexLabError):
    pass


class InsufficientRange(VortexLabError):
    pass


class DegreeExceeded(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class IncompatibleType(ValidationError):
    pass


class AmbiguousExponents(VortexLabError):
    pass


class UnstableLimit(VortexLabError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class WindingAmbiguous(VortexLabError):
    pass


class FieldNotUnimodular(VortexLabError):
    pass


class UnsupportedOrder(ValidationError):
    pass


class DivergentWeight(ValidationError):
    pass
