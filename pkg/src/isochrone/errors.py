"""Exception hierarchy.

Every failure raised by the package derives from :class:`IsochroneError` so
callers (and the CLI) can separate input problems from numerical ones.
"""


class IsochroneError(Exception):
    """Base class for all package errors."""


class InputError(IsochroneError, ValueError):
    """Bad or inconsistent user input."""


class DomainError(InputError):
    pass


class DegenerateParabola(InputError):
    pass


class AmbiguousRoot(InputError):
    pass


class NotThroughOrigin(InputError):
    pass


class NoChord(InputError):
    pass


class NotMonotoneCurvature(InputError):
    pass


class NoMinimum(InputError):
    pass


class Unbound(InputError):
    pass


class BelowCircular(InputError):
    pass


class ZeroMomentum(InputError):
    pass


class EnergySign(InputError):
    pass


class GaugeDomain(InputError):
    pass


class NoPRO(InputError):
    pass


class OrderError(InputError):
    pass


class BranchError(InputError):
    pass


class SingularBolst(InputError):
    pass


class ZeroImageEnergy(InputError):
    pass


class CausalityViolation(InputError):
    pass


class ImaginaryMomentum(InputError):
    pass


class SignError(InputError):
    pass


class NotIsochrone(InputError):
    pass


class InconsistentEllipse(InputError):
    pass


class NumericalError(IsochroneError, RuntimeError):
    """A numerical routine did not deliver the requested accuracy."""


class NonConvergent(NumericalError):
    pass


class StepFailure(NumericalError):
    pass


class DomainExit(NumericalError):
    pass


class InsufficientEvents(NumericalError):
    pass
