"""Exception hierarchy.

Two families: :class:`InputError` (bad scene data or arguments, CLI exit
code 2) and :class:`NumericalError` (a computation could not be completed,
CLI exit code 3).
"""


class ConresError(Exception):
    """Base class for every error raised by the package."""


class InputError(ConresError, ValueError):
    pass


class NumericalError(ConresError, ArithmeticError):
    pass


# scene
class MalformedDocument(InputError):
    pass


class UnknownModel(InputError):
    pass


class InvariantViolation(InputError):
    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)


class DegenerateAngle(InputError):
    pass


# geodesics
class CapExceeded(InputError):
    pass


class AngleOutOfRange(InputError):
    pass


class EmptyInput(InputError):
    pass


class BrokenChain(InputError):
    pass


class NoCycle(NumericalError):
    pass


# diffraction
class GeometricSingularity(NumericalError):
    pass


class NotStrictlyDiffractive(InputError):
    pass


# specfun
class DomainExceeded(InputError):
    pass


class BranchCut(InputError):
    pass


# models / rootfind
class ZeroFrequency(InputError):
    pass


class ContourThroughZero(NumericalError):
    pass


class ZeroOnContour(NumericalError):
    pass


class NonConvergentQuadrature(NumericalError):
    pass


class DepthExceeded(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


# analysis
class EmptySchedule(InputError):
    pass


class MissingEntry(InputError):
    pass


class NonpositiveL(InputError):
    pass


class NonpositiveDmax(InputError):
    pass


class NonpositiveDiam(InputError):
    pass


class TooFewPoints(InputError):
    pass
