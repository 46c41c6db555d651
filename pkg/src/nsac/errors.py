"""Exception hierarchy.

Two families map onto the CLI exit codes: :class:`ValidationError` (bad
input, exit 2) and :class:`NumericalError` (a computation failed, exit 3).
"""


class NsacError(Exception):
    exit_code = 1


class ValidationError(NsacError, ValueError):
    exit_code = 2


class NumericalError(NsacError, ArithmeticError):
    exit_code = 3


# potential / profiles
class NegativePotential(ValidationError):
    pass


class NoHeteroclinic(ValidationError):
    pass


class SingularSystem(NumericalError):
    pass


class ShapeMismatch(ValidationError):
    pass


# geometry
class DegenerateCurve(ValidationError):
    pass


class AmbiguousProjection(NumericalError):
    pass


class OutsideTube(ValidationError):
    pass


class TubeTooWide(ValidationError):
    pass


# sharp flow
class StepTooLarge(NumericalError):
    pass


class CircleVanished(NumericalError):
    pass


class CFLViolation(ValidationError):
    pass


class NonPeriodicInput(ValidationError):
    pass


# diffuse solver
class ResolutionTooCoarse(ValidationError):
    pass


class TubeTooNarrow(ValidationError):
    pass


class ProjectionDiverged(NumericalError):
    pass


class NoInterface(NumericalError):
    pass


# asymptotics
class BracketNotVanishing(NumericalError):
    pass


class MissingMotion(ValidationError):
    pass


# spectral
class NoConvergence(NumericalError):
    pass


# harness / io
class GridMismatch(ValidationError):
    pass


class NonPositiveError(ValidationError):
    pass


class BadMagic(ValidationError):
    pass


class TruncatedFile(ValidationError):
    pass


class VersionMismatch(ValidationError):
    pass
