"""Exception hierarchy shared by all ``opf`` modules."""


class OPFError(Exception):
    """Base class for every error raised by the package."""


class PreconditionViolated(OPFError, ValueError):
    pass


class TruncationTooLow(OPFError):
    pass


class UnsupportedParams(OPFError, ValueError):
    pass


class ZeroMu(OPFError, ValueError):
    pass


class NonpositiveLambda(OPFError, ValueError):
    pass


class DegenerateQ(OPFError, ValueError):
    pass


class InvalidCofactor(OPFError, ValueError):
    pass


class PoleAtPoint(OPFError, ZeroDivisionError):
    pass


class TrajectoryLeftDomain(OPFError):
    pass


class IntegrationFailure(OPFError):
    pass


class StepFailure(IntegrationFailure):
    pass


class NonIsolatedCritSet(OPFError):
    pass


class NotApplicable(OPFError):
    pass


class SeriesInconclusive(OPFError):
    pass


class RuleUndecided(OPFError):
    pass


class NotACriticalPoint(OPFError, ValueError):
    pass


class IdenticallyZero(OPFError):
    pass


class DegenerateC2(OPFError, ValueError):
    pass


class SingularSamplePoint(OPFError, ValueError):
    pass


class SingularAtPMOne(OPFError, ValueError):
    pass
