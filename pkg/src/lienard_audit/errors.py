"""Exception hierarchy shared by every module."""


class LienardAuditError(Exception):
    """Base class for all errors raised by this package."""


class StepLimitExceeded(LienardAuditError):
    pass


class NonFiniteState(LienardAuditError):
    pass


class DepthExceeded(LienardAuditError):
    pass


class DegreeUnsupported(LienardAuditError):
    pass


class DegreeOverflow(LienardAuditError):
    pass


class MissingDerivatives(LienardAuditError):
    pass


class SingularGauge(LienardAuditError):
    pass


class VanishingVelocity(LienardAuditError):
    pass


class NearPole(LienardAuditError):
    pass


class VanishingOmega(LienardAuditError):
    pass


class NotARoot(LienardAuditError):
    pass


class ParseError(LienardAuditError, ValueError):
    pass
