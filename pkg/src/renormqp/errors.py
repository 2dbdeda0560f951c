"""Exception hierarchy. ``exit_code`` is what the CLI returns for each kind."""


class RenormError(Exception):
    exit_code = 1


class NoConvergence(RenormError):
    exit_code = 2


class DomainError(RenormError):
    """A map is outside the domain where an operator is defined."""
    exit_code = 3


class DomainEscape(DomainError):
    """Evaluation point outside the closed disc of a function."""


class ImageEscape(DomainError):
    """A composition sample left the disc of the outer function."""


class NotInX(DomainError):
    pass


class NotRenormalizable(DomainError):
    def __init__(self, step, msg=""):
        self.step = step
        super().__init__(f"not renormalizable at step {step}" + (f": {msg}" if msg else ""))


class NotOnSigma1(DomainError):
    pass


class OrbitEscape(DomainError):
    pass


class IllConditioned(RenormError):
    exit_code = 3


class ModeOutOfRange(RenormError, IndexError):
    exit_code = 3


class DegenerateMinimum(RenormError):
    exit_code = 3


class DegenerateExtremum(RenormError):
    exit_code = 3


class ZeroDenominator(RenormError):
    exit_code = 3


class WindowNotFound(NoConvergence):
    pass


class PeriodMismatch(NoConvergence):
    pass


class NonAttracting(NoConvergence):
    pass


class RootLost(NoConvergence):
    pass


class ConfigError(RenormError):
    exit_code = 4


class MissingArtifact(RenormError):
    exit_code = 5


class VerificationFailed(RenormError):
    exit_code = 6
