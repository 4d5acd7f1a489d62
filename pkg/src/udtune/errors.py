"""Exception hierarchy. Every error raised by the package derives from UDTuneError."""


class UDTuneError(Exception):
    pass


class InvalidArgumentError(UDTuneError, ValueError):
    pass


class NonCoprimeGeneratorError(InvalidArgumentError):
    pass


class InsufficientColumnsError(InvalidArgumentError):
    """Fewer lattice columns (Euler totient of n) than requested factors."""


class NonFiniteSignalError(InvalidArgumentError):
    pass


class ThrustDegenerateError(UDTuneError, ArithmeticError):
    pass


class InfeasibleAttitudeError(UDTuneError, ArithmeticError):
    pass


class ControlSingularityError(UDTuneError, ArithmeticError):
    pass


class NoFeasibleCandidateError(UDTuneError):
    """Every evaluated parameter combination diverged."""


class ConfigError(UDTuneError):
    pass
