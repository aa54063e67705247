"""Exception hierarchy shared by all modules."""


class StaticMassError(Exception):
    """Base class for every error raised by this package."""


class DomainError(StaticMassError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class ConvergenceError(StaticMassError, RuntimeError):
    """A root finder or integrator failed to reach its tolerance."""


class DivergenceError(StaticMassError, ArithmeticError):
    """An improper integral (height, volume) does not converge."""


class SingularValueError(StaticMassError, ValueError):
    """A level set was requested at a height where the slope blows up."""


class PreconditionError(StaticMassError, ValueError):
    """A precondition of an estimate (positive mass, threshold area, ...) fails."""


class ConstraintError(StaticMassError, ValueError):
    """Family parameters are not admissible (e.g. horizon radius <= 1 for eps=-1)."""


class ConfigError(StaticMassError, ValueError):
    """Malformed or unknown experiment configuration."""


class CheckFailure(StaticMassError):
    """One or more verification checks failed."""
