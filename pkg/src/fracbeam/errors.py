"""Exception hierarchy for fracbeam."""


class FracBeamError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FracBeamError, ValueError):
    """An argument lies outside the domain where an operator is defined."""


class ConfigError(FracBeamError, ValueError):
    """Invalid or inconsistent problem configuration."""


class SolverError(FracBeamError, RuntimeError):
    """A linear or nonlinear solve failed."""

    def __init__(self, message, *, condition=None, history=None, step=None):
        super().__init__(message)
        self.condition = condition
        self.history = list(history) if history is not None else []
        self.step = step
