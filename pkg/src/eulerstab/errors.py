"""Exception hierarchy shared by all modules.

Each class carries an ``exit_code`` so the command line front end can map
failures to process exit statuses without inspecting messages.
"""

from __future__ import annotations


class EulerStabError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class InputError(EulerStabError, ValueError):
    """Invalid user input (bad masses, parameters out of range, ...)."""

    exit_code = 2


class ConfigurationError(InputError):
    """The Euler quintic has no admissible root for the given masses."""


class DomainError(InputError):
    """A parameter lies outside the domain where the model is defined."""


class IntegrationError(EulerStabError):
    """The ODE integrator could not reach the end of the period."""

    exit_code = 3

    def __init__(self, message: str, t_reached: float):
        super().__init__(message)
        self.t_reached = t_reached

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["t_reached"] = self.t_reached
        return out


class ConvergenceError(EulerStabError):
    """A truncated spectral computation failed to stabilize."""

    exit_code = 3

    def __init__(self, message: str, history=()):
        super().__init__(message)
        self.history = list(history)

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["history"] = [list(h) for h in self.history]
        return out


class AmbiguityError(EulerStabError):
    """A numerical decision falls inside a tolerance band and cannot be made."""

    exit_code = 4

    def __init__(self, message: str, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["candidates"] = [str(c) for c in self.candidates]
        return out


class ClassificationConflict(EulerStabError):
    """Predicted and computed stability data disagree."""

    exit_code = 4

    def __init__(self, message: str, record=None):
        super().__init__(message)
        self.record = record


class OrderingViolation(EulerStabError):
    """Degenerate curves appear out of their proven left-to-right order."""

    exit_code = 4

    def __init__(self, message: str, pair=()):
        super().__init__(message)
        self.pair = tuple(pair)
