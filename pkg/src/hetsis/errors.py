"""Exception types. CLI exit codes hang off these classes."""
from __future__ import annotations


class HetsisError(Exception):
    exit_code = 1


class ModelValidationError(HetsisError, ValueError):
    exit_code = 2

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class DimensionError(HetsisError, ValueError):
    exit_code = 2


class ConvergenceError(HetsisError, RuntimeError):
    """A numerical routine stopped before meeting its tolerance.

    ``best`` holds the last iterate when one is available.
    """

    exit_code = 3

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class MissingDataError(HetsisError, FileNotFoundError):
    exit_code = 4
