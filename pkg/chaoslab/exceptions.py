"""Custom exception hierarchy for chaoslab."""

from __future__ import annotations

from typing import Sequence


class LabError(Exception):
    """Base exception for chaoslab failures."""

    exit_code = 3


class InputError(LabError):
    """Raised when user input or a precondition fails validation."""

    exit_code = 1


class ConfigError(LabError):
    """Raised when configuration parsing or validation fails."""

    exit_code = 1


class ResourceError(LabError):
    """Raised when a computation would exceed a hard resource cap."""

    exit_code = 2


class InternalError(LabError):
    """Raised when an identity that must hold exactly does not."""

    exit_code = 3


class AdmissibilityError(InputError):
    """Raised when a matrix fails the refined Hadamard admissibility test."""

    def __init__(self, diagnostics: Sequence[str]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("Matrix is not admissible: " + "; ".join(self.diagnostics))


class OptimizerStall(LabError):
    """Raised when every restart of the sphere optimizer is stuck on a zero set."""

    def __init__(self, message: str, best_value: float) -> None:
        self.best_value = best_value
        super().__init__(message)
