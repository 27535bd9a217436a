"""
Exception hierarchy. Every class carries the CLI exit code it maps to:
2 for caller mistakes, 3 for numerical failures.
"""

from typing import Any

USAGE_EXIT_CODE = 2
NUMERICAL_EXIT_CODE = 3


class KahlerOTError(Exception):
    """Base class for all kahlerot failures."""

    exit_code: int = NUMERICAL_EXIT_CODE

    def details(self) -> dict[str, Any]:
        """Structured context for reports."""
        return {"error": type(self).__name__, "message": str(self)}


class SpecError(KahlerOTError):
    """Bad potential or cost text, unknown catalog entry, parameter out of range."""

    exit_code = USAGE_EXIT_CODE


class ExpressionSyntaxError(SpecError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at offset {position}")
        self.position = position

    def details(self) -> dict[str, Any]:
        return {**super().details(), "position": self.position}


class PreconditionError(KahlerOTError):
    """The caller violated a documented precondition."""

    exit_code = USAGE_EXIT_CODE


class NumericalDomainError(KahlerOTError):
    """A jet primitive was evaluated outside its real domain."""

    def __init__(self, primitive: str, value: float) -> None:
        super().__init__(f"{primitive} evaluated outside its domain at value {value!r}")
        self.primitive = primitive
        self.value = value

    def details(self) -> dict[str, Any]:
        return {**super().details(), "primitive": self.primitive, "value": self.value}


class OutOfDomainError(KahlerOTError):
    """A point fails a domain predicate or the positive-definiteness check."""

    def __init__(self, message: str, check: Any = None) -> None:
        super().__init__(message)
        self.check = check

    def details(self) -> dict[str, Any]:
        extra = self.check.model_dump() if self.check is not None else None
        return {**super().details(), "check": extra}


class DegenerateMetricError(KahlerOTError):
    pass


class InversionError(KahlerOTError):
    """Newton inversion of the gradient map did not converge."""

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(f"{message} (best residual {residual:.3e})")
        self.residual = residual

    def details(self) -> dict[str, Any]:
        return {**super().details(), "residual": self.residual}


class SegmentExitsDomainError(KahlerOTError):
    def __init__(self, t: float, cause: Exception) -> None:
        super().__init__(f"dual segment leaves the gradient image at t={t!r}: {cause}")
        self.t = t

    def details(self) -> dict[str, Any]:
        return {**super().details(), "t": self.t}


class SingularCrossDerivativeError(KahlerOTError):
    """The mixed second derivative c_{i,j} of a cost is not invertible."""


class ConvergenceError(KahlerOTError):
    def __init__(self, message: str, violation: float, iterations: int) -> None:
        super().__init__(
            f"{message} (marginal violation {violation:.3e} after {iterations} iterations)"
        )
        self.violation = violation
        self.iterations = iterations

    def details(self) -> dict[str, Any]:
        return {
            **super().details(),
            "violation": self.violation,
            "iterations": self.iterations,
        }


class NonOptimalPlanError(KahlerOTError):
    """Complementary slackness failed for the supplied plan."""
