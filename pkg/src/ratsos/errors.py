"""Exception hierarchy shared by the certification pipelines."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence


class RatSosError(Exception):
    """Base class for every error raised by this package."""


class CertificationError(RatSosError):
    """The input could not be certified."""


class NotStrictlyPositive(CertificationError):
    """The polynomial has a real zero (or worse) where strict positivity was required."""

    def __init__(self, message: str, witness: Optional[Sequence[Fraction]] = None):
        super().__init__(message)
        self.witness = tuple(witness) if witness is not None else None


class NotNonNegative(NotStrictlyPositive):
    """The polynomial takes a negative value at ``witness`` (exactly checked)."""

    def __init__(self, message: str, witness: Sequence[Fraction], value: Fraction):
        super().__init__(message, witness)
        self.value = value


class BudgetExhausted(CertificationError):
    """Honest failure: the search budget ran out. This is not a disproof."""


class NoUnderApproximation(CertificationError):
    """No valid quadratic under-approximation at this point; refine the point."""


class RootFindingError(RatSosError):
    """Complex root iteration did not converge at the requested precision."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotPSD(RatSosError):
    """LDL^T hit a negative pivot or a zero pivot with a nonzero row."""

    def __init__(self, message: str, index: int, pivot: Fraction):
        super().__init__(message)
        self.index = index
        self.pivot = pivot


class NotStrictlyFeasible(RatSosError):
    """The SDP optimum has no positive minimum eigenvalue at this precision."""

    def __init__(self, message: str, min_eig: float):
        super().__init__(message)
        self.min_eig = min_eig


class InconsistentConstraints(RatSosError):
    """The affine constraints have no solution at all."""


class ParseError(RatSosError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SdpaFormatError(RatSosError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConfigError(RatSosError):
    pass


class SolverError(RatSosError):
    pass
