"""Exception hierarchy shared by every engine in the package."""

from __future__ import annotations


class JumpcohError(Exception):
    """Base class for domain errors (the CLI maps these to exit status 1)."""


class ParameterMismatchError(JumpcohError):
    pass


class DegreeRangeError(JumpcohError):
    pass


class ModelError(JumpcohError):
    """Invalid Lie model data (antisymmetry or Jacobi failure)."""


class NotACocycleError(JumpcohError):
    """Raised when a closed input was required; ``defect`` holds its differential."""

    def __init__(self, message: str, defect=None):
        super().__init__(message)
        self.defect = defect


class InvalidDeformationError(JumpcohError):
    pass


class InconsistentDeformationError(JumpcohError):
    """Maurer-Cartan failure detected at some order."""

    def __init__(self, message: str, defect=None):
        super().__init__(message)
        self.defect = defect


class StaleExtensionError(JumpcohError):
    pass


class InvalidInputError(JumpcohError):
    pass


class ComplexError(JumpcohError):
    """A JetModuleComplex failed its d∘d ≡ 0 check or has inconsistent shapes."""


class StabilizationError(JumpcohError):
    pass


class InternalConsistencyError(JumpcohError):
    """A cross-check between two independent computation paths disagreed."""


class ParseError(JumpcohError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
