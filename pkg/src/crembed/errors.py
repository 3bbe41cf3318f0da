"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CrembedError(Exception):
    """Base class for every error raised deliberately by this package."""


class SeriesError(CrembedError):
    pass


class AlignmentError(SeriesError):
    """Two series over different variables or truncations were combined."""


class CapExhaustedError(SeriesError):
    """An operation would need coefficients beyond the known truncation."""


class NotAUnitError(SeriesError):
    """Inversion of a series whose constant term vanishes."""


class SubstitutionError(SeriesError):
    """Composition whose result is not determined by the truncated data."""


class DivisionError(SeriesError):
    """A division that was expected to be exact left a remainder."""


class NondegeneracyError(SeriesError):
    """An implicit system has a singular Jacobian at the base point."""

    def __init__(self, message: str, determinant=None):
        super().__init__(message)
        self.determinant = determinant


class ConvergenceError(SeriesError):
    pass


class DSLSyntaxError(CrembedError):
    """Malformed defining-function text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = ""
        if text:
            pointer = f"\n  {text}\n  {' ' * position}^"
        super().__init__(f"{message} at position {position}{pointer}")


class RealityError(CrembedError):
    """A defining function fails the reality condition on its coefficients."""


class NormalizationError(CrembedError):
    """A defining function has a constant or linear part."""


class LeviDegenerateError(CrembedError):
    """The Levi determinant vanishes at the base point."""

    def __init__(self, message: str, determinant=None):
        super().__init__(message)
        self.determinant = determinant


class SpecError(CrembedError):
    """Invalid multi-index data for an obstruction operator."""


class GammaSearchError(CrembedError):
    """No admissible derivative sequence was found within the budget."""

    def __init__(self, message: str, best_rank: int = 0):
        super().__init__(message)
        self.best_rank = best_rank


class GammaTableError(CrembedError):
    """The shipped derivative-sequence table is unreadable or inconsistent."""
