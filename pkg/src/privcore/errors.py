"""Exception types shared across the package.

Plain ``ValueError`` is used for garden-variety bad arguments; the classes
here exist where callers need to tell failure modes apart.
"""


class UnderdeterminedError(ValueError):
    """Least-squares system has fewer rows than unknowns."""


class ConstantTargetError(ValueError):
    """r-squared is undefined because the evaluation target is constant."""


class EmptyClassError(ValueError):
    """A categorical task has a class with no examples."""

    def __init__(self, message: str, missing_classes=()):
        super().__init__(message)
        self.missing_classes = tuple(missing_classes)


class InfeasibleSelectionError(ValueError):
    """No subset satisfying the selection constraints exists (or was found).

    ``best_gap`` carries the smallest constraint violation achieved before
    giving up, when that is meaningful for the failed selection.
    """

    def __init__(self, message: str, best_gap: float | None = None):
        super().__init__(message)
        self.best_gap = best_gap


class CsvParseError(ValueError):
    """Malformed CSV input; names the offending row/column where known."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column
