"""Exception types shared across the package."""


class LogoError(Exception):
    """Base class for model and data errors raised by this package."""


class NotPositiveDefinite(LogoError):
    """A matrix that must be positive definite is singular or indefinite.

    ``pivot`` is the 0-based index of the first failing Cholesky pivot
    (None when the failure is structural rather than numeric, e.g. too few
    observations for a block size); ``label`` optionally names the
    offending block (e.g. a clique).
    """

    def __init__(self, pivot: int | None = None, label: str | None = None):
        self.pivot = pivot
        self.label = label
        where = f" in {label}" if label else ""
        at = f" (pivot {pivot})" if pivot is not None else ""
        super().__init__(f"matrix not positive definite{where}{at}")


class ZeroVariance(LogoError):
    """A data column is constant, so its correlation is undefined."""

    def __init__(self, column: int, name: str | None = None):
        self.column = column
        self.name = name
        label = name if name is not None else str(column)
        super().__init__(f"column {label} has zero variance")


class DimensionMismatch(LogoError):
    """Operands have incompatible dimensions."""


class RankDeficientConstraint(LogoError):
    """Constraint rows are linearly dependent (A Sigma A^T singular)."""


class InsufficientData(LogoError):
    """Not enough observations for the requested operation."""
