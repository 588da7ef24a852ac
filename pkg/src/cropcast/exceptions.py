"""Exception types shared across the package."""


class CropcastError(Exception):
    """Base class for all package errors."""


class SchemaError(CropcastError):
    """Input data does not match the expected shape (columns, spacing, duplicates)."""


class ParameterError(CropcastError, ValueError):
    """An argument is outside its documented domain."""


class InsufficientDataError(CropcastError):
    """The series is too short for the requested operation."""


class EmptySeriesError(CropcastError):
    """Filtering or aggregation produced no usable observations."""


class PositivityError(CropcastError):
    """A price that must be strictly positive is zero or negative."""


class DegeneracyError(CropcastError):
    """A regression design is singular and no statistic can be computed."""


class ConvergenceError(CropcastError):
    """Numerical optimization did not converge within its iteration budget."""


class NoViableOrderError(CropcastError):
    """Every candidate order in a grid search failed to fit."""


class UndefinedMetricError(CropcastError):
    """A metric's denominator is zero or negative for the given actuals."""


class EmptyLeaderboardError(CropcastError):
    """Every model spec failed to fit; no leaderboard rows could be produced."""


class NoChampionError(CropcastError):
    """All cross-validation reports are flagged failed; no champion exists."""


class SolverFailureError(CropcastError):
    """The simplex solver exceeded its iteration cap (should be unreachable)."""
