"""Exception hierarchy shared by the library and the command-line entry point.

Library code raises; only ``run_report.py`` turns these into exit codes.
"""

from __future__ import annotations

EXIT_CONFIG = 1
EXIT_DATA = 2


class CrowdError(Exception):
    """Base class for every error raised by this package."""

    kind = "error"
    exit_code = EXIT_DATA


class ConfigError(CrowdError):
    kind = "config"
    exit_code = EXIT_CONFIG


class DataError(CrowdError):
    kind = "data"
    exit_code = EXIT_DATA


class SchemaError(DataError):
    """A required CSV column is missing from the header."""

    kind = "schema"

    def __init__(self, column: str, source: str = "<stream>") -> None:
        self.column = column
        super().__init__(f"{source}: missing required column {column!r}")


class RowError(DataError):
    """A data row could not be parsed. ``line`` is 1-based and counts the header."""

    kind = "row"

    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class DuplicateForecasterError(DataError):
    kind = "duplicate-forecaster"

    def __init__(self, group: tuple, forecaster_id: str) -> None:
        self.group = group
        self.forecaster_id = forecaster_id
        indicator, horizon, period = group
        super().__init__(
            f"forecaster {forecaster_id!r} appears twice in group "
            f"indicator={indicator} horizon={horizon} survey_period={period}"
        )


class EmptyPanelError(DataError, ValueError):
    kind = "empty-panel"


class UndefinedSkewError(DataError, ValueError):
    """Skewness requested for a panel with zero diversity."""

    kind = "undefined-skew"


class ScaledFieldError(DataError, ValueError):
    kind = "scaled-field"

    def __init__(self, denominator: str) -> None:
        self.denominator = denominator
        super().__init__(f"scaled statistics need a nonzero {denominator}")


class UndefinedCorrelationError(DataError, ValueError):
    kind = "undefined-correlation"


class NonFiniteInputError(DataError, ValueError):
    kind = "non-finite"


class DegenerateNullError(DataError, ValueError):
    """The unbiased null needs a strictly positive diversity."""

    kind = "degenerate-null"


class UnknownExperimentError(DataError, KeyError):
    kind = "unknown-experiment"

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else self.kind
