"""Parse normalized forecast and truth CSV files.

Forecast CSV header: ``survey_period,indicator,horizon,forecaster_id,estimate``.
Truth CSV header: ``indicator,target_period,value``.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from typing import IO, Union

import pandas as pd

from src.errors import DataError, RowError, SchemaError
from src.normalize.quarters import normalize_horizon, normalize_quarter
from src.panel.models import ForecastRecord, TruthTable

logger = logging.getLogger(__name__)

DEFAULT_MISSING = "#N/A"

Source = Union[str, IO[str]]


@dataclass(frozen=True)
class ForecastColumns:
    """Maps the logical fields onto the column names used in a file."""

    survey_period: str = "survey_period"
    indicator: str = "indicator"
    horizon: str = "horizon"
    forecaster_id: str = "forecaster_id"
    estimate: str = "estimate"

    def required(self) -> list[str]:
        return [
            self.survey_period,
            self.indicator,
            self.horizon,
            self.forecaster_id,
            self.estimate,
        ]


@dataclass
class ForecastParse:
    records: list[ForecastRecord] = field(default_factory=list)
    skipped: int = 0
    skipped_lines: list[int] = field(default_factory=list)


_FIELD_COUNT_RE = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


def _read_frame(source: Source, required: list[str], name: str) -> pd.DataFrame:
    # header=None: the header line fixes the field count, so a longer row is a
    # tokenizer error instead of being read as an implicit index column.
    try:
        frame = pd.read_csv(
            source,
            header=None,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            skip_blank_lines=False,
            encoding="utf-8-sig" if isinstance(source, str) else None,
        )
    except pd.errors.EmptyDataError:
        raise SchemaError(required[0], name) from None
    except pd.errors.ParserError as exc:
        match = _FIELD_COUNT_RE.search(str(exc))
        if match:
            expected, line, saw = (int(g) for g in match.groups())
            raise RowError(line, f"expected {expected} fields, saw {saw}") from None
        raise DataError(f"{name}: malformed CSV: {str(exc).strip()}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{name}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None

    header = [_cell(c).lstrip("\ufeff").strip() for c in frame.iloc[0]]
    frame = frame.iloc[1:].reset_index(drop=True)
    frame.columns = header
    for column in required:
        if column not in frame.columns:
            raise SchemaError(column, name)
    return frame


def _cell(value: object) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return str(value).strip()


def _source_name(source: Source) -> str:
    return source if isinstance(source, str) else getattr(source, "name", "<stream>")


def _parse_real(raw: str, line: int, what: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise RowError(line, f"{what} {raw!r} is not a number") from None
    if not math.isfinite(value):
        raise RowError(line, f"{what} {raw!r} is not finite")
    return value


def parse_forecast_csv(
    source: Source,
    columns: ForecastColumns | None = None,
    missing: str = DEFAULT_MISSING,
) -> ForecastParse:
    """Parse a forecast CSV into raw records.

    Rows whose estimate is empty or equal to ``missing`` are skipped and
    counted; fully blank lines are ignored.
    """
    columns = columns or ForecastColumns()
    name = _source_name(source)
    frame = _read_frame(source, columns.required(), name)

    result = ForecastParse()
    for offset, row in enumerate(frame.to_dict(orient="records")):
        line = offset + 2  # header is line 1
        data = {col: _cell(value) for col, value in row.items()}
        if not any(data.values()):
            continue

        raw_estimate = data[columns.estimate]
        if not raw_estimate or raw_estimate == missing:
            result.skipped += 1
            result.skipped_lines.append(line)
            continue

        try:
            period = normalize_quarter(data[columns.survey_period])
        except ValueError as exc:
            raise RowError(line, str(exc)) from None
        try:
            horizon = normalize_horizon(data[columns.horizon])
        except ValueError as exc:
            raise RowError(line, f"bad horizon: {exc}") from None

        forecaster_id = data[columns.forecaster_id]
        indicator = data[columns.indicator]
        if not forecaster_id or not indicator:
            raise RowError(line, "indicator and forecaster_id must be non-empty")

        result.records.append(ForecastRecord(
            survey_period=period,
            indicator=indicator,
            horizon=horizon,
            forecaster_id=forecaster_id,
            estimate=_parse_real(raw_estimate, line, "estimate"),
        ))

    logger.info(
        "Parsed %d forecast records from %s (%d skipped as missing)",
        len(result.records), name, result.skipped,
    )
    return result


def serialize_forecasts(records: list[ForecastRecord]) -> str:
    """Write records back to the normalized CSV layout, floats in round-trip form."""
    frame = pd.DataFrame(
        [
            [r["survey_period"], r["indicator"], r["horizon"], r["forecaster_id"], repr(r["estimate"])]
            for r in records
        ],
        columns=ForecastColumns().required(),
    )
    return frame.to_csv(index=False, lineterminator="\n")


def parse_truth_csv(source: Source) -> TruthTable:
    name = _source_name(source)
    frame = _read_frame(source, ["indicator", "target_period", "value"], name)

    table = TruthTable()
    for offset, row in enumerate(frame.to_dict(orient="records")):
        line = offset + 2
        indicator, period, raw = (
            _cell(row[c]) for c in ("indicator", "target_period", "value")
        )
        if not (indicator or period or raw):
            continue
        try:
            quarter = normalize_quarter(period)
        except ValueError as exc:
            raise RowError(line, str(exc)) from None
        value = _parse_real(raw, line, "value")
        try:
            table.add(indicator, quarter, value)
        except DataError as exc:
            raise RowError(line, str(exc)) from None

    logger.info("Parsed %d truth entries from %s", len(table), name)
    return table


def serialize_truths(table: TruthTable) -> str:
    rows = [
        [indicator, period, repr(value)]
        for (indicator, period), value in sorted(table.entries.items())
    ]
    frame = pd.DataFrame(rows, columns=["indicator", "target_period", "value"])
    return frame.to_csv(index=False, lineterminator="\n")
