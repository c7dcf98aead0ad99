"""Group raw forecast records into experiments and join them with truths."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field

from src.errors import ConfigError, DuplicateForecasterError
from src.normalize.quarters import advance_quarter
from src.panel.models import (
    Dataset,
    Estimate,
    Experiment,
    ForecastRecord,
    TruthTable,
    experiment_id,
    tagged_indicators,
)

logger = logging.getLogger(__name__)

DEFAULT_MIN_N = 2

MISSING_TRUTH = "missing-truth"
TOO_FEW = "too-few-forecasters"
ZERO_DIVERSITY = "zero-diversity"


@dataclass(frozen=True)
class Drop:
    """An experiment left out of an analysis, with the reason why."""

    experiment_id: str
    reason: str
    detail: str = ""


@dataclass
class Assembly:
    dataset: Dataset
    drops: list[Drop] = field(default_factory=list)
    groups: int = 0


def log_drops(drops: list[Drop], what: str = "experiments") -> None:
    if not drops:
        return
    logger.info("Dropped %d %s", len(drops), what)
    for drop in drops[:10]:
        logger.warning("  %s: %s %s", drop.experiment_id, drop.reason, drop.detail)


def assemble_experiments(
    records: Iterable[ForecastRecord],
    truths: TruthTable,
    min_n: int = DEFAULT_MIN_N,
    horizons: Iterable[int] | None = None,
    provenance: str = "",
) -> Assembly:
    """Build a Dataset from parsed records.

    Records are grouped by (indicator, horizon, survey_period); each group's
    truth is looked up at survey_period advanced by horizon quarters. Groups
    with no truth or fewer than ``min_n`` forecasters are dropped and reported.
    """
    if min_n < 2:
        raise ConfigError(f"min_n must be >= 2, got {min_n}")
    wanted = set(horizons) if horizons is not None else None

    grouped: dict[tuple[str, int, str], dict[str, float]] = {}
    filtered = 0
    indicators: set[str] = set()
    for rec in records:
        indicators.add(rec["indicator"])
        if wanted is not None and rec["horizon"] not in wanted:
            filtered += 1
            continue
        key = (rec["indicator"], rec["horizon"], rec["survey_period"])
        panel = grouped.setdefault(key, {})
        if rec["forecaster_id"] in panel:
            raise DuplicateForecasterError(key, rec["forecaster_id"])
        panel[rec["forecaster_id"]] = rec["estimate"]

    # Indicator names whose slugs collide get a hashed tag so ids stay distinct.
    tagged = tagged_indicators(indicators)
    if tagged:
        logger.warning("Tagging ids of indicators with ambiguous slugs: %s", sorted(tagged))

    experiments: list[Experiment] = []
    drops: list[Drop] = []
    for key in sorted(grouped):
        indicator, horizon, period = key
        panel = grouped[key]
        exp_id = experiment_id(indicator, horizon, period, tagged=indicator in tagged)
        target = advance_quarter(period, horizon)
        truth = truths.lookup(indicator, target)
        if truth is None:
            drops.append(Drop(exp_id, MISSING_TRUTH, f"no truth for {indicator} {target}"))
            continue
        if len(panel) < min_n:
            drops.append(Drop(exp_id, TOO_FEW, f"N={len(panel)} < {min_n}"))
            continue
        experiments.append(Experiment(
            id=exp_id,
            indicator=indicator,
            horizon=horizon,
            survey_period=period,
            truth=truth,
            estimates=tuple(Estimate(fid, v) for fid, v in panel.items()),
        ))

    if filtered:
        logger.info("Filtered out %d records outside horizons %s", filtered, sorted(wanted))
    log_drops(drops)
    logger.info(
        "Assembled %d experiments from %d groups", len(experiments), len(grouped),
    )
    return Assembly(
        dataset=Dataset(tuple(experiments), provenance=provenance),
        drops=drops,
        groups=len(grouped),
    )


def dataset_records(dataset: Dataset) -> tuple[list[ForecastRecord], TruthTable]:
    """Flatten a Dataset back into forecast records and the truths it used."""
    records: list[ForecastRecord] = []
    truths = TruthTable()
    for exp in dataset:
        for est in exp.estimates:
            records.append(ForecastRecord(
                survey_period=exp.survey_period,
                indicator=exp.indicator,
                horizon=exp.horizon,
                forecaster_id=est.forecaster_id,
                estimate=est.value,
            ))
        if truths.lookup(exp.indicator, exp.target_period) is None:
            truths.add(exp.indicator, exp.target_period, exp.truth)
    return records, truths
