"""Panel data model: experiments, datasets and the truth table."""

from __future__ import annotations

import hashlib
import math
from collections import defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from typing import TypedDict

from src.errors import DataError, EmptyPanelError, UnknownExperimentError
from src.normalize.quarters import advance_quarter, normalize_quarter
from src.normalize.slugify import slugify


class ForecastRecord(TypedDict):
    """One parsed row of a forecast CSV."""

    survey_period: str
    indicator: str
    horizon: int
    forecaster_id: str
    estimate: float


def indicator_label(indicator: str, tagged: bool = False) -> str:
    """Slug of an indicator name, plus ``~`` and a hash of the raw name when tagged.

    ``~`` never occurs in a slug, so tagged and untagged labels cannot meet.
    """
    slug = slugify(indicator)
    if not tagged and slug:
        return slug
    digest = hashlib.sha256(indicator.encode("utf-8")).hexdigest()[:10]
    return f"{slug}~{digest}"


def tagged_indicators(indicators: Iterable[str]) -> set[str]:
    """Indicators whose slug is empty or shared with a different indicator name."""
    by_slug: dict[str, set[str]] = defaultdict(set)
    for indicator in indicators:
        by_slug[slugify(indicator)].add(indicator)
    return {
        indicator
        for slug, names in by_slug.items()
        if not slug or len(names) > 1
        for indicator in names
    }


def experiment_id(indicator: str, horizon: int, survey_period: str, tagged: bool = False) -> str:
    """Stable identifier in the form ``{indicator-label}:h{horizon}:{period}``."""
    return f"{indicator_label(indicator, tagged)}:h{horizon}:{survey_period}"


@dataclass(frozen=True)
class Estimate:
    forecaster_id: str
    value: float


@dataclass(frozen=True)
class Experiment:
    """One forecast panel: a group of individual estimates with a realized truth."""

    id: str
    indicator: str
    horizon: int
    survey_period: str
    truth: float
    estimates: tuple[Estimate, ...]

    def __post_init__(self) -> None:
        if not self.estimates:
            raise EmptyPanelError(f"experiment {self.id} has no estimates")
        if not math.isfinite(self.truth):
            raise DataError(f"experiment {self.id}: truth is not finite")
        seen: set[str] = set()
        for est in self.estimates:
            if not math.isfinite(est.value):
                raise DataError(
                    f"experiment {self.id}: estimate of {est.forecaster_id} is not finite"
                )
            if est.forecaster_id in seen:
                raise DataError(
                    f"experiment {self.id}: duplicate forecaster {est.forecaster_id!r}"
                )
            seen.add(est.forecaster_id)

    @classmethod
    def from_values(
        cls,
        values: Iterable[float],
        truth: float,
        *,
        indicator: str = "panel",
        horizon: int = 0,
        survey_period: str = "0000Q1",
        id: str | None = None,
    ) -> Experiment:
        """Build an experiment with synthetic forecaster ids ``f0001, f0002, ...``."""
        estimates = tuple(
            Estimate(f"f{i:04d}", float(v)) for i, v in enumerate(values, 1)
        )
        return cls(
            id=id or experiment_id(indicator, horizon, survey_period),
            indicator=indicator,
            horizon=horizon,
            survey_period=survey_period,
            truth=float(truth),
            estimates=estimates,
        )

    @property
    def n(self) -> int:
        return len(self.estimates)

    @property
    def values(self) -> list[float]:
        return [est.value for est in self.estimates]

    @property
    def target_period(self) -> str:
        return advance_quarter(self.survey_period, self.horizon)

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.indicator, self.horizon, self.survey_period)


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of experiments.

    Experiments are always held sorted by (indicator, horizon, survey_period),
    whatever order they were supplied in.
    """

    experiments: tuple[Experiment, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.experiments, key=lambda e: e.key))
        keys = [e.key for e in ordered]
        if len(set(keys)) != len(keys):
            dupes = sorted({k for k in keys if keys.count(k) > 1})
            raise DataError(f"duplicate experiment keys: {dupes[:5]}")
        ids = [e.id for e in ordered]
        if len(set(ids)) != len(ids):
            raise DataError("experiment ids are not unique")
        object.__setattr__(self, "experiments", ordered)

    def __iter__(self) -> Iterator[Experiment]:
        return iter(self.experiments)

    def __len__(self) -> int:
        return len(self.experiments)

    def get(self, experiment_id: str) -> Experiment:
        for exp in self.experiments:
            if exp.id == experiment_id:
                return exp
        raise UnknownExperimentError(f"unknown experiment id {experiment_id!r}")

    def filter_horizons(self, horizons: Iterable[int] | None) -> Dataset:
        if horizons is None:
            return self
        wanted = set(horizons)
        return Dataset(
            tuple(e for e in self.experiments if e.horizon in wanted),
            provenance=self.provenance,
        )

    def merge(self, other: Dataset) -> Dataset:
        provenance = "; ".join(p for p in (self.provenance, other.provenance) if p)
        return Dataset(self.experiments + other.experiments, provenance=provenance)


@dataclass
class TruthTable:
    """Realized values keyed by (indicator, target_period)."""

    entries: dict[tuple[str, str], float] = field(default_factory=dict)

    def add(self, indicator: str, target_period: str, value: float) -> None:
        if not math.isfinite(value):
            raise DataError(f"truth for {indicator} {target_period} is not finite")
        key = (indicator, normalize_quarter(target_period))
        if key in self.entries:
            raise DataError(f"duplicate truth entry for {key[0]} {key[1]}")
        self.entries[key] = value

    def lookup(self, indicator: str, target_period: str) -> float | None:
        return self.entries.get((indicator, target_period))

    def __len__(self) -> int:
        return len(self.entries)
