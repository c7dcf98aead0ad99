"""Tests for the panel model, experiment assembly and the dataset file."""

import os

import pytest

from src.errors import ConfigError, DataError, DuplicateForecasterError, EmptyPanelError, UnknownExperimentError
from src.panel.assemble import MISSING_TRUTH, TOO_FEW, assemble_experiments, dataset_records
from src.panel.models import Dataset, Estimate, Experiment, ForecastRecord, TruthTable, experiment_id, tagged_indicators
from src.panel.store import read_dataset, write_dataset
from src.parse.forecasts import parse_forecast_csv, parse_truth_csv

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def _records(n: int, indicator: str = "cpi", horizon: int = 0, period: str = "2019Q1") -> list[ForecastRecord]:
    return [
        ForecastRecord(
            survey_period=period,
            indicator=indicator,
            horizon=horizon,
            forecaster_id=f"f{i}",
            estimate=float(i),
        )
        for i in range(n)
    ]


def _truths(*entries: tuple[str, str, float]) -> TruthTable:
    table = TruthTable()
    for indicator, period, value in entries:
        table.add(indicator, period, value)
    return table


class TestExperiment:
    def test_from_values(self):
        exp = Experiment.from_values([1, 2, 3], 2.0)
        assert exp.n == 3
        assert exp.values == [1.0, 2.0, 3.0]
        assert exp.estimates[0].forecaster_id == "f0001"

    def test_empty(self):
        with pytest.raises(EmptyPanelError):
            Experiment.from_values([], 1.0)

    def test_non_finite_value(self):
        with pytest.raises(DataError):
            Experiment.from_values([1.0, float("nan")], 1.0)

    def test_duplicate_forecaster(self):
        with pytest.raises(DataError):
            Experiment("x", "x", 0, "2019Q1", 1.0, (Estimate("a", 1.0), Estimate("a", 2.0)))

    def test_target_period(self):
        exp = Experiment.from_values([1, 2], 1.0, horizon=2, survey_period="2019Q3")
        assert exp.target_period == "2020Q1"

    def test_id_format(self):
        assert experiment_id("Real GDP", 2, "2019Q3") == "real-gdp:h2:2019Q3"

    def test_tagged_id_keeps_slug(self):
        tagged = experiment_id("Real GDP", 2, "2019Q3", tagged=True)
        assert tagged.startswith("real-gdp~")
        assert tagged.endswith(":h2:2019Q3")
        assert tagged != experiment_id("real gdp", 2, "2019Q3", tagged=True)

    def test_tagged_indicators(self):
        assert tagged_indicators(["CPI", "cpi", "Real GDP", "失业率"]) == {"CPI", "cpi", "失业率"}
        assert tagged_indicators(["CPI", "CPI", "Real GDP"]) == set()


class TestDataset:
    def test_sorted(self):
        b = Experiment.from_values([1, 2], 1.0, indicator="b")
        a = Experiment.from_values([1, 2], 1.0, indicator="a")
        ds = Dataset((b, a))
        assert [e.indicator for e in ds] == ["a", "b"]

    def test_duplicate_keys(self):
        a = Experiment.from_values([1, 2], 1.0, indicator="a")
        with pytest.raises(DataError):
            Dataset((a, a))

    def test_unknown_id(self):
        ds = Dataset((Experiment.from_values([1, 2], 1.0),))
        with pytest.raises(UnknownExperimentError):
            ds.get("nope")

    def test_filter_horizons(self):
        exps = tuple(Experiment.from_values([1, 2], 1.0, horizon=h) for h in (0, 2, 4))
        ds = Dataset(exps).filter_horizons({0, 4})
        assert [e.horizon for e in ds] == [0, 4]


class TestAssemble:
    def test_nine_forecasters(self):
        result = assemble_experiments(_records(9), _truths(("cpi", "2019Q1", 2.0)), min_n=9)
        assert len(result.dataset) == 1
        assert next(iter(result.dataset)).n == 9
        assert result.drops == []

    def test_too_few(self):
        result = assemble_experiments(_records(5), _truths(("cpi", "2019Q1", 2.0)), min_n=9)
        assert len(result.dataset) == 0
        assert [d.reason for d in result.drops] == [TOO_FEW]

    def test_missing_truth(self):
        records = _records(4, horizon=2, period="2019Q3")
        result = assemble_experiments(records, _truths(("cpi", "2019Q3", 1.0)))
        assert [d.reason for d in result.drops] == [MISSING_TRUTH]
        assert "2020Q1" in result.drops[0].detail

    def test_truth_at_target_period(self):
        records = _records(4, horizon=2, period="2019Q3")
        result = assemble_experiments(records, _truths(("cpi", "2020Q1", 1.5)))
        assert next(iter(result.dataset)).truth == 1.5

    def test_duplicate_forecaster(self):
        records = _records(3) + _records(1)
        with pytest.raises(DuplicateForecasterError) as exc:
            assemble_experiments(records, _truths(("cpi", "2019Q1", 2.0)))
        assert exc.value.group == ("cpi", 0, "2019Q1")

    def test_min_n_floor(self):
        with pytest.raises(ConfigError):
            assemble_experiments(_records(3), TruthTable(), min_n=1)

    def test_horizon_filter(self):
        records = _records(3, horizon=0) + _records(3, horizon=4)
        truths = _truths(("cpi", "2019Q1", 1.0), ("cpi", "2020Q1", 1.0))
        result = assemble_experiments(records, truths, horizons={4})
        assert [e.horizon for e in result.dataset] == [4]
        assert result.groups == 1

    def test_every_group_accounted_for(self):
        records = _records(5, "a") + _records(1, "b") + _records(3, "c")
        truths = _truths(("a", "2019Q1", 1.0), ("b", "2019Q1", 1.0))
        result = assemble_experiments(records, truths)
        assert len(result.dataset) + len(result.drops) == result.groups == 3

    def test_names_sharing_a_slug_stay_distinct(self):
        records = _records(3, "CPI") + _records(3, "cpi")
        truths = _truths(("CPI", "2019Q1", 1.0), ("cpi", "2019Q1", 2.0))
        result = assemble_experiments(records, truths)
        ids = [e.id for e in result.dataset]
        assert len(result.dataset) == 2
        assert len(set(ids)) == 2
        assert all(i.startswith("cpi~") and i.endswith(":h0:2019Q1") for i in ids)

    def test_name_without_slug_gets_tagged_id(self):
        result = assemble_experiments(_records(3, "失业率"), _truths(("失业率", "2019Q1", 5.0)))
        (exp,) = result.dataset
        assert exp.id.startswith("~")
        assert exp.id == experiment_id("失业率", 0, "2019Q1", tagged=True)

    def test_unique_names_keep_readable_ids(self):
        records = _records(3, "CPI") + _records(3, "Real GDP")
        truths = _truths(("CPI", "2019Q1", 1.0), ("Real GDP", "2019Q1", 2.0))
        assert [e.id for e in assemble_experiments(records, truths).dataset] == [
            "cpi:h0:2019Q1",
            "real-gdp:h0:2019Q1",
        ]

    def test_order_independent_of_input_order(self):
        records = _records(3, "b") + _records(3, "a")
        truths = _truths(("a", "2019Q1", 1.0), ("b", "2019Q1", 1.0))
        forward = assemble_experiments(records, truths).dataset
        backward = assemble_experiments(list(reversed(records)), truths).dataset
        assert [e.id for e in forward] == [e.id for e in backward]


class TestFixtureDataset:
    @pytest.fixture(autouse=True)
    def assemble(self):
        records = parse_forecast_csv(os.path.join(FIXTURE_DIR, "forecasts.csv")).records
        truths = parse_truth_csv(os.path.join(FIXTURE_DIR, "truths.csv"))
        self.result = assemble_experiments(records, truths)

    def test_experiments(self):
        assert [e.id for e in self.result.dataset] == [
            "real-gdp:h0:2019Q3",
            "unemployment:h0:2019Q3",
        ]

    def test_drop(self):
        assert [(d.experiment_id, d.reason) for d in self.result.drops] == [
            ("real-gdp:h2:2019Q3", MISSING_TRUTH),
        ]

    def test_records_round_trip(self):
        records, truths = dataset_records(self.result.dataset)
        again = assemble_experiments(records, truths).dataset
        assert again == self.result.dataset

    def test_json_round_trip(self, tmp_path):
        path = str(tmp_path / "experiments.json")
        write_dataset(path, self.result.dataset)
        assert read_dataset(path).experiments == self.result.dataset.experiments
