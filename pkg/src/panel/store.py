"""Read and write the normalized ``experiments.json`` dataset file."""

from __future__ import annotations

import json
import logging
from typing import Any

from src.build.static import write_json
from src.errors import DataError
from src.panel.models import Dataset, Estimate, Experiment
from src.validate.schema import EXPERIMENT_SCHEMA, validate_document

logger = logging.getLogger(__name__)

DATASET_NAME = "experiments.json"


def dataset_to_document(dataset: Dataset) -> dict[str, Any]:
    return {
        "provenance": dataset.provenance,
        "experiments": [
            {
                "id": exp.id,
                "indicator": exp.indicator,
                "horizon": exp.horizon,
                "survey_period": exp.survey_period,
                "target_period": exp.target_period,
                "truth": exp.truth,
                "estimates": [
                    {"forecaster_id": est.forecaster_id, "value": est.value}
                    for est in exp.estimates
                ],
            }
            for exp in dataset
        ],
    }


def dataset_from_document(document: dict[str, Any]) -> Dataset:
    errors = validate_document(document, EXPERIMENT_SCHEMA)
    if errors:
        raise DataError(f"invalid dataset document: {'; '.join(errors[:5])}")
    experiments = tuple(
        Experiment(
            id=item["id"],
            indicator=item["indicator"],
            horizon=item["horizon"],
            survey_period=item["survey_period"],
            truth=float(item["truth"]),
            estimates=tuple(
                Estimate(e["forecaster_id"], float(e["value"])) for e in item["estimates"]
            ),
        )
        for item in document["experiments"]
    )
    return Dataset(experiments, provenance=document["provenance"])


def write_dataset(path: str, dataset: Dataset) -> None:
    write_json(path, dataset_to_document(dataset))
    logger.info("Wrote %d experiments to %s", len(dataset), path)


def read_dataset(path: str) -> Dataset:
    try:
        with open(path, encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON: {exc}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    dataset = dataset_from_document(document)
    logger.info("Read %d experiments from %s", len(dataset), path)
    return dataset
