"""Parse single-question guessing experiments (e.g. candies in a jar).

File layout::

    # truth=636 indicator=candies
    512
    700
    ...
"""

from __future__ import annotations

import logging
import math
import re
from typing import IO, Union

from src.errors import DataError, EmptyPanelError, RowError
from src.panel.models import Estimate, Experiment, indicator_label

logger = logging.getLogger(__name__)

# Guessing experiments have no survey calendar.
GUESSING_PERIOD = "0000Q1"

_META_RE = re.compile(r"(\w+)\s*=\s*(\S+)")


def _parse_metadata(line: str) -> dict[str, str]:
    return {k.lower(): v for k, v in _META_RE.findall(line.lstrip("#"))}


def parse_guessing_csv(source: Union[str, IO[str]]) -> Experiment:
    """Read a guessing file into a horizon-0 experiment with ids ``g0001, g0002, ...``."""
    if isinstance(source, str):
        try:
            with open(source, encoding="utf-8-sig") as f:
                lines = f.read().splitlines()
        except UnicodeDecodeError as exc:
            raise DataError(f"{source}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
        name = source
    else:
        lines = source.read().lstrip("\ufeff").splitlines()
        name = getattr(source, "name", "<stream>")

    meta: dict[str, str] = {}
    values: list[float] = []
    for line_no, raw in enumerate(lines, 1):
        text = raw.strip()
        if not text:
            continue
        if text.startswith("#"):
            meta.update(_parse_metadata(text))
            continue
        try:
            value = float(text)
        except ValueError:
            raise RowError(line_no, f"estimate {text!r} is not a number") from None
        if not math.isfinite(value):
            raise RowError(line_no, f"estimate {text!r} is not finite")
        values.append(value)

    if "truth" not in meta:
        raise DataError(f"{name}: missing '# truth=<value>' line")
    try:
        truth = float(meta["truth"])
    except ValueError:
        raise DataError(f"{name}: truth {meta['truth']!r} is not a number") from None
    if not values:
        raise EmptyPanelError(f"{name}: no estimates")

    indicator = meta.get("indicator", "guess")
    experiment = Experiment(
        id=indicator_label(indicator),
        indicator=indicator,
        horizon=0,
        survey_period=GUESSING_PERIOD,
        truth=truth,
        estimates=tuple(Estimate(f"g{i:04d}", v) for i, v in enumerate(values, 1)),
    )
    logger.info("Parsed guessing experiment %s: N=%d, G=%s", experiment.id, experiment.n, truth)
    return experiment


def serialize_guessing(experiment: Experiment) -> str:
    lines = [f"# truth={experiment.truth!r} indicator={experiment.indicator}"]
    lines.extend(repr(v) for v in experiment.values)
    return "\n".join(lines) + "\n"
