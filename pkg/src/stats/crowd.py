"""Per-panel wisdom-of-crowds statistics.

For a panel of estimates g_i with truth G:

    <g>   = (1/N) sum g_i
    gamma = G - <g>                      (signed collective error)
    eps   = (1/N) sum (g_i - G)^2        (mean quadratic individual error)
    delta = (1/N) sum (g_i - <g>)^2      (diversity)

and gamma^2 = eps - delta holds exactly in real arithmetic. All moments use
the population (1/N) normalization.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from src.errors import DataError, EmptyPanelError, ScaledFieldError, UndefinedSkewError
from src.panel.assemble import Drop
from src.panel.models import Dataset, Experiment

logger = logging.getLogger(__name__)

ZERO_DENOMINATOR = "zero-denominator"


@dataclass(frozen=True)
class SummaryStats:
    experiment_id: str
    horizon: int
    n: int
    truth: float
    mean: float
    gamma: float
    eps: float
    delta: float
    skew: float | None  # None when delta == 0
    xi: float
    scaled_error_signed: float
    scaled_error_abs: float
    scaled_rmse: float
    scaled_diversity: float
    dpt_residual: float

    @property
    def skew_defined(self) -> bool:
        return self.skew is not None

    def as_row(self) -> dict:
        return asdict(self)


def _values(experiment: Experiment | Sequence[float]) -> np.ndarray:
    raw = experiment.values if isinstance(experiment, Experiment) else experiment
    values = np.asarray(raw, dtype=float)
    if values.size == 0:
        raise EmptyPanelError("panel has no estimates")
    return values


def _mean(values: np.ndarray) -> float:
    if np.all(values == values[0]):
        return float(values[0])
    return math.fsum(values) / values.size


def crowd_mean(experiment: Experiment | Sequence[float]) -> float:
    """Arithmetic mean of the estimates, compensated summation."""
    return _mean(_values(experiment))


def diversity_decomposition(experiment: Experiment) -> tuple[float, float, float]:
    """Return ``(gamma, eps, delta)`` for a panel."""
    values = _values(experiment)
    truth = experiment.truth
    if not math.isfinite(truth):
        raise DataError(f"experiment {experiment.id}: truth is not finite")
    mean = _mean(values)
    gamma = truth - mean
    eps = math.fsum((values - truth) ** 2) / values.size
    delta = math.fsum((values - mean) ** 2) / values.size
    return gamma, eps, delta


def skewness(experiment: Experiment | Sequence[float]) -> float:
    """Third standardized moment; negative means a longer left tail."""
    values = _values(experiment)
    if values.size < 2:
        raise DataError("skewness needs at least 2 estimates")
    mean = _mean(values)
    dev = values - mean
    delta = math.fsum(dev**2) / values.size
    if delta == 0:
        raise UndefinedSkewError("skewness is undefined for a zero-diversity panel")
    return (math.fsum(dev**3) / values.size) / delta**1.5


def fraction_beating_crowd(experiment: Experiment) -> float:
    """Share of estimates strictly closer to the truth than the crowd mean."""
    values = _values(experiment)
    crowd_error = abs(_mean(values) - experiment.truth)
    winners = int(np.count_nonzero(np.abs(values - experiment.truth) < crowd_error))
    return winners / values.size


def summarize(experiment: Experiment) -> SummaryStats:
    if experiment.n < 2:
        raise DataError(f"experiment {experiment.id}: summary needs N >= 2, got {experiment.n}")
    gamma, eps, delta = diversity_decomposition(experiment)
    mean = crowd_mean(experiment)
    truth = experiment.truth
    if truth == 0:
        raise ScaledFieldError("truth G")
    if mean == 0:
        raise ScaledFieldError("crowd mean <g>")

    skew = skewness(experiment) if delta > 0 else None
    return SummaryStats(
        experiment_id=experiment.id,
        horizon=experiment.horizon,
        n=experiment.n,
        truth=truth,
        mean=mean,
        gamma=gamma,
        eps=eps,
        delta=delta,
        skew=skew,
        xi=fraction_beating_crowd(experiment),
        scaled_error_signed=gamma / truth,
        scaled_error_abs=abs(gamma) / truth,
        scaled_rmse=math.sqrt(eps) / truth,
        scaled_diversity=math.sqrt(delta) / mean,
        dpt_residual=gamma**2 - (eps - delta),
    )


def _summarize_or_drop(experiment: Experiment) -> SummaryStats | Drop:
    try:
        return summarize(experiment)
    except ScaledFieldError as exc:
        return Drop(experiment.id, ZERO_DENOMINATOR, str(exc))


def summarize_dataset(
    dataset: Dataset, workers: int = 1,
) -> tuple[list[SummaryStats], list[Drop]]:
    """Summarize every experiment, in dataset order.

    Experiments whose scaled fields are undefined are dropped and reported.
    The result does not depend on ``workers``.
    """
    experiments = list(dataset)
    if workers > 1 and len(experiments) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_summarize_or_drop, experiments, chunksize=64))
    else:
        outcomes = [_summarize_or_drop(e) for e in experiments]

    stats = [o for o in outcomes if isinstance(o, SummaryStats)]
    drops = [o for o in outcomes if isinstance(o, Drop)]
    logger.info("Summarized %d experiments (%d dropped)", len(stats), len(drops))
    return stats, drops
