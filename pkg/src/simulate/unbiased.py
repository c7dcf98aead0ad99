"""Unbiased forecasters: independent Gaussian estimates centred on the truth."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.errors import ConfigError, DataError, DegenerateNullError
from src.panel.assemble import ZERO_DIVERSITY, Drop, log_drops
from src.panel.models import Dataset, Estimate, Experiment
from src.simulate.seeds import rng_for, sub_seed
from src.stats.crowd import diversity_decomposition

logger = logging.getLogger(__name__)

# Range of panel sizes observed in the survey data.
DEFAULT_N_MIN = 9
DEFAULT_N_MAX = 87
DEFAULT_TRUTH = 100.0
DEFAULT_DELTA = 25.0
DEFAULT_N_EXPERIMENTS = 10_000


@dataclass(frozen=True)
class UnbiasedSpec:
    truth: float
    delta: float
    n: int
    seed: int

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise DegenerateNullError(f"unbiased panel needs delta > 0, got {self.delta}")
        if self.n < 2:
            raise DataError(f"unbiased panel needs n >= 2, got {self.n}")


def _draw(spec: UnbiasedSpec) -> np.ndarray:
    rng = np.random.default_rng(spec.seed)
    return rng.normal(spec.truth, math.sqrt(spec.delta), spec.n)


def sample_unbiased_panel(
    spec: UnbiasedSpec,
    *,
    indicator: str = "unbiased",
    horizon: int = 0,
    survey_period: str = "0000Q1",
    id: str | None = None,
) -> Experiment:
    """N independent draws from Normal(truth, delta); a pure function of ``spec``."""
    return Experiment.from_values(
        _draw(spec).tolist(),
        spec.truth,
        indicator=indicator,
        horizon=horizon,
        survey_period=survey_period,
        id=id,
    )


def _replica_label(label: str, replicate: int) -> str:
    return label if replicate == 0 else f"{label}@r{replicate}"


def replicate_dataset_unbiased(
    dataset: Dataset, seed: int, replicate: int = 0,
) -> tuple[Dataset, list[Drop]]:
    """Replace each panel by unbiased forecasters with the same N, G and delta.

    Replicate 0 keeps the original ids; replicate k > 0 tags ids and
    indicators with ``@r{k}`` so several replicates can be pooled.
    """
    experiments: list[Experiment] = []
    drops: list[Drop] = []
    for exp in dataset:
        _, _, delta = diversity_decomposition(exp)
        if delta == 0:
            drops.append(Drop(exp.id, ZERO_DIVERSITY, "delta = 0, no unbiased null"))
            continue
        spec = UnbiasedSpec(
            truth=exp.truth,
            delta=delta,
            n=exp.n,
            seed=sub_seed(seed, f"{exp.id}#{replicate}"),
        )
        values = _draw(spec).tolist()
        experiments.append(Experiment(
            id=_replica_label(exp.id, replicate),
            indicator=_replica_label(exp.indicator, replicate),
            horizon=exp.horizon,
            survey_period=exp.survey_period,
            truth=exp.truth,
            estimates=tuple(
                Estimate(orig.forecaster_id, v) for orig, v in zip(exp.estimates, values)
            ),
        ))
    log_drops(drops, "experiments without diversity")
    logger.info("Replicated %d experiments with unbiased forecasters", len(experiments))
    provenance = f"unbiased replica {replicate} (seed {seed}) of: {dataset.provenance}"
    return Dataset(tuple(experiments), provenance=provenance), drops


def replicate_many(
    dataset: Dataset, seed: int, replicates: int,
) -> tuple[Dataset, list[Drop]]:
    """Pool ``replicates`` independent unbiased replicas of ``dataset``."""
    if replicates < 1:
        raise ConfigError(f"replicates must be >= 1, got {replicates}")
    pooled, drops = replicate_dataset_unbiased(dataset, seed, 0)
    for k in range(1, replicates):
        replica, _ = replicate_dataset_unbiased(dataset, seed, k)
        pooled = pooled.merge(replica)
    return pooled, drops


def unbiased_ensemble(
    n_experiments: int,
    seed: int,
    n_min: int = DEFAULT_N_MIN,
    n_max: int = DEFAULT_N_MAX,
    truth: float = DEFAULT_TRUTH,
    delta: float = DEFAULT_DELTA,
) -> Dataset:
    """Stand-alone unbiased experiments with N uniform on [n_min, n_max]."""
    if n_experiments < 1:
        raise ConfigError(f"n_experiments must be >= 1, got {n_experiments}")
    if not 2 <= n_min <= n_max:
        raise ConfigError(f"need 2 <= n_min <= n_max, got {n_min}..{n_max}")
    experiments = []
    for k in range(n_experiments):
        key = f"unbiased-{k:05d}"
        n = int(rng_for(seed, f"{key}:n").integers(n_min, n_max, endpoint=True))
        spec = UnbiasedSpec(truth=truth, delta=delta, n=n, seed=sub_seed(seed, key))
        experiments.append(sample_unbiased_panel(spec, indicator=key, id=key))
    logger.info("Generated %d unbiased experiments (N in %d..%d)", n_experiments, n_min, n_max)
    return Dataset(
        tuple(experiments),
        provenance=f"unbiased ensemble: G={truth} delta={delta} N~U[{n_min},{n_max}] seed={seed}",
    )
