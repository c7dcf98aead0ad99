"""Augmented quincunx forecasters.

Every individual starts from a prototype value ``g_hat`` and adds C cue
contributions ``eta_c``, each perceived with the right sign (u_c = +1) with
probability ``p_cue`` and with the wrong sign (u_c = -1) otherwise:

    g_i = g_hat + sum_c u_ic * eta_c,     G = g_hat + sum_c eta_c

Cue draws are independent across cues and across individuals.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.errors import ConfigError, DataError
from src.panel.models import Dataset, Experiment
from src.simulate.seeds import rng_for, sub_seed

logger = logging.getLogger(__name__)

DEFAULT_G_HAT = 1000.0
DEFAULT_N_CUES = 10
DEFAULT_CUE_LOW = -50.0
DEFAULT_CUE_HIGH = 50.0
DEFAULT_P_CUE = 0.7
DEFAULT_N_PER = 40
DEFAULT_N_EXPERIMENTS = 500


@dataclass(frozen=True)
class QuincunxParams:
    g_hat: float
    cues: tuple[float, ...]
    p_cue: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_cue <= 1.0:
            raise ConfigError(f"p_cue must be in [0, 1], got {self.p_cue}")
        if not math.isfinite(self.g_hat) or not all(math.isfinite(c) for c in self.cues):
            raise ConfigError("g_hat and cue weights must be finite")
        object.__setattr__(self, "cues", tuple(float(c) for c in self.cues))


@dataclass(frozen=True)
class QuincunxEnsembleConfig:
    """Cue weights are redrawn uniformly on [cue_low, cue_high] per experiment."""

    g_hat: float = DEFAULT_G_HAT
    n_cues: int = DEFAULT_N_CUES
    cue_low: float = DEFAULT_CUE_LOW
    cue_high: float = DEFAULT_CUE_HIGH
    p_cue: float = DEFAULT_P_CUE
    # Shift each draw of cues to sum to zero, so g_hat equals the truth.
    zero_sum_cues: bool = False


def quincunx_truth(params: QuincunxParams) -> float:
    return math.fsum([params.g_hat, *params.cues])


def sample_quincunx_panel(
    params: QuincunxParams,
    n: int,
    *,
    indicator: str = "quincunx",
    id: str | None = None,
) -> Experiment:
    if n < 1:
        raise DataError(f"quincunx panel needs n >= 1, got {n}")
    rng = np.random.default_rng(params.seed)
    cues = np.asarray(params.cues, dtype=float)
    signs = np.where(rng.random((n, cues.size)) < params.p_cue, 1.0, -1.0)
    contributions = (signs * cues).tolist()
    values = [math.fsum([params.g_hat, *row]) for row in contributions]
    return Experiment.from_values(values, quincunx_truth(params), indicator=indicator, id=id)


def quincunx_ensemble(
    config: QuincunxEnsembleConfig,
    n_experiments: int,
    n_per: int,
    seed: int,
) -> Dataset:
    """Independent quincunx experiments, each with freshly drawn cue weights."""
    if n_experiments < 2:
        raise ConfigError(f"n_experiments must be >= 2, got {n_experiments}")
    if config.cue_low > config.cue_high or config.n_cues < 0:
        raise ConfigError(
            f"empty cue range: {config.n_cues} cues on [{config.cue_low}, {config.cue_high}]"
        )

    experiments = []
    for k in range(n_experiments):
        key = f"quincunx-{k:05d}"
        cues = rng_for(seed, f"{key}:cues").uniform(config.cue_low, config.cue_high, config.n_cues)
        if config.zero_sum_cues and cues.size:
            cues = cues - cues.mean()
        params = QuincunxParams(
            g_hat=config.g_hat,
            cues=tuple(cues.tolist()),
            p_cue=config.p_cue,
            seed=sub_seed(seed, key),
        )
        experiments.append(sample_quincunx_panel(params, n_per, indicator=key, id=key))

    logger.info(
        "Generated %d quincunx experiments (C=%d, p=%.3g, N=%d)",
        n_experiments, config.n_cues, config.p_cue, n_per,
    )
    return Dataset(
        tuple(experiments),
        provenance=(
            f"quincunx ensemble: g_hat={config.g_hat} C={config.n_cues} "
            f"eta~U[{config.cue_low},{config.cue_high}] p={config.p_cue} "
            f"N={n_per} seed={seed}"
        ),
    )
