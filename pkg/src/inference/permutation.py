"""Two-sided permutation p-values for rank (or product-moment) correlation."""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from src.errors import ConfigError
from src.inference.ranks import check_pair, rank_array, unit_centered

logger = logging.getLogger(__name__)

DEFAULT_N_PERM = 100_000
MIN_N_PERM = 1000
# Permutations are drawn in fixed-size chunks, each from its own child of
# the master SeedSequence, so results do not depend on worker count.
CHUNK_SIZE = 1000
# Full enumeration beyond this is too large to hold in memory.
EXACT_MAX_N = 9
# |rho_perm| >= |rho_obs| is tested with this slack to absorb rounding ties.
TIE_TOLERANCE = 1e-12

PERMUTATION = "permutation"
EXACT = "exact-enumeration"


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n_pairs: int
    method: str
    statistic: str = "spearman"


def _prepare(x: Sequence[float], y: Sequence[float], statistic: str) -> tuple[np.ndarray, np.ndarray]:
    check_pair(x, y)
    if statistic == "spearman":
        x, y = rank_array(x), rank_array(y)
    elif statistic != "pearson":
        raise ConfigError(f"unknown correlation statistic {statistic!r}")
    return unit_centered(x, "x"), unit_centered(y, "y")


def _count_exact(ux: np.ndarray, uy: np.ndarray, threshold: float) -> tuple[int, int]:
    perms = np.array(list(itertools.permutations(range(uy.size))), dtype=np.intp)
    stats = uy[perms] @ ux
    return int(np.count_nonzero(np.abs(stats) >= threshold)), len(perms)


def _count_chunk(ux: np.ndarray, uy: np.ndarray, threshold: float, seed_seq: np.random.SeedSequence, size: int) -> int:
    rng = np.random.default_rng(seed_seq)
    shuffled = rng.permuted(np.tile(uy, (size, 1)), axis=1)
    return int(np.count_nonzero(np.abs(shuffled @ ux) >= threshold))


def correlation_p(
    x: Sequence[float],
    y: Sequence[float],
    n_perm: int = DEFAULT_N_PERM,
    seed: int = 0,
    statistic: str = "spearman",
    method: str = "auto",
    workers: int = 1,
) -> CorrelationResult:
    """Correlation of x and y with a two-sided permutation p-value.

    ``method="auto"`` enumerates all n! orderings of y when that is no more
    than ``n_perm`` (and n <= EXACT_MAX_N); the p-value is then the exact
    fraction of orderings, identity included, with |rho| >= |rho_obs|.
    Otherwise ``n_perm`` random orderings are drawn and the add-one estimate
    (count + 1) / (n_perm + 1) is returned, so p is never 0.
    """
    if n_perm < MIN_N_PERM:
        raise ConfigError(f"n_perm must be >= {MIN_N_PERM}, got {n_perm}")
    ux, uy = _prepare(x, y, statistic)
    n = ux.size
    rho = float(np.clip(np.dot(ux, uy), -1.0, 1.0))
    threshold = abs(rho) - TIE_TOLERANCE

    if method == "auto":
        method = EXACT if n <= EXACT_MAX_N and math.factorial(n) <= n_perm else PERMUTATION
    if method == EXACT:
        if n > EXACT_MAX_N:
            raise ConfigError(f"exact enumeration supports n <= {EXACT_MAX_N}, got {n}")
        count, total = _count_exact(ux, uy, threshold)
        p_value = count / total
    elif method == PERMUTATION:
        n_chunks = -(-n_perm // CHUNK_SIZE)
        children = np.random.SeedSequence(seed).spawn(n_chunks)
        sizes = [min(CHUNK_SIZE, n_perm - i * CHUNK_SIZE) for i in range(n_chunks)]
        args = [(ux, uy, threshold, child, size) for child, size in zip(children, sizes)]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                counts = list(pool.map(lambda a: _count_chunk(*a), args))
        else:
            counts = [_count_chunk(*a) for a in args]
        p_value = (sum(counts) + 1) / (n_perm + 1)
    else:
        raise ConfigError(f"unknown permutation method {method!r}")

    logger.debug("%s rho=%.4f p=%.3g n=%d (%s)", statistic, rho, p_value, n, method)
    return CorrelationResult(
        rho=rho,
        p_value=min(1.0, p_value),
        n_pairs=n,
        method=method,
        statistic=statistic,
    )
