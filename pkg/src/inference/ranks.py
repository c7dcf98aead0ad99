"""Average ranks and rank/product-moment correlation."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from src.errors import UndefinedCorrelationError


def rank_array(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Ranks 1..n; tied values share the mean of the positions they occupy."""
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return np.empty(0)
    order = np.argsort(a, kind="mergesort")
    ordered = a[order]
    starts = np.flatnonzero(np.r_[True, ordered[1:] != ordered[:-1]])
    ends = np.r_[starts[1:], a.size]
    ranks = np.empty(a.size)
    ranks[order] = np.repeat((starts + ends + 1) / 2.0, ends - starts)
    return ranks


def average_ranks(values: Sequence[float]) -> list[float]:
    return rank_array(values).tolist()


def unit_centered(values: Sequence[float] | np.ndarray, name: str = "values") -> np.ndarray:
    """Center and scale to unit norm, so a dot product of two is a correlation."""
    a = np.asarray(values, dtype=float)
    centered = a - a.mean()
    norm = np.sqrt(np.dot(centered, centered))
    if norm == 0 or np.all(a == a[0]):
        raise UndefinedCorrelationError(f"{name} is constant; correlation is undefined")
    return centered / norm


def check_pair(x: Sequence[float], y: Sequence[float]) -> None:
    if len(x) != len(y):
        raise UndefinedCorrelationError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise UndefinedCorrelationError(f"need at least 3 pairs, got {len(x)}")


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    check_pair(x, y)
    r = float(np.dot(unit_centered(x, "x"), unit_centered(y, "y")))
    return min(1.0, max(-1.0, r))


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation of the average ranks (correct under ties)."""
    check_pair(x, y)
    return pearson_r(rank_array(x), rank_array(y))
