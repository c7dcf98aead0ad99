"""Histogram tables with cumulative distributions and marker values."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from src.errors import EmptyPanelError


@dataclass
class HistogramTable:
    bin_edges: list[float]
    counts: list[int]
    proportions: list[float]
    cdf: list[float]
    markers: dict[str, float | None] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def rows(self) -> list[list]:
        return [
            [self.bin_edges[i], self.bin_edges[i + 1], self.counts[i], self.proportions[i], self.cdf[i]]
            for i in range(len(self.counts))
        ]


HISTOGRAM_COLUMNS = ["bin_low", "bin_high", "count", "proportion", "cdf"]


def uniform_edges(bins: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
    return np.linspace(low, high, bins + 1)


def lattice_edges(n: int) -> np.ndarray:
    """One bin centred on each attainable fraction k/n, k = 0..n."""
    return (np.arange(n + 2) - 0.5) / n


def integer_edges(low: int, high: int) -> np.ndarray:
    """One unit-wide bin centred on each integer from low to high."""
    return np.arange(low, high + 2) - 0.5


def span_edges(values: Sequence[float], bins: int) -> np.ndarray:
    """Uniform bins over the data range; a zero-width range gets a unit-wide window."""
    a = np.asarray(values, dtype=float)
    low, high = float(a.min()), float(a.max())
    if low == high:
        low, high = low - 0.5, high + 0.5
    return np.linspace(low, high, bins + 1)


def empirical_cdf(values: Sequence[float], at: float) -> float:
    """Fraction of values <= ``at``."""
    a = np.asarray(values, dtype=float)
    return int(np.count_nonzero(a <= at)) / a.size


def histogram_table(values: Sequence[float], edges: np.ndarray) -> HistogramTable:
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        raise EmptyPanelError("histogram of an empty set")
    counts, edges = np.histogram(a, bins=edges)
    total = int(counts.sum())
    if total != a.size:
        raise ValueError(f"{a.size - total} values fall outside the histogram range")
    cumulative = np.cumsum(counts)
    return HistogramTable(
        bin_edges=edges.tolist(),
        counts=counts.tolist(),
        proportions=(counts / total).tolist(),
        cdf=(cumulative / total).tolist(),
    )
