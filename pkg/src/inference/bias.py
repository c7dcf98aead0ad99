"""Test whether a crowd mean is compatible with unbiased forecasters.

Under the null, each of the N estimates is an independent draw from
Normal(G, delta), so the crowd mean is Normal(G, delta / N) and the
two-tailed p-value of an observed mean is

    p = 1 - erf(|<g> - G| / sqrt(2 delta / N)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from src.errors import DataError, DegenerateNullError
from src.inference.special import erfc

# Smallest positive double; keeps p inside (0, 1] when erfc underflows.
MIN_P = math.ulp(0.0)


@dataclass(frozen=True)
class BiasTestResult:
    p: float
    z_arg: float


def bias_p_value(mean: float, truth: float, delta: float, n: int) -> BiasTestResult:
    if not delta > 0:
        raise DegenerateNullError(f"bias test needs delta > 0, got {delta}")
    if n < 2:
        raise DataError(f"bias test needs n >= 2, got {n}")
    z_arg = abs(mean - truth) / math.sqrt(2.0 * delta / n)
    return BiasTestResult(p=max(erfc(z_arg), MIN_P), z_arg=z_arg)
