"""Deterministic compensated accumulation.

Totals use :func:`math.fsum`, which returns the correctly rounded sum and is
therefore independent of the order (and any partitioning) of its inputs.
Running totals use Neumaier's variant of Kahan summation in a fixed,
ascending order.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


def exact_sum(values: Iterable[float]) -> float:
    """Correctly rounded sum of *values*."""
    if isinstance(values, np.ndarray):
        values = values.tolist()
    return math.fsum(values)


def compensated_cumsum(values: np.ndarray) -> np.ndarray:
    """Prefix sums ``out[k] = values[0] + ... + values[k - 1]`` (``out[0] = 0``)."""
    out = np.empty(len(values) + 1)
    out[0] = 0.0

    total, comp = 0.0, 0.0
    for k, v in enumerate(np.asarray(values, dtype=float).tolist()):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[k + 1] = total + comp

    return out
