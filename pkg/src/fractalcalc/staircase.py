r"""Distribution function of the natural measure and the devil's staircase.

The natural measure of a set with :math:`m` maps gives every depth-:math:`n`
cover interval mass :math:`m^{-n}`. Its distribution function :math:`F_C` is
evaluated digit by digit: descend into the child containing :math:`x`, adding
the mass of the children to its left, until :math:`x` lands in a gap.

The staircase

.. math::

    P_C(x) = \frac{(b - a)^q F_C(x)}{\Gamma(q + 1)}

solves :math:`\mathcal{D}^q f = 1_C` with :math:`P_C(a) = 0`, since every
depth-:math:`n` cover interval :math:`I` carries
:math:`|I|^q = (b - a)^q m^{-n}`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from fractalcalc.errors import DomainError
from fractalcalc.sets import SelfSimilarSet

#: Stop the digit descent once the remaining mass falls below this value.
MIN_WEIGHT = 1.0e-15


def gamma_plus_one(q: float) -> float:
    """Evaluate :math:`\\Gamma(q + 1)` for :math:`0 < q < 1`."""
    q = float(q)
    if not (0.0 < q < 1.0):
        raise DomainError(f"order must lie in (0, 1): got q = {q!r}")

    return math.gamma(1.0 + q)


def _cdf_scalar(cset: SelfSimilarSet, x: float, min_weight: float) -> float:
    a, b = cset.ambient
    width = cset.width
    tol = cset.boundary_tol
    if x <= a + tol:
        return 0.0
    if x >= b - tol:
        return 1.0

    c = cset.child_starts
    r = cset.ratio
    m = cset.m

    acc, w = 0.0, 1.0
    tau, s = 0.0, 1.0
    while True:
        s_child = s * r
        w_child = w / m
        for i in range(m):
            lo_i = a + width * (tau + c[i] * s)
            if x < lo_i - tol:
                # inside the gap left of child i
                return acc + i * w_child
            if x <= lo_i + width * s_child + tol:
                break
        else:
            return acc + w

        acc += i * w_child
        tau = tau + c[i] * s
        s = s_child
        w = w_child

        lo = a + width * tau
        size = width * s
        if x <= lo + tol:
            return acc
        if x >= lo + size - tol:
            return acc + w
        if w < min_weight or size <= 4.0 * tol:
            return acc + w * min(max((x - lo) / size, 0.0), 1.0)


def cdf(cset: SelfSimilarSet, x: Any, *, min_weight: float = MIN_WEIGHT) -> Any:
    """Distribution function :math:`F_C(x)` of the natural measure on *cset*.

    Values below the ambient interval clamp to 0 and values above it to 1.
    Accepts scalars or arrays.
    """
    if np.ndim(x) == 0:
        return _cdf_scalar(cset, float(x), min_weight)

    xs = np.asarray(x, dtype=float)
    return np.array([_cdf_scalar(cset, float(xi), min_weight) for xi in xs.flat]).reshape(
        xs.shape
    )


def staircase(cset: SelfSimilarSet, x: Any) -> Any:
    """Evaluate the devil's staircase :math:`P_C(x)` of *cset*."""
    return StaircaseEvaluator(cset)(x)


@dataclass(frozen=True)
class StaircaseEvaluator:
    """Callable :math:`P_C` for a fixed set, with the gamma factor cached."""

    set: SelfSimilarSet
    #: Descent stops once the child mass drops below this value.
    min_weight: float = MIN_WEIGHT
    gamma_factor: float = field(init=False)
    scale: float = field(init=False)

    def __post_init__(self) -> None:
        q = self.set.dimension
        object.__setattr__(self, "gamma_factor", gamma_plus_one(q))
        object.__setattr__(self, "scale", self.set.width**q / self.gamma_factor)

    @property
    def order(self) -> float:
        return self.set.dimension

    def __call__(self, x: Any) -> Any:
        return self.scale * cdf(self.set, x, min_weight=self.min_weight)

    def tabulate(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate on *n* uniformly spaced abscissae spanning the ambient interval."""
        if n < 2:
            raise DomainError(f"a staircase table needs at least 2 points: got {n}")

        x = np.linspace(*self.set.ambient, int(n))
        return x, self(x)
