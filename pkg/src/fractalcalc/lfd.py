r"""Numerical local fractional derivatives and critical orders.

The local fractional derivative of order :math:`0 < q < 1` is the limit
:math:`x' \to x` of the Riemann-Liouville derivative of :math:`f(x') - f(x)`.
Through the local fractional Taylor expansion

.. math::

    f(x \pm h) - f(x) \approx \frac{\mathcal{D}^q_{\pm} f(x)}{\Gamma(q + 1)} h^q,

it is estimated from difference quotients on a geometric ladder of offsets
:math:`h_k = h_0 \rho^k`. Functions with fractal structure oscillate around
the power law at geometric scales, so the limit is replaced by the median over
the finest half of the ladder and the spread is reported alongside.

The critical order (local Hölder exponent) is the slope of
:math:`\log \sup_{|h'| \le h_k} |f(x + h') - f(x)|` against :math:`\log h_k`.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from fractalcalc.errors import DomainError
from fractalcalc.staircase import gamma_plus_one

#: Increments below this multiple of ``max(1, |f(x)|)`` count as zero.
CONSTANT_TOL = 1.0e-13

#: Minimum number of usable ladder scales for a log-log fit.
MIN_SCALES = 4


class Side(enum.Enum):
    left = "left"
    right = "right"
    both = "both"


@dataclass(frozen=True)
class ScaleLadder:
    """Geometric offsets :math:`h_k = h_0 \\rho^k`, :math:`k = 0, \\dots, n - 1`."""

    h0: float = 1.0e-2
    rho: float = 0.5
    count: int = 20

    def __post_init__(self) -> None:
        if not (self.h0 > 0.0 and math.isfinite(self.h0)):
            raise DomainError(f"ladder h0 must be positive: got {self.h0!r}")
        if not (0.0 < self.rho < 1.0):
            raise DomainError(f"ladder rho must lie in (0, 1): got {self.rho!r}")
        if self.count < 8:
            raise DomainError(f"ladder needs at least 8 scales: got {self.count}")

    @classmethod
    def for_width(cls, width: float, rho: float = 0.5, count: int = 20) -> ScaleLadder:
        """Default ladder for a domain of the given *width*."""
        return cls(1.0e-2 * width, rho, count)

    @property
    def offsets(self) -> np.ndarray:
        return self.h0 * self.rho ** np.arange(self.count)


@dataclass(frozen=True)
class LfdEstimate:
    #: Estimated local Hölder exponent in (0, 1], or *None* if locally constant.
    critical_order: float | None
    #: Estimated :math:`\mathcal{D}^q f(x)`; *None* if not requested or if the
    #: two one-sided values disagree.
    coefficient: float | None
    side: Side
    fit_residual: float
    oscillation_band: float
    locally_constant: bool = False
    order: float | None = None
    left_coefficient: float | None = None
    right_coefficient: float | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "critical_order": self.critical_order,
            "locally_constant": self.locally_constant,
            "coefficient": self.coefficient,
            "order": self.order,
            "side": self.side.value,
            "left_coefficient": self.left_coefficient,
            "right_coefficient": self.right_coefficient,
            "fit_residual": self.fit_residual,
            "oscillation_band": self.oscillation_band,
            "metadata": self.metadata,
        }


# {{{ sampled functions


@dataclass(frozen=True)
class SampledFunction:
    """Piecewise linear interpolant of samples ``(x, f)`` with increasing *x*.

    Linear interpolation makes the function locally Lipschitz below the
    sample spacing, which caps the observable exponent at 1 there.
    """

    x: np.ndarray
    f: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if x.ndim != 1 or x.shape != f.shape or x.size < 2:
            raise DomainError("samples must be two 1D columns of equal length >= 2")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(f))):
            raise DomainError("samples must be finite")
        if np.any(np.diff(x) <= 0.0):
            k = int(np.argmax(np.diff(x) <= 0.0))
            raise DomainError(f"sample abscissae must be strictly increasing (row {k + 1})")

        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)

    @classmethod
    def from_csv(cls, path: str | Path) -> SampledFunction:
        """Read columns ``x,f`` (an optional header row is skipped)."""
        xs, fs = [], []
        with open(path, newline="") as infile:
            for lineno, row in enumerate(csv.reader(infile), start=1):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) < 2:
                    raise DomainError(f"{path}:{lineno}: expected two columns x,f")
                try:
                    x, f = float(row[0]), float(row[1])
                except ValueError:
                    if lineno == 1:
                        continue
                    raise DomainError(f"{path}:{lineno}: non-numeric entry {row!r}") from None
                xs.append(x)
                fs.append(f)

        return cls(np.array(xs), np.array(fs))

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    @property
    def metadata(self) -> dict[str, Any]:
        return {
            "interpolation": "linear",
            "min_spacing": float(np.min(np.diff(self.x))),
        }

    def __call__(self, t: Any) -> Any:
        t = np.asarray(t, dtype=float)
        if np.any(t < self.x[0]) or np.any(t > self.x[-1]):
            raise DomainError(
                f"evaluation outside the sampled range [{self.x[0]!r}, {self.x[-1]!r}]"
            )
        result = np.interp(t, self.x, self.f)
        return result if result.ndim else float(result)


# }}}


# {{{ estimators


def _sample(f: Callable[[float], Any], t: float) -> float:
    value = float(f(t))
    if not math.isfinite(value):
        raise DomainError(f"function is not finite at x = {t!r}")
    return value


def _increments(
    f: Callable[[float], Any], x: float, offsets: np.ndarray, side: Side
) -> tuple[float, dict[Side, np.ndarray]]:
    fx = _sample(f, x)
    sides = [Side.left, Side.right] if side is Side.both else [side]
    incs = {}
    for s in sides:
        sign = 1.0 if s is Side.right else -1.0
        incs[s] = np.array([_sample(f, x + sign * h) - fx for h in offsets])
    return fx, incs


def _fit_order(
    offsets: np.ndarray, incs: dict[Side, np.ndarray], fx: float
) -> tuple[float | None, float, bool, int]:
    magnitude = np.max(np.abs(np.stack(list(incs.values()))), axis=0)
    threshold = CONSTANT_TOL * max(1.0, abs(fx))
    if np.all(magnitude < threshold):
        return None, 0.0, True, 0

    # running sup over all sampled offsets within h_k
    sup = np.maximum.accumulate(magnitude[::-1])[::-1]
    usable = sup >= threshold
    n = int(np.count_nonzero(usable))
    if n < MIN_SCALES:
        raise DomainError(
            f"only {n} usable scales (need {MIN_SCALES}); enlarge the ladder or check f"
        )

    logh = np.log(offsets[usable])
    logs = np.log(sup[usable])
    slope, intercept = np.polyfit(logh, logs, 1)
    residual = float(np.sqrt(np.mean((logs - (slope * logh + intercept)) ** 2)))
    order = float(min(max(slope, np.finfo(float).eps), 1.0))

    return order, residual, False, n


def _check_side(side: Side | str) -> Side:
    try:
        return Side(side) if not isinstance(side, Side) else side
    except ValueError:
        raise DomainError(f"side must be left, right or both: got {side!r}") from None


def estimate_critical_order(
    f: Callable[[float], Any],
    x: float,
    ladder: ScaleLadder | None = None,
    side: Side | str = Side.both,
) -> LfdEstimate:
    """Estimate the local Hölder exponent of *f* at *x* by a log-log fit."""
    ladder = ladder if ladder is not None else ScaleLadder()
    side = _check_side(side)
    offsets = ladder.offsets

    fx, incs = _increments(f, float(x), offsets, side)
    order, residual, constant, n = _fit_order(offsets, incs, fx)

    return LfdEstimate(
        critical_order=order,
        coefficient=None,
        side=side,
        fit_residual=residual,
        oscillation_band=0.0,
        locally_constant=constant,
        metadata={"usable_scales": n, **getattr(f, "metadata", {})},
    )


def _extrapolate(ratios: np.ndarray, window: int) -> tuple[float, float]:
    tail = ratios[-window:]
    return float(np.median(tail)), float(np.max(tail) - np.min(tail))


def lfd_at(
    f: Callable[[float], Any],
    x: float,
    q: float,
    ladder: ScaleLadder | None = None,
    side: Side | str = Side.right,
) -> LfdEstimate:
    r"""Estimate the local fractional derivative :math:`\mathcal{D}^q f(x)`.

    The one-sided coefficient is :math:`\Gamma(1 + q)` times the median of
    :math:`(f(x \pm h_k) - f(x)) / h_k^q` over the finest
    ``max(3, count // 2)`` scales; the oscillation band is the spread of the
    same window (in coefficient units). For ``side="both"`` the two one-sided
    values are combined only if they agree within the band.
    """
    q = float(q)
    if not (0.0 < q < 1.0):
        raise DomainError(f"order must lie in (0, 1): got q = {q!r}")
    ladder = ladder if ladder is not None else ScaleLadder()
    side = _check_side(side)
    offsets = ladder.offsets

    fx, incs = _increments(f, float(x), offsets, side)
    order, residual, constant, n = _fit_order(offsets, incs, fx)
    metadata = {"usable_scales": n, **getattr(f, "metadata", {})}

    if constant:
        zero = {s: 0.0 for s in incs}
        return LfdEstimate(
            critical_order=None,
            coefficient=0.0,
            side=side,
            fit_residual=0.0,
            oscillation_band=0.0,
            locally_constant=True,
            order=q,
            left_coefficient=zero.get(Side.left),
            right_coefficient=zero.get(Side.right),
            metadata=metadata,
        )

    gamma = gamma_plus_one(q)
    window = max(3, ladder.count // 2)
    coeffs, bands = {}, {}
    for s, inc in incs.items():
        median, spread = _extrapolate(inc / offsets**q, window)
        coeffs[s] = gamma * median
        bands[s] = gamma * spread

    band = max(bands.values())
    if side is Side.both:
        left, right = coeffs[Side.left], coeffs[Side.right]
        agree = abs(left - right) <= band + 1.0e-12 * max(1.0, abs(left), abs(right))
        coefficient = 0.5 * (left + right) if agree else None
        metadata["branches_agree"] = agree
    else:
        coefficient = coeffs[side]

    return LfdEstimate(
        critical_order=order,
        coefficient=coefficient,
        side=side,
        fit_residual=residual,
        oscillation_band=band,
        order=q,
        left_coefficient=coeffs.get(Side.left),
        right_coefficient=coeffs.get(Side.right),
        metadata=metadata,
    )


# }}}


# {{{ solution verification


@dataclass(frozen=True)
class VerificationReport:
    points: np.ndarray
    #: :math:`|H(y(x)) - H(y_0) - u(x)|` at every sample point.
    integral_residuals: np.ndarray
    #: Numerical :math:`\mathcal{D}^q y` (right side) at every sample point.
    lfd_values: np.ndarray
    #: :math:`\bar{g}(x) h(y(x))` at every sample point.
    expected: np.ndarray
    #: Relative deviation of the pointwise check (noisy; see module notes).
    relative_deviation: np.ndarray
    tolerance: float

    @property
    def max_integral_residual(self) -> float:
        return float(np.max(self.integral_residuals))

    @property
    def flagged(self) -> bool:
        return self.max_integral_residual > self.tolerance


def verify_solution(
    candidate_y: Callable[[float], Any],
    problem: Any,
    sample_points: Sequence[float],
    *,
    depth: int = 12,
    ladder: ScaleLadder | None = None,
    tolerance: float = 1.0e-9,
) -> VerificationReport:
    r"""Check a candidate solution of a separable problem at points of :math:`C`.

    The integral-form residual uses the same running integral :math:`u` as
    :func:`~fractalcalc.solver.solve` and is the reliable check. The pointwise
    comparison of :math:`\mathcal{D}^q y` with :math:`\bar{g} h(y)` is
    reported too, but it inherits the log-periodic oscillations of the
    staircase and is exactly zero from the side of a gap.
    """
    from fractalcalc.integrals import evaluate_gbar
    from fractalcalc.sets import GapReport, locate
    from fractalcalc.solver import solve

    cset = problem.term.set
    points = np.asarray(sample_points, dtype=float)
    for x in points:
        loc = locate(cset, float(x), 40)
        if isinstance(loc, GapReport):
            raise DomainError(
                f"sample point x = {float(x)!r} lies in the gap {loc.gap!r}, not in C"
            )

    reference = solve(problem, depth)
    ladder = ladder if ladder is not None else ScaleLadder.for_width(cset.width)
    a, b = cset.ambient

    residuals, lfds, expected = [], [], []
    for x in points:
        x = float(x)
        y = float(candidate_y(x))
        residuals.append(reference.integral_residual(x, y))
        expected.append(float(evaluate_gbar(problem.term.gbar, np.array([x]))[0]) * problem.h.h(y))

        side = Side.right if x + ladder.h0 <= b else Side.left
        if x - ladder.h0 < a and side is Side.left:
            lfds.append(math.nan)
            continue
        est = lfd_at(candidate_y, x, problem.q, ladder, side)
        lfds.append(est.coefficient if est.coefficient is not None else math.nan)

    expected_arr = np.array(expected)
    lfd_arr = np.array(lfds)
    with np.errstate(divide="ignore", invalid="ignore"):
        deviation = np.abs(lfd_arr - expected_arr) / np.abs(expected_arr)

    return VerificationReport(
        points=points,
        integral_residuals=np.array(residuals),
        lfd_values=lfd_arr,
        expected=expected_arr,
        relative_deviation=deviation,
        tolerance=tolerance,
    )


# }}}
