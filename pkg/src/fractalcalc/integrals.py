r"""Fractal integrals :math:`\int \bar{g}(x) 1_C(x) \, d^q x`.

The integral is the limit of generalized Riemann sums

.. math::

    \sum_I \bar{g}(x_I^*) \frac{|I|^q}{\Gamma(q + 1)}

over the depth-:math:`n` cover of :math:`C`, with tags :math:`x_I^*` taken
at left endpoints (which are points of :math:`C`). Since every cover interval
has :math:`|I|^q = (b - a)^q m^{-n}`, the weights are exact.

Lower and upper sums bound the oscillation of :math:`\bar{g}` on each cover
interval. They are certified only when a Lipschitz bound is supplied; otherwise
they rely on samples at both endpoints and the midpoint and the result is
marked as heuristic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Sequence, Union

import numpy as np

from fractalcalc.errors import DomainError
from fractalcalc.sets import SelfSimilarSet, refine
from fractalcalc.staircase import StaircaseEvaluator, cdf, gamma_plus_one
from fractalcalc.summation import compensated_cumsum, exact_sum

GBar = Union[Callable[[Any], Any], float]

#: Sets in one sum must agree in dimension to this (absolute) tolerance.
DIMENSION_TOL = 1.0e-12


# {{{ integrands


@dataclass(frozen=True)
class Polynomial:
    """Vectorized polynomial :math:`\\sum_k c_k x^k` used for named integrands."""

    coefficients: tuple[float, ...]

    def __call__(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        result = np.zeros_like(x)
        for c in reversed(self.coefficients):
            result = result * x + c
        return result if result.ndim else float(result)

    @property
    def is_constant(self) -> bool:
        return all(c == 0.0 for c in self.coefficients[1:])

    def lipschitz_bound(self, interval: tuple[float, float]) -> float:
        """Bound on :math:`|p'|` over *interval*."""
        rmax = max(abs(interval[0]), abs(interval[1]))
        return math.fsum(
            k * abs(c) * rmax ** (k - 1) for k, c in enumerate(self.coefficients) if k > 0
        )


def parse_gbar(name: str) -> Polynomial:
    """Parse a named integrand: ``one``, ``x``, ``x2`` or ``poly:[c0, c1, ...]``."""
    name = name.strip()
    if name == "one":
        return Polynomial((1.0,))
    if name == "x":
        return Polynomial((0.0, 1.0))
    if name == "x2":
        return Polynomial((0.0, 0.0, 1.0))
    if name.startswith("poly:"):
        body = name[len("poly:"):].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise DomainError(f"expected poly:[c0, c1, ...]: got {name!r}")
        try:
            coeffs = tuple(float(c) for c in body[1:-1].split(",") if c.strip())
        except ValueError as exc:
            raise DomainError(f"malformed polynomial coefficients in {name!r}") from exc
        if not coeffs or not all(math.isfinite(c) for c in coeffs):
            raise DomainError(f"polynomial needs finite coefficients: got {name!r}")
        return Polynomial(coeffs)

    raise DomainError(f"unknown integrand {name!r} (expected one, x, x2 or poly:[...])")


def evaluate_gbar(gbar: GBar, x: np.ndarray) -> np.ndarray:
    """Evaluate *gbar* on the array *x*, falling back to a loop for scalar-only callables."""
    x = np.asarray(x, dtype=float)
    if isinstance(gbar, (int, float)):
        values = np.full(x.shape, float(gbar))
    else:
        try:
            values = np.asarray(gbar(x), dtype=float)
            if values.ndim == 0:
                values = np.full(x.shape, float(values))
            elif values.shape != x.shape:
                raise ValueError("shape mismatch")
        except (TypeError, ValueError):
            values = np.array([float(gbar(float(xi))) for xi in x.flat]).reshape(x.shape)

    bad = ~np.isfinite(values)
    if np.any(bad):
        raise DomainError(f"gbar is not finite at x = {float(x[bad].flat[0])!r}")

    return values


@dataclass(frozen=True)
class FractalTerm:
    r"""A fractal integrand :math:`\bar{g}(x) 1_C(x)`."""

    #: Smooth factor: a callable or a real constant.
    gbar: GBar
    set: SelfSimilarSet
    #: Optional bound on :math:`|\bar{g}'|`, which makes integral brackets certified.
    lipschitz_bound: float | None = None

    def __post_init__(self) -> None:
        if self.lipschitz_bound is not None and not (self.lipschitz_bound >= 0.0):
            raise DomainError(f"Lipschitz bound must be >= 0: got {self.lipschitz_bound!r}")
        cover = refine(self.set, 1)
        evaluate_gbar(self.gbar, np.concatenate([cover.lo, cover.hi]))

    @property
    def order(self) -> float:
        return self.set.dimension

    @property
    def constant(self) -> float | None:
        """Value of :math:`\\bar{g}` if it is known to be constant, else *None*."""
        if isinstance(self.gbar, (int, float)):
            return float(self.gbar)
        if isinstance(self.gbar, Polynomial) and self.gbar.is_constant:
            return float(self.gbar.coefficients[0])
        return None


# }}}


# {{{ results


class IntegrationMethod(enum.Enum):
    riemann_cover = "riemann_cover"
    self_similar_recursion = "self_similar_recursion"


@dataclass(frozen=True)
class IntegralResult:
    value: float
    lower: float
    upper: float
    depth: int
    method: IntegrationMethod
    #: *True* if the bracket is rigorous (a Lipschitz bound was supplied).
    certified: bool = False
    #: Tag choice for the Riemann sums.
    tag: str = "left"

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "depth": self.depth,
            "method": self.method.value,
            "certified": self.certified,
            "tag": self.tag,
        }


def _zero_result(depth: int, method: IntegrationMethod, certified: bool) -> IntegralResult:
    return IntegralResult(0.0, 0.0, 0.0, depth, method, certified=certified)


def _oscillation_bounds(
    term: FractalTerm, lo: np.ndarray, hi: np.ndarray, width: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    g_lo = evaluate_gbar(term.gbar, lo)
    g_mid = evaluate_gbar(term.gbar, lo + 0.5 * width)
    g_hi = evaluate_gbar(term.gbar, hi)

    g_inf = np.minimum(np.minimum(g_lo, g_mid), g_hi)
    g_sup = np.maximum(np.maximum(g_lo, g_mid), g_hi)
    if term.lipschitz_bound is not None:
        g_inf = g_inf - term.lipschitz_bound * width
        g_sup = g_sup + term.lipschitz_bound * width

    return g_lo, g_inf, g_sup


# }}}


# {{{ integrate_riemann


def _check_range(
    cset: SelfSimilarSet, interval: tuple[float, float] | None
) -> tuple[float, float]:
    a, b = cset.ambient
    if interval is None:
        return a, b

    x0, x1 = (float(v) for v in interval)
    tol = cset.boundary_tol
    if x0 > x1:
        raise DomainError(f"integration range must satisfy x0 <= x1: got [{x0!r}, {x1!r}]")
    if x0 < a - tol or x1 > b + tol:
        raise DomainError(
            f"integration range [{x0!r}, {x1!r}] leaves the ambient interval [{a!r}, {b!r}]"
        )

    return max(x0, a), min(x1, b)


def integrate_riemann(
    term: FractalTerm,
    interval: tuple[float, float] | None = None,
    depth: int = 12,
) -> IntegralResult:
    """Generalized Riemann sum of *term* over the depth-*depth* cover.

    Cover intervals inside *interval* contribute their full weight. Intervals
    straddling an endpoint of *interval* contribute half their weight to the
    value, nothing to the lower sum and their full weight to the upper sum
    (signs are respected, so the bracket stays valid for negative integrands).
    """
    cset = term.set
    x0, x1 = _check_range(cset, interval)
    certified = term.lipschitz_bound is not None
    method = IntegrationMethod.riemann_cover

    cover = refine(cset, depth)
    lo, hi = cover.lo, cover.hi
    tol = cset.boundary_tol
    inside = (lo >= x0 - tol) & (hi <= x1 + tol)
    straddle = (lo < x1 - tol) & (hi > x0 + tol) & ~inside
    if not (np.any(inside) or np.any(straddle)):
        return _zero_result(cover.depth, method, certified)

    g_lo, g_inf, g_sup = _oscillation_bounds(term, lo, hi, cover.interval_width)

    q = cset.dimension
    weight = cset.width**q / cset.m**cover.depth
    scale = weight / gamma_plus_one(q)

    value = exact_sum(np.concatenate([g_lo[inside], 0.5 * g_lo[straddle]]))
    lower = exact_sum(np.concatenate([g_inf[inside], np.minimum(g_inf[straddle], 0.0)]))
    upper = exact_sum(np.concatenate([g_sup[inside], np.maximum(g_sup[straddle], 0.0)]))

    return IntegralResult(
        value=scale * value,
        lower=scale * lower,
        upper=scale * upper,
        depth=cover.depth,
        method=method,
        certified=certified,
    )


# }}}


# {{{ integrate_recursive


def integrate_recursive(term: FractalTerm, depth: int = 20) -> IntegralResult:
    r"""Integral of *term* over the full ambient interval via self-similarity.

    The mean of :math:`\bar{g}` under the natural measure satisfies
    :math:`E[\bar{g}] = m^{-1} \sum_i E[\bar{g} \circ S_i]`; unrolling this
    *depth* times and closing each leaf with its midpoint gives a quadrature
    whose error is at most :math:`L |I| / 2` for a Lipschitz constant
    :math:`L`.
    """
    cset = term.set
    q = cset.dimension
    scale = cset.width**q / gamma_plus_one(q)
    method = IntegrationMethod.self_similar_recursion
    certified = term.lipschitz_bound is not None

    cover = refine(cset, depth)
    leaf = cover.interval_width
    mid = cover.lo + 0.5 * leaf
    g_mid = evaluate_gbar(term.gbar, mid)
    mean = exact_sum(g_mid) / len(cover)

    if certified:
        err = 0.5 * term.lipschitz_bound * leaf
    elif term.constant is not None:
        err = 0.0
    else:
        g_lo = evaluate_gbar(term.gbar, cover.lo)
        g_hi = evaluate_gbar(term.gbar, cover.hi)
        err = exact_sum(np.maximum(np.abs(g_lo - g_mid), np.abs(g_hi - g_mid))) / len(cover)

    return IntegralResult(
        value=scale * mean,
        lower=scale * (mean - err),
        upper=scale * (mean + err),
        depth=cover.depth,
        method=method,
        certified=certified or term.constant is not None,
    )


# }}}


# {{{ integrate_sum


def check_common_dimension(terms: Sequence[FractalTerm]) -> float:
    """Return the shared dimension of *terms*, rejecting mismatched sets."""
    if not terms:
        raise DomainError("at least one term is required")

    q = terms[0].order
    for i, term in enumerate(terms[1:], start=1):
        if abs(term.order - q) > DIMENSION_TOL:
            raise DomainError(
                f"term {i} has dimension {term.order!r} but term 0 has {q!r}: "
                "all sets in a sum must share the order of the equation"
            )

    return q


def integrate_sum(
    terms: Sequence[FractalTerm],
    interval: tuple[float, float] | None = None,
    depth: int = 12,
) -> IntegralResult:
    r"""Integral of :math:`\sum_j \bar{g}_j 1_{C_j}` for sets of equal dimension.

    Each term is integrated over the part of *interval* inside its own ambient
    interval (all of it if *interval* is *None*).
    """
    check_common_dimension(terms)

    results = []
    for term in terms:
        a, b = term.set.ambient
        if interval is None:
            sub = (a, b)
        else:
            sub = (max(interval[0], a), min(interval[1], b))
            if sub[0] > sub[1]:
                continue
        results.append(integrate_riemann(term, sub, depth))

    certified = all(t.lipschitz_bound is not None for t in terms)
    if not results:
        return _zero_result(int(depth), IntegrationMethod.riemann_cover, certified)

    return IntegralResult(
        value=exact_sum(r.value for r in results),
        lower=exact_sum(r.lower for r in results),
        upper=exact_sum(r.upper for r in results),
        depth=results[0].depth,
        method=IntegrationMethod.riemann_cover,
        certified=certified,
    )


# }}}


# {{{ primitive


@dataclass(frozen=True)
class Primitive:
    r"""Running integral :math:`u(x) = \int_{x_0}^{x} \bar{g} 1_C \, d^q t`.

    For a constant :math:`\bar{g} \equiv c` this is :math:`c (P_C(x) - P_C(x_0))`
    with the digit-exact staircase. Otherwise the depth-*depth* cover sums are
    accumulated in ascending order and the interval containing :math:`x` is
    weighted by the fraction of its mass left of :math:`x`, so :math:`u` is
    continuous, constant on gaps and monotone on each cover interval.
    """

    term: FractalTerm
    x0: float
    depth: int = 12
    _anchor: tuple[float, float, float] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        # x0 may lie outside the ambient interval (multi-set sums); the
        # integrand vanishes there
        object.__setattr__(self, "_anchor", self._cumulative(self.x0))

    @cached_property
    def _staircase(self) -> StaircaseEvaluator:
        return StaircaseEvaluator(self.term.set)

    @cached_property
    def _tables(self) -> dict[str, Any]:
        cset = self.term.set
        cover = refine(cset, self.depth)
        g_lo, g_inf, g_sup = _oscillation_bounds(self.term, cover.lo, cover.hi, cover.interval_width)

        q = cset.dimension
        scale = cset.width**q / cset.m**cover.depth / gamma_plus_one(q)
        return {
            "cover": cover,
            "count": len(cover),
            "g": g_lo * scale,
            "inf": g_inf * scale,
            "sup": g_sup * scale,
            "cum": compensated_cumsum(g_lo * scale),
            "cum_inf": compensated_cumsum(g_inf * scale),
            "cum_sup": compensated_cumsum(g_sup * scale),
        }

    @property
    def certified(self) -> bool:
        return self.term.constant is not None or self.term.lipschitz_bound is not None

    def _cumulative(self, x: float) -> tuple[float, float, float]:
        """Integral from the ambient left end to *x*: (value, lower, upper)."""
        cset = self.term.set
        a, b = cset.ambient
        x = min(max(float(x), a), b)

        c = self.term.constant
        if c is not None:
            value = c * float(self._staircase(x))
            return value, value, value

        t = self._tables
        cover = t["cover"]
        j = int(np.searchsorted(cover.lo, x, side="right")) - 1
        j = max(j, 0)
        if x >= cover.hi[j]:
            return float(t["cum"][j + 1]), float(t["cum_inf"][j + 1]), float(t["cum_sup"][j + 1])

        frac = min(max(cdf(cset, x) * t["count"] - j, 0.0), 1.0)
        if frac == 1.0 or frac == 0.0:
            # use the stored prefix sums so u is exactly constant across gaps
            k = j + int(frac)
            return float(t["cum"][k]), float(t["cum_inf"][k]), float(t["cum_sup"][k])
        return (
            float(t["cum"][j] + t["g"][j] * frac),
            float(t["cum_inf"][j] + t["inf"][j] * frac),
            float(t["cum_sup"][j] + t["sup"][j] * frac),
        )

    def __call__(self, x: Any) -> Any:
        if np.ndim(x) == 0:
            return self._cumulative(float(x))[0] - self._anchor[0]
        xs = np.asarray(x, dtype=float)
        return np.array([self(float(xi)) for xi in xs.flat]).reshape(xs.shape)

    def bounds(self, x: float) -> tuple[float, float]:
        """Lower and upper bounds on :math:`u(x)`."""
        _, lo_x, up_x = self._cumulative(float(x))
        _, lo_0, up_0 = self._anchor
        if x >= self.x0:
            return lo_x - lo_0, up_x - up_0
        return -(up_0 - up_x), -(lo_0 - lo_x)

    def breakpoints(self) -> np.ndarray:
        """Sorted abscissae between which :math:`u` is monotone."""
        a, b = self.term.set.ambient
        if self.term.constant is not None:
            points = np.array([a, self.x0, b])
        else:
            cover = self._tables["cover"]
            points = np.concatenate([cover.lo, cover.hi, [self.x0, b]])
        return np.unique(points)


def primitive(term: FractalTerm, x0: float | None = None, depth: int = 12) -> Primitive:
    """Build the running integral of *term* anchored at *x0* (default: left end)."""
    if x0 is None:
        x0 = term.set.ambient[0]
    return Primitive(term, float(x0), int(depth))


# }}}
