r"""Separable local fractional differential equations.

Solves

.. math::

    \frac{dy}{dx^q} = \bar{g}(x) 1_C(x) h(y)

through the auxiliary pair :math:`dy/du = h(y)` and
:math:`du/dx^q = \bar{g}(x) 1_C(x)`. With :math:`H` an antiderivative of
:math:`1/h`, the solution is

.. math::

    H(y(x)) = H(y_0) + u(x), \qquad u(x) = \int_{x_0}^{x} \bar{g} 1_C \, d^q t.

The solution exists while :math:`H(y_0) + u(x)` stays inside the range of
:math:`H` on the monotone branch containing :math:`y_0`; the point where it
leaves is reported as the blow-up abscissa. No uniqueness claim is made: the
solver returns the separable-branch solution only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol, Sequence

import numpy as np
from scipy.optimize import brentq

from fractalcalc.errors import DomainError, NumericalFailure
from fractalcalc.integrals import (
    FractalTerm,
    check_common_dimension,
    parse_gbar,
    primitive,
)
from fractalcalc.sets import SelfSimilarSet, make_middle_p_cantor
from fractalcalc.summation import exact_sum

#: Tolerance on *y* for numerical inversion of :math:`H`.
INVERSION_TOL = 1.0e-12

_INF = math.inf


# {{{ h specifications


class HKind(enum.Enum):
    constant_one = "constant_one"
    linear = "linear"
    quadratic = "quadratic"
    power = "power"
    custom = "custom"


def _is_integer(k: float) -> bool:
    return float(k).is_integer()


def _signed_pow(y: float, e: float) -> float:
    # real power for negative bases, only used with integer exponents
    if y >= 0.0:
        return y**e
    return (-1.0) ** int(e) * (-y) ** e


@dataclass(frozen=True)
class HSpec:
    r"""Right-hand side factor :math:`h(y)` together with :math:`H = \int dy / h`.

    Branches are the open intervals between consecutive zeros of :math:`h`
    (the *singular_set*); :math:`H` is monotone on each of them.
    """

    kind: HKind
    #: Exponent for :attr:`HKind.power`.
    k: float | None = None
    h_func: Callable[[float], float] | None = None
    H_func: Callable[[float], float] | None = None
    H_inverse_func: Callable[[float], float] | None = None
    singular_set: tuple[float, ...] = ()
    #: Range of :math:`H` for custom specs; unbounded if not given.
    H_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind is HKind.power:
            if self.k is None or not math.isfinite(self.k):
                raise DomainError("power h(y) = y^k requires a finite exponent k")
        if self.kind is HKind.custom and (self.h_func is None or self.H_func is None):
            raise DomainError("custom h specs need both h and its antiderivative H")
        object.__setattr__(self, "singular_set", tuple(sorted(self.singular_set)))

    # {{{ constructors

    @classmethod
    def constant_one(cls) -> HSpec:
        return cls(HKind.constant_one)

    @classmethod
    def linear(cls) -> HSpec:
        return cls(HKind.linear, k=1.0, singular_set=(0.0,))

    @classmethod
    def quadratic(cls) -> HSpec:
        return cls(HKind.quadratic, k=2.0, singular_set=(0.0,))

    @classmethod
    def power(cls, k: float) -> HSpec:
        k = float(k)
        if k == 0.0:
            return cls.constant_one()
        if k == 1.0:
            return cls.linear()
        if k == 2.0:
            return cls.quadratic()
        return cls(HKind.power, k=k, singular_set=(0.0,))

    @classmethod
    def custom(
        cls,
        h: Callable[[float], float],
        H: Callable[[float], float],
        H_inverse: Callable[[float], float] | None = None,
        singular_set: Sequence[float] = (),
        H_range: tuple[float, float] | None = None,
    ) -> HSpec:
        return cls(
            HKind.custom,
            h_func=h,
            H_func=H,
            H_inverse_func=H_inverse,
            singular_set=tuple(float(s) for s in singular_set),
            H_range=H_range,
        )

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> HSpec:
        kind = data.get("kind")
        if kind == "constant_one":
            return cls.constant_one()
        if kind == "linear":
            return cls.linear()
        if kind == "quadratic":
            return cls.quadratic()
        if kind == "power":
            if "k" not in data:
                raise DomainError("h of kind 'power' needs an exponent 'k'")
            return cls.power(float(data["k"]))
        raise DomainError(
            f"unknown h kind {kind!r} (expected constant_one, linear, quadratic or power)"
        )

    def to_dict(self) -> dict[str, Any]:
        if self.kind is HKind.custom:
            raise DomainError("custom h specs cannot be serialized")
        if self.kind is HKind.power:
            return {"kind": self.kind.value, "k": self.k}
        return {"kind": self.kind.value}

    # }}}

    @property
    def exponent(self) -> float:
        if self.kind is HKind.constant_one:
            return 0.0
        assert self.k is not None
        return self.k

    def h(self, y: float) -> float:
        if self.kind is HKind.custom:
            assert self.h_func is not None
            return float(self.h_func(y))
        k = self.exponent
        if y < 0.0 and not _is_integer(k):
            raise DomainError(f"h(y) = y^{k} is not real for y = {y!r} < 0")
        if y == 0.0 and k < 0.0:
            raise DomainError(f"h(y) = y^{k} is singular at y = 0")
        return _signed_pow(y, k)

    def branch(self, y: float) -> tuple[float, float]:
        """Open branch (between zeros of :math:`h`) containing *y*."""
        if y in self.singular_set:
            raise DomainError(f"y = {y!r} is a zero of h")

        lo, hi = -_INF, _INF
        for s in self.singular_set:
            if s < y:
                lo = s
            elif s > y:
                hi = s
                break

        if self.kind is HKind.power and not _is_integer(self.exponent) and hi <= 0.0:
            raise DomainError(f"h(y) = y^{self.exponent} is only real for y > 0")
        return lo, hi

    def branches(self) -> list[tuple[float, float]]:
        points = [-_INF, *self.singular_set, _INF]
        result = list(zip(points[:-1], points[1:]))
        if self.kind is HKind.power and not _is_integer(self.exponent):
            result = [br for br in result if br[0] >= 0.0]
        return result

    def H(self, y: float, branch: tuple[float, float] | None = None) -> float:
        """Antiderivative of :math:`1/h` (zero constant)."""
        if self.kind is HKind.constant_one:
            return y
        if self.kind is HKind.linear:
            return math.log(abs(y))
        if self.kind is HKind.custom:
            assert self.H_func is not None
            return float(self.H_func(y))

        e = 1.0 - self.exponent
        return _signed_pow(y, e) / e

    def H_range_on(self, branch: tuple[float, float]) -> tuple[float, float]:
        """Open range of :math:`H` over *branch*."""
        if self.kind is HKind.constant_one or self.kind is HKind.linear:
            return -_INF, _INF
        if self.kind is HKind.custom:
            return self.H_range if self.H_range is not None else (-_INF, _INF)

        e = 1.0 - self.exponent
        # sign of y^e / e on the branch; |H| runs over (0, inf)
        sign = 1.0 if e > 0.0 else -1.0
        if branch[1] <= 0.0:
            sign *= (-1.0) ** int(e)
        return (0.0, _INF) if sign > 0.0 else (-_INF, 0.0)

    def H_inverse(self, v: float, branch: tuple[float, float], y_hint: float) -> float:
        """Solve :math:`H(y) = v` for *y* on *branch*."""
        if self.kind is HKind.constant_one:
            return v
        if self.kind is HKind.linear:
            return math.copysign(math.exp(v), branch[1])
        if self.kind is HKind.custom:
            if self.H_inverse_func is not None:
                return float(self.H_inverse_func(v))
            return _invert_monotone(self, v, branch, y_hint)

        e = 1.0 - self.exponent
        base = e * v
        if branch[1] <= 0.0:
            base *= (-1.0) ** int(e)
            return -(base ** (1.0 / e))
        return base ** (1.0 / e)

    def branch_for_value(self, v: float, sign: int | None) -> tuple[float, float]:
        """Pick the branch whose :math:`H`-range contains *v* (or matches *sign*)."""
        candidates = self.branches()
        if sign is not None:
            candidates = [br for br in candidates if (br[1] > 0.0 if sign > 0 else br[0] < 0.0)]
        matching = [br for br in candidates if _in_open(v, self.H_range_on(br))]
        if not matching:
            # v on a boundary of the range: take the branch it bounds
            matching = [br for br in candidates if v in self.H_range_on(br)]
        if len(matching) != 1:
            raise DomainError(
                f"cannot select a branch of h for H-value {v!r}; pass an explicit branch sign"
            )
        return matching[0]


def _in_open(v: float, interval: tuple[float, float]) -> bool:
    return interval[0] < v < interval[1]


def _invert_monotone(spec: HSpec, v: float, branch: tuple[float, float], y0: float) -> float:
    lo_b, hi_b = branch

    def residual(y: float) -> float:
        return spec.H(y) - v

    r0 = residual(y0)
    if r0 == 0.0:
        return y0

    # H increases where h > 0
    direction = 1.0 if (r0 < 0.0) == (spec.h(y0) > 0.0) else -1.0
    end = hi_b if direction > 0.0 else lo_b

    step = max(1.0, abs(y0))
    near = y0
    for _ in range(200):
        far = y0 + direction * step
        if (direction > 0.0 and far >= end) or (direction < 0.0 and far <= end):
            far = 0.5 * (near + end)
        r_far = residual(far)
        if not math.isfinite(r_far):
            raise NumericalFailure(f"H is not finite at y = {far!r} while inverting H(y) = {v!r}")
        if (r_far > 0.0) != (r0 > 0.0) or r_far == 0.0:
            a, b = sorted((near, far))
            return float(brentq(residual, a, b, xtol=INVERSION_TOL, rtol=4.0 * np.finfo(float).eps))
        near = far
        step *= 2.0

    raise NumericalFailure(f"could not bracket a root of H(y) = {v!r} (u value out of reach)")


# }}}


# {{{ problems


@dataclass(frozen=True)
class SeparableProblem:
    r"""The initial value problem :math:`dy/dx^q = \bar{g} 1_C h(y)`, :math:`y(x_0) = y_0`.

    Instead of *y0*, an *integration_constant* :math:`K` may be given, in which
    case the solution is :math:`H(y) = K + u(x)` with :math:`u(x_0) = 0`; the
    branch of :math:`h` is then chosen by *branch* (the sign of :math:`y`) or
    inferred from the data. The order of the equation is always the dimension
    of the set.
    """

    term: FractalTerm
    h: HSpec
    x0: float
    y0: float | None = None
    integration_constant: float | None = None
    branch: int | None = None
    #: If given, must equal the dimension of the set.
    order: float | None = None

    def __post_init__(self) -> None:
        cset = self.term.set
        a, b = cset.ambient
        tol = cset.boundary_tol
        if not (a - tol <= self.x0 <= b + tol):
            raise DomainError(f"x0 = {self.x0!r} lies outside the ambient interval [{a!r}, {b!r}]")
        if (self.y0 is None) == (self.integration_constant is None):
            raise DomainError("exactly one of y0 and integration_constant must be given")
        if self.order is not None and abs(self.order - cset.dimension) > 1.0e-12:
            raise DomainError(
                f"order q = {self.order!r} differs from the set dimension {cset.dimension!r}"
            )
        if self.branch not in (None, -1, 1):
            raise DomainError(f"branch must be -1, +1 or None: got {self.branch!r}")

    @property
    def q(self) -> float:
        return self.term.order


def problem_from_dict(data: dict[str, Any]) -> tuple[SeparableProblem, int]:
    """Parse a problem document ``{set, gbar, h, x0, y0, depth}``.

    ``set`` is either a full set description or ``{"p": p, "ambient": [a, b]}``
    for a middle-1/p Cantor set.
    """
    try:
        set_data = data["set"]
        if "maps" in set_data:
            cset = SelfSimilarSet.from_dict(set_data)
        else:
            cset = make_middle_p_cantor(
                float(set_data["p"]), tuple(set_data.get("ambient", (0.0, 1.0)))
            )
        gbar = parse_gbar(str(data.get("gbar", "one")))
        lipschitz = data.get("lipschitz")
        term = FractalTerm(
            gbar, cset, None if lipschitz is None else float(lipschitz)
        )
        h = HSpec.from_dict(data.get("h", {"kind": "constant_one"}))
        x0 = float(data.get("x0", cset.ambient[0]))
        y0 = data.get("y0")
        constant = data.get("constant")
        problem = SeparableProblem(
            term,
            h,
            x0,
            y0=None if y0 is None else float(y0),
            integration_constant=None if constant is None else float(constant),
            branch=data.get("branch"),
        )
        depth = int(data.get("depth", 12))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed problem description: {exc!r}") from exc

    return problem, depth


# }}}


# {{{ solutions


class RunningIntegral(Protocol):
    def __call__(self, x: Any) -> Any: ...

    def bounds(self, x: float) -> tuple[float, float]: ...

    def breakpoints(self) -> np.ndarray: ...


@dataclass(frozen=True)
class SumIntegral:
    """Sum of running integrals over several sets."""

    parts: tuple[Any, ...]

    def __call__(self, x: Any) -> Any:
        if np.ndim(x) == 0:
            return exact_sum(float(p(x)) for p in self.parts)
        xs = np.asarray(x, dtype=float)
        return np.array([self(float(xi)) for xi in xs.flat]).reshape(xs.shape)

    def bounds(self, x: float) -> tuple[float, float]:
        bs = [p.bounds(x) for p in self.parts]
        return exact_sum(b[0] for b in bs), exact_sum(b[1] for b in bs)

    def breakpoints(self) -> np.ndarray:
        return np.unique(np.concatenate([p.breakpoints() for p in self.parts]))


@dataclass(frozen=True)
class Validity:
    """Interval of abscissae on which a solution exists."""

    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __contains__(self, x: float) -> bool:
        above = x > self.lo if self.lo_open else x >= self.lo
        below = x < self.hi if self.hi_open else x <= self.hi
        return above and below


@dataclass(frozen=True)
class SolutionValue:
    y: float
    lower: float
    upper: float


@dataclass(frozen=True)
class SolutionEvaluator:
    r"""Evaluable solution :math:`y(x) = H^{-1}(H(y_0) + u(x))`."""

    u: RunningIntegral
    h: HSpec
    x0: float
    #: Initial value, or *None* when anchored by an integration constant.
    y0: float | None
    #: :math:`H(y_0)`, or the integration constant.
    anchor: float
    branch: tuple[float, float]
    domain: tuple[float, float]
    validity: Validity
    #: Abscissa right of :math:`x_0` where the solution leaves its branch.
    blowup: float | None = None
    #: Same, left of :math:`x_0`.
    blowup_left: float | None = None
    #: *True* if :math:`h(y_0) = 0` and the solution is the constant :math:`y_0`.
    equilibrium: bool = False
    depth: int = 12
    diagnostics: tuple[str, ...] = field(default=())

    def _y_of_u(self, u: float) -> float:
        if self.equilibrium:
            assert self.y0 is not None
            return self.y0

        y0 = self.y0
        kind = self.h.kind
        if y0 is not None:
            if u == 0.0:
                return y0
            if kind is HKind.constant_one:
                return y0 + u
            if kind is HKind.linear:
                return y0 * math.exp(u)
            if kind is HKind.quadratic:
                return y0 / (1.0 - y0 * u)

        v = self.anchor + u
        if not _in_open(v, self.h.H_range_on(self.branch)):
            return math.copysign(_INF, 1.0 if self.branch[1] > 0.0 else -1.0)
        return self.h.H_inverse(v, self.branch, y0 if y0 is not None else _branch_hint(self.branch))

    def evaluate(self, x: float) -> SolutionValue:
        x = float(x)
        if x not in self.validity:
            where = []
            if self.blowup is not None:
                where.append(f"blow-up at x = {self.blowup!r}")
            if self.blowup_left is not None:
                where.append(f"blow-up at x = {self.blowup_left!r} (left of x0)")
            detail = "; ".join(where) if where else "outside the domain"
            raise DomainError(
                f"x = {x!r} is outside the validity interval "
                f"[{self.validity.lo!r}, {self.validity.hi!r}] ({detail})"
            )

        if self.equilibrium:
            assert self.y0 is not None
            return SolutionValue(self.y0, self.y0, self.y0)

        u = float(self.u(x))
        y = self._y_of_u(u)
        u_lo, u_hi = self.u.bounds(x)
        y_a, y_b = self._y_of_u(u_lo), self._y_of_u(u_hi)
        return SolutionValue(y, min(y_a, y_b, y), max(y_a, y_b, y))

    def __call__(self, x: Any) -> Any:
        if np.ndim(x) == 0:
            return self.evaluate(float(x)).y
        xs = np.asarray(x, dtype=float)
        return np.array([self.evaluate(float(xi)).y for xi in xs.flat]).reshape(xs.shape)

    def integral_residual(self, x: float, y: float) -> float:
        r"""Residual :math:`|H(y) - H(y_0) - u(x)|` of a candidate value *y* at *x*."""
        if self.equilibrium:
            return abs(y - self.y0) if self.y0 is not None else 0.0
        return abs(self.h.H(y) - self.anchor - float(self.u(x)))

    def tabulate(self, n: int) -> list[tuple[float, float, float, float]]:
        """Rows ``(x, y, lower, upper)`` on *n* uniform abscissae over the domain.

        Abscissae outside the validity interval are dropped.
        """
        if n < 2:
            raise DomainError(f"a solution table needs at least 2 points: got {n}")

        rows = []
        for x in np.linspace(*self.domain, int(n)):
            x = float(x)
            if x not in self.validity:
                continue
            value = self.evaluate(x)
            rows.append((x, value.y, value.lower, value.upper))
        return rows


def _branch_hint(branch: tuple[float, float]) -> float:
    lo, hi = branch
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(hi):
        return lo + 1.0
    if math.isinf(lo):
        return hi - 1.0
    return 0.5 * (lo + hi)


def _bisect_exit(
    inside: Callable[[float], bool], good: float, bad: float
) -> float:
    """Shrink ``[good, bad]`` onto the exit point; returns the first bad abscissa."""
    for _ in range(2000):
        mid = 0.5 * (good + bad)
        if mid == good or mid == bad:
            break
        if inside(mid):
            good = mid
        else:
            bad = mid
    return bad


def _scan_side(
    inside: Callable[[float], bool], x0: float, points: np.ndarray, start_inside: bool
) -> tuple[float, float | None, bool]:
    """Walk *points* outward from *x0*; return (reach, exit abscissa, any valid)."""
    prev = x0
    prev_inside = start_inside
    any_valid = start_inside
    for t in points:
        t = float(t)
        if inside(t):
            prev, prev_inside, any_valid = t, True, True
            continue
        if prev_inside:
            exit_x = _bisect_exit(inside, prev, t)
            return exit_x, exit_x, True
        # still outside: the solution never entered its branch on this side
        return prev, None, any_valid
    return prev, None, any_valid


def _compute_validity(
    u: RunningIntegral,
    anchor: float,
    vrange: tuple[float, float],
    x0: float,
    domain: tuple[float, float],
) -> tuple[Validity, float | None, float | None, list[str]]:
    def inside(x: float) -> bool:
        return _in_open(anchor + float(u(x)), vrange)

    notes = []
    start_inside = inside(x0)
    bps = u.breakpoints()
    right_pts = np.append(bps[bps > x0], domain[1])
    right_pts = np.unique(right_pts[right_pts > x0])
    left_pts = np.append(bps[bps < x0], domain[0])
    left_pts = np.unique(left_pts[left_pts < x0])[::-1]

    hi, blowup, right_ok = _scan_side(inside, x0, right_pts, start_inside)
    lo, blowup_left, left_ok = _scan_side(inside, x0, left_pts, start_inside)

    if not start_inside:
        if not (right_ok or left_ok):
            raise DomainError("the initial data lies outside every branch of H")
        notes.append("x0 lies on the branch boundary and is excluded from the validity interval")
        if not left_ok:
            lo = x0
        if not right_ok:
            hi = x0

    if blowup is not None:
        notes.append(f"solution leaves its branch at x = {blowup!r}")
    if blowup_left is not None:
        notes.append(f"solution leaves its branch at x = {blowup_left!r} (left of x0)")

    validity = Validity(
        lo,
        hi,
        lo_open=blowup_left is not None or (not start_inside and lo == x0),
        hi_open=blowup is not None or (not start_inside and hi == x0),
    )
    return validity, blowup, blowup_left, notes


def _assemble(
    u: RunningIntegral,
    h: HSpec,
    x0: float,
    y0: float | None,
    constant: float | None,
    branch_sign: int | None,
    domain: tuple[float, float],
    depth: int,
) -> SolutionEvaluator:
    if y0 is not None:
        if h.h(y0) == 0.0:
            return SolutionEvaluator(
                u=u,
                h=h,
                x0=x0,
                y0=y0,
                anchor=0.0,
                branch=(y0, y0),
                domain=domain,
                validity=Validity(*domain),
                equilibrium=True,
                depth=depth,
                diagnostics=(f"h(y0) = 0: constant equilibrium solution y = {y0!r}",),
            )
        branch = h.branch(y0)
        anchor = h.H(y0, branch)
    else:
        assert constant is not None
        anchor = constant
        if branch_sign is None:
            # infer from the first point where u moves away from zero
            probe = anchor
            for t in u.breakpoints():
                val = float(u(float(t)))
                if val != 0.0:
                    probe = anchor + val
                    break
            branch = h.branch_for_value(probe, None)
        else:
            branch = h.branch_for_value(anchor, branch_sign)

    vrange = h.H_range_on(branch)
    validity, blowup, blowup_left, notes = _compute_validity(u, anchor, vrange, x0, domain)

    return SolutionEvaluator(
        u=u,
        h=h,
        x0=x0,
        y0=y0,
        anchor=anchor,
        branch=branch,
        domain=domain,
        validity=validity,
        blowup=blowup,
        blowup_left=blowup_left,
        depth=depth,
        diagnostics=tuple(notes),
    )


def solve(problem: SeparableProblem, depth: int = 12) -> SolutionEvaluator:
    """Solve a separable problem via :math:`H(y) = H(y_0) + u(x)`.

    :arg depth: cover depth used for :math:`u` when :math:`\\bar{g}` is not
        constant (constant factors use the digit-exact staircase).
    """
    u = primitive(problem.term, problem.x0, depth)
    return _assemble(
        u,
        problem.h,
        problem.x0,
        problem.y0,
        problem.integration_constant,
        problem.branch,
        problem.term.set.ambient,
        int(depth),
    )


def evaluate(solution: SolutionEvaluator, x: float) -> SolutionValue:
    """Evaluate *solution* at *x* with its propagated bracket."""
    return solution.evaluate(x)


def solve_sum_rhs(
    terms: Sequence[FractalTerm], x0: float, y0: float, depth: int = 12
) -> SolutionEvaluator:
    r"""Solve :math:`dy/dx^q = \sum_j \bar{g}_j 1_{C_j}` with :math:`y(x_0) = y_0`.

    The sets must share one dimension; the solution is
    :math:`y_0 + \sum_j u_j(x)`.
    """
    check_common_dimension(terms)
    parts = tuple(primitive(t, x0, depth) for t in terms)
    lo = min([t.set.ambient[0] for t in terms] + [x0])
    hi = max([t.set.ambient[1] for t in terms] + [x0])
    return _assemble(
        SumIntegral(parts),
        HSpec.constant_one(),
        float(x0),
        float(y0),
        None,
        None,
        (lo, hi),
        int(depth),
    )


# }}}
