r"""Self-similar Cantor-type subsets of a real interval.

A set is described by :math:`m \ge 2` affine contractions
:math:`S_i(t) = r t + o_i` sharing one ratio :math:`r`, acting on an ambient
interval :math:`[a, b]`. The attractor has similarity dimension

.. math::

    q = \frac{\ln m}{\ln (1 / r)},

which is exact because the images :math:`S_i([a, b])` only touch at their
endpoints (open set condition).

Cover intervals are addressed by digit strings. The endpoints of an address
:math:`d_1 \dots d_n` are always recomputed by the same left-to-right fold

.. math::

    \tau = \sum_{k=1}^{n} c_{d_k} r^{k - 1}, \qquad
    \mathrm{lo} = a + (b - a) \tau, \qquad
    \mathrm{hi} = \mathrm{lo} + (b - a) r^n,

where :math:`c_i = (S_i(a) - a) / (b - a)` is the relative start of child
:math:`i`, so that :func:`refine`, :func:`locate` and
:func:`fractalcalc.staircase.cdf` all agree bit-for-bit on every endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator

import numpy as np

from fractalcalc.errors import DomainError

#: Default ceiling on the refinement depth accepted by :func:`refine`.
DEFAULT_MAX_DEPTH = 40

#: Relative tolerance (in units of the ambient width) used to snap points onto
#: cover-interval endpoints.
BOUNDARY_TOL = 1.0e-15

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"
_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class ContractionMap:
    """An affine contraction :math:`t \\mapsto \\mathrm{ratio} \\cdot t + \\mathrm{offset}`."""

    ratio: float
    offset: float

    def __post_init__(self) -> None:
        if not (0.0 < self.ratio < 1.0):
            raise DomainError(f"contraction ratio must lie in (0, 1): got {self.ratio!r}")
        if not math.isfinite(self.offset):
            raise DomainError(f"contraction offset must be finite: got {self.offset!r}")

    def __call__(self, t: Any) -> Any:
        return self.ratio * t + self.offset


@dataclass(frozen=True)
class GapReport:
    """Location of a point inside a removed gap of a set."""

    #: Generation (1-based) at which the point first falls outside the cover.
    generation: int
    #: Open gap ``(left, right)`` containing the point.
    gap: tuple[float, float]
    #: Address of the depth ``generation - 1`` interval that contains the gap.
    parent: str


@dataclass(frozen=True)
class SelfSimilarSet:
    """Attractor of equal-ratio contractions on an ambient interval.

    The maps must be listed in increasing order of the position of their
    images, so that lexicographic order of addresses is the left-to-right
    order of cover intervals.
    """

    ambient: tuple[float, float]
    maps: tuple[ContractionMap, ...]
    dimension: float = field(init=False)

    def __post_init__(self) -> None:
        a, b = (float(v) for v in self.ambient)
        maps = tuple(self.maps)
        object.__setattr__(self, "ambient", (a, b))
        object.__setattr__(self, "maps", maps)

        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise DomainError(f"ambient interval must satisfy a < b: got {self.ambient!r}")
        m = len(maps)
        if m < 2:
            raise DomainError(f"a self-similar set needs at least two maps: got {m}")
        if m > len(_DIGITS):
            raise DomainError(f"at most {len(_DIGITS)} maps are supported: got {m}")

        r = maps[0].ratio
        for f in maps[1:]:
            if abs(f.ratio - r) > 1.0e-14 * r:
                raise DomainError("all contraction ratios must be equal")
        if m * r >= 1.0:
            raise DomainError(
                f"m * r = {m * r!r} >= 1: the similarity dimension would be >= 1"
            )

        tol = max(BOUNDARY_TOL * (b - a), 4.0 * _EPS * max(abs(a), abs(b)))
        images = [(f(a), f(b)) for f in maps]
        for i, (lo, hi) in enumerate(images):
            if lo < a - tol or hi > b + tol:
                raise DomainError(f"image of map {i} [{lo!r}, {hi!r}] leaves the ambient interval")
        for i in range(m - 1):
            if images[i + 1][0] < images[i][1] - tol:
                raise DomainError(
                    f"images of maps {i} and {i + 1} overlap or are out of order "
                    "(open set condition violated)"
                )

        object.__setattr__(self, "dimension", math.log(m) / -math.log(r))

    # {{{ properties

    @property
    def m(self) -> int:
        """Number of maps."""
        return len(self.maps)

    @property
    def ratio(self) -> float:
        return self.maps[0].ratio

    @property
    def width(self) -> float:
        return self.ambient[1] - self.ambient[0]

    @property
    def boundary_tol(self) -> float:
        """Absolute snapping tolerance: ``BOUNDARY_TOL * width``, but never below
        the rounding of the ambient endpoints."""
        a, b = self.ambient
        return max(BOUNDARY_TOL * (b - a), 4.0 * _EPS * max(abs(a), abs(b)))

    @cached_property
    def child_starts(self) -> np.ndarray:
        """Relative start :math:`c_i` of each depth-1 child inside the ambient interval."""
        a, _ = self.ambient
        return np.array([(f(a) - a) / self.width for f in self.maps])

    # }}}

    # {{{ serialization

    def to_dict(self) -> dict[str, Any]:
        return {
            "ambient": [self.ambient[0], self.ambient[1]],
            "maps": [{"ratio": f.ratio, "offset": f.offset} for f in self.maps],
            "dimension": self.dimension,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SelfSimilarSet:
        try:
            ambient = tuple(float(v) for v in data["ambient"])
            maps = tuple(
                ContractionMap(float(f["ratio"]), float(f["offset"])) for f in data["maps"]
            )
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed set description: {exc}") from exc
        if len(ambient) != 2:
            raise DomainError("ambient must have exactly two endpoints")

        result = cls(ambient, maps)  # type: ignore[arg-type]
        if "dimension" in data:
            expected = float(data["dimension"])
            if abs(expected - result.dimension) > 1.0e-12 * result.dimension:
                raise DomainError(
                    f"stated dimension {expected!r} disagrees with ln(m)/ln(1/r) = "
                    f"{result.dimension!r}"
                )
        return result

    # }}}


def make_middle_p_cantor(p: float, ambient: tuple[float, float] = (0.0, 1.0)) -> SelfSimilarSet:
    """Construct the middle-:math:`1/p` Cantor set on *ambient*.

    The open middle part of length :math:`(b - a) / p` is removed from every
    interval, leaving two children with ratio :math:`r = (1 - 1/p) / 2`.
    """
    p = float(p)
    if not (math.isfinite(p) and p > 2.0):
        raise DomainError(f"middle-1/p Cantor sets require p > 2: got p = {p!r}")

    a, b = (float(v) for v in ambient)
    r = (1.0 - 1.0 / p) / 2.0
    return SelfSimilarSet(
        (a, b),
        (ContractionMap(r, a * (1.0 - r)), ContractionMap(r, b * (1.0 - r))),
    )


# {{{ covers


@dataclass(frozen=True)
class CoverInterval:
    lo: float
    hi: float
    address: str

    @property
    def depth(self) -> int:
        return len(self.address)


def address_of(index: int, m: int, depth: int) -> str:
    """Digit string of the *index*-th depth-*depth* interval (in sorted order)."""
    digits = []
    for _ in range(depth):
        index, d = divmod(index, m)
        digits.append(_DIGITS[d])
    return "".join(reversed(digits))


def interval_of(cset: SelfSimilarSet, address: str) -> tuple[float, float]:
    """Endpoints of the cover interval with the given *address*."""
    a, _ = cset.ambient
    width = cset.width
    c = cset.child_starts
    r = cset.ratio

    tau, s = 0.0, 1.0
    for ch in address:
        d = _DIGITS.index(ch)
        if d >= cset.m:
            raise DomainError(f"digit {ch!r} is not valid for a set with {cset.m} maps")
        tau = tau + c[d] * s
        s = s * r

    lo = a + width * tau
    return float(lo), float(lo + width * s)


@dataclass(frozen=True)
class SetCover:
    """All :math:`m^n` depth-:math:`n` images of the ambient interval, sorted."""

    set: SelfSimilarSet
    depth: int
    lo: np.ndarray
    hi: np.ndarray

    def __len__(self) -> int:
        return self.lo.size

    def __iter__(self) -> Iterator[CoverInterval]:
        return iter(self.intervals)

    def __getitem__(self, i: int) -> CoverInterval:
        return self.intervals[i]

    @property
    def interval_width(self) -> float:
        """Common length :math:`(b - a) r^n` of all intervals."""
        return self.set.width * self.set.ratio**self.depth

    @cached_property
    def intervals(self) -> tuple[CoverInterval, ...]:
        m = self.set.m
        return tuple(
            CoverInterval(float(lo), float(hi), address_of(i, m, self.depth))
            for i, (lo, hi) in enumerate(zip(self.lo, self.hi))
        )


def _cover_taus(cset: SelfSimilarSet, depth: int) -> tuple[np.ndarray, float]:
    c = cset.child_starts
    r = cset.ratio

    tau = np.zeros(1)
    s = 1.0
    for _ in range(depth):
        tau = (tau[:, None] + c[None, :] * s).ravel()
        s = s * r

    return tau, s


def refine(
    cset: SelfSimilarSet, depth: int, *, max_depth: int = DEFAULT_MAX_DEPTH
) -> SetCover:
    """Return the depth-*depth* cover of *cset*, sorted by left endpoint."""
    depth = int(depth)
    if depth < 0:
        raise DomainError(f"depth must be nonnegative: got {depth}")
    if depth > max_depth:
        raise DomainError(
            f"depth {depth} exceeds the maximum {max_depth} "
            f"({cset.m}^{depth} intervals); pass max_depth to override"
        )

    a, _ = cset.ambient
    tau, s = _cover_taus(cset, depth)
    lo = a + cset.width * tau
    hi = lo + cset.width * s

    return SetCover(cset, depth, lo, hi)


# }}}


# {{{ point location


def locate(cset: SelfSimilarSet, x: float, depth: int) -> str | GapReport:
    """Find the depth-*depth* cover interval containing *x*.

    :returns: the digit address of the interval, or a :class:`GapReport` if
        *x* falls strictly inside a removed gap at some generation
        :math:`g \\le` *depth*. Points within ``BOUNDARY_TOL * (b - a)`` of an
        interval endpoint (or within the rounding of the ambient endpoints, if
        larger) are counted as members of that interval.
    """
    a, b = cset.ambient
    x = float(x)
    width = cset.width
    tol = cset.boundary_tol
    if not (a - tol <= x <= b + tol):
        raise DomainError(f"x = {x!r} lies outside the ambient interval [{a!r}, {b!r}]")

    c = cset.child_starts
    r = cset.ratio
    m = cset.m

    tau, s = 0.0, 1.0
    address = []
    for generation in range(1, int(depth) + 1):
        s_child = s * r
        prev_hi = a + width * tau
        for i in range(m):
            lo_i = a + width * (tau + c[i] * s)
            hi_i = lo_i + width * s_child
            if x < lo_i - tol:
                return GapReport(generation, (float(prev_hi), float(lo_i)), "".join(address))
            if x <= hi_i + tol:
                break
            prev_hi = hi_i
        else:
            return GapReport(
                generation,
                (float(prev_hi), float(a + width * (tau + s))),
                "".join(address),
            )

        address.append(_DIGITS[i])
        tau = tau + c[i] * s
        s = s_child

    return "".join(address)


def contains(cset: SelfSimilarSet, x: float, depth: int = DEFAULT_MAX_DEPTH) -> bool:
    """Check whether *x* survives the first *depth* generations of gap removal."""
    return not isinstance(locate(cset, x, depth), GapReport)


# }}}
