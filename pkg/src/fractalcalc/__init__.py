"""Fractal calculus on self-similar Cantor-type sets.

The package builds middle-1/p Cantor sets and their covers, evaluates the
devil's staircase solving the local fractional equation
:math:`\\mathcal{D}^q f = 1_C`, integrates :math:`\\bar{g} 1_C` with certified
brackets, estimates local fractional derivatives numerically and solves
separable equations :math:`dy/dx^q = \\bar{g}(x) 1_C(x) h(y)`.

>>> from fractalcalc import gamma_plus_one, make_middle_p_cantor, staircase
>>> C = make_middle_p_cantor(3)
>>> round(staircase(C, 1.0) * gamma_plus_one(C.dimension), 12)
1.0
"""

try:
    from importlib.metadata import PackageNotFoundError, version as _version

    __version__ = _version("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

from fractalcalc.errors import DomainError, FractalCalcError, NumericalFailure
from fractalcalc.integrals import (
    FractalTerm,
    IntegralResult,
    IntegrationMethod,
    Polynomial,
    integrate_recursive,
    integrate_riemann,
    integrate_sum,
    parse_gbar,
    primitive,
)
from fractalcalc.lfd import (
    LfdEstimate,
    SampledFunction,
    ScaleLadder,
    Side,
    estimate_critical_order,
    lfd_at,
    verify_solution,
)
from fractalcalc.sets import (
    ContractionMap,
    CoverInterval,
    GapReport,
    SelfSimilarSet,
    SetCover,
    locate,
    make_middle_p_cantor,
    refine,
)
from fractalcalc.solver import (
    HKind,
    HSpec,
    SeparableProblem,
    SolutionEvaluator,
    evaluate,
    solve,
    solve_sum_rhs,
)
from fractalcalc.staircase import StaircaseEvaluator, cdf, gamma_plus_one, staircase

__all__ = [
    "ContractionMap",
    "CoverInterval",
    "DomainError",
    "FractalCalcError",
    "FractalTerm",
    "GapReport",
    "HKind",
    "HSpec",
    "IntegralResult",
    "IntegrationMethod",
    "LfdEstimate",
    "NumericalFailure",
    "Polynomial",
    "SampledFunction",
    "ScaleLadder",
    "SelfSimilarSet",
    "SeparableProblem",
    "SetCover",
    "Side",
    "SolutionEvaluator",
    "StaircaseEvaluator",
    "cdf",
    "estimate_critical_order",
    "evaluate",
    "gamma_plus_one",
    "integrate_recursive",
    "integrate_riemann",
    "integrate_sum",
    "lfd_at",
    "locate",
    "make_middle_p_cantor",
    "parse_gbar",
    "primitive",
    "refine",
    "solve",
    "solve_sum_rhs",
    "staircase",
    "verify_solution",
]
