import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import GAMMA_Q3, cantor_moment

from fractalcalc import (
    DomainError,
    FractalTerm,
    IntegrationMethod,
    Polynomial,
    integrate_recursive,
    integrate_riemann,
    integrate_sum,
    make_middle_p_cantor,
    parse_gbar,
    primitive,
    staircase,
)

X = Polynomial((0.0, 1.0))
X2 = Polynomial((0.0, 0.0, 1.0))


# {{{ integrands


def test_parse_gbar():
    assert parse_gbar("one") == Polynomial((1.0,))
    assert parse_gbar("x") == X
    assert parse_gbar("x2") == X2
    assert parse_gbar("poly:[1, -2, 0.5]") == Polynomial((1.0, -2.0, 0.5))
    for bad in ["sin", "poly:1,2", "poly:[a]", "poly:[]", "poly:[inf]"]:
        with pytest.raises(DomainError):
            parse_gbar(bad)


def test_polynomial():
    p = Polynomial((1.0, -2.0, 3.0))
    assert p(2.0) == 9.0
    np.testing.assert_array_equal(p(np.array([0.0, 1.0])), [1.0, 2.0])
    assert p.lipschitz_bound((0.0, 1.0)) == 8.0
    assert Polynomial((4.0, 0.0)).is_constant
    assert not p.is_constant


def test_term_rejects_nonfinite_gbar(cantor3):
    def singular(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return 1.0 / (x - 2.0 / 3.0)

    with pytest.raises(DomainError, match="not finite at x = 0.666"):
        FractalTerm(singular, cantor3)
    with pytest.raises(DomainError):
        FractalTerm(1.0, cantor3, lipschitz_bound=-1.0)


def test_scalar_only_callable(cantor3):
    term = FractalTerm(lambda t: math.cos(t), cantor3)
    vec = FractalTerm(np.cos, cantor3)
    assert integrate_riemann(term, depth=8).value == integrate_riemann(vec, depth=8).value


# }}}


# {{{ riemann


@pytest.mark.parametrize("depth", [0, 1, 5, 12])
def test_riemann_constant(cantor3, depth):
    result = integrate_riemann(FractalTerm(1.0, cantor3), depth=depth)
    assert result.value == pytest.approx(1 / GAMMA_Q3, rel=1e-14)
    assert result.lower == result.upper == result.value
    assert result.method is IntegrationMethod.riemann_cover
    assert result.depth == depth


@pytest.mark.parametrize("gbar, n", [(X, 1), (X2, 2)])
def test_riemann_moments_converge(cantor3, gbar, n):
    exact = float(cantor_moment(n)) / GAMMA_Q3
    errors = []
    for depth in (4, 8, 12):
        result = integrate_riemann(FractalTerm(gbar, cantor3, gbar.lipschitz_bound((0, 1))), depth=depth)
        assert result.contains(exact)
        assert result.certified
        errors.append(abs(result.value - exact))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-5


def test_oracle_moments():
    assert cantor_moment(1) == 0.5
    assert cantor_moment(2) == 0.375


def test_bracket_decay(cantor3):
    term = FractalTerm(X, cantor3, lipschitz_bound=1.0)
    widths = [integrate_riemann(term, depth=n).width for n in range(6, 15)]
    ratios = np.array(widths[1:]) / np.array(widths[:-1])
    assert np.all((ratios >= 0.8 / 3) & (ratios <= 1.2 / 3))


def test_bracket_nesting(cantor3):
    # x is monotone on every cover interval, so brackets shrink monotonically
    term = FractalTerm(X, cantor3, lipschitz_bound=1.0)
    prev = integrate_riemann(term, depth=3)
    for depth in range(4, 12):
        cur = integrate_riemann(term, depth=depth)
        assert prev.lower <= cur.lower and cur.upper <= prev.upper
        prev = cur


def test_heuristic_brackets_are_labelled(cantor3):
    result = integrate_riemann(FractalTerm(X, cantor3), depth=8)
    assert not result.certified
    assert result.lower <= result.value <= result.upper
    assert result.to_dict()["tag"] == "left"


def test_empty_intersection_is_exact_zero(cantor3):
    result = integrate_riemann(FractalTerm(X, cantor3), (0.4, 0.6), depth=5)
    assert (result.value, result.lower, result.upper) == (0.0, 0.0, 0.0)


def test_straddle_policy(cantor3):
    w = 0.5 / GAMMA_Q3
    pos = integrate_riemann(FractalTerm(1.0, cantor3), (0.0, 0.2), depth=1)
    assert (pos.lower, pos.value, pos.upper) == pytest.approx((0.0, 0.5 * w, w), rel=1e-15)

    neg = integrate_riemann(FractalTerm(-1.0, cantor3), (0.0, 0.2), depth=1)
    assert (neg.lower, neg.value, neg.upper) == pytest.approx((-w, -0.5 * w, 0.0), rel=1e-15)


def test_range_validation(cantor3):
    term = FractalTerm(1.0, cantor3)
    with pytest.raises(DomainError, match="leaves"):
        integrate_riemann(term, (-0.5, 0.5))
    with pytest.raises(DomainError, match="x0 <= x1"):
        integrate_riemann(term, (0.7, 0.2))


@settings(max_examples=40, deadline=None)
@given(
    alpha=st.floats(min_value=-10, max_value=10),
    beta=st.floats(min_value=-10, max_value=10),
)
def test_linearity(cantor3, alpha, beta):
    combined = Polynomial((0.0, alpha, beta))
    i1 = integrate_riemann(FractalTerm(X, cantor3), depth=10).value
    i2 = integrate_riemann(FractalTerm(X2, cantor3), depth=10).value
    i12 = integrate_riemann(FractalTerm(combined, cantor3), depth=10).value
    assert i12 == pytest.approx(alpha * i1 + beta * i2, rel=1e-12, abs=1e-12)


# }}}


# {{{ recursive


def test_recursive_constant_depth_zero(cantor3):
    result = integrate_recursive(FractalTerm(1.0, cantor3), depth=0)
    assert result.value == pytest.approx(1 / GAMMA_Q3, rel=1e-15)
    assert result.lower == result.upper
    assert result.method is IntegrationMethod.self_similar_recursion


@pytest.mark.parametrize("gbar, n", [(X, 1), (X2, 2)])
def test_recursive_moments(cantor3, gbar, n):
    result = integrate_recursive(FractalTerm(gbar, cantor3), depth=20)
    assert GAMMA_Q3 * result.value == pytest.approx(float(cantor_moment(n)), abs=1e-10)


def test_recursive_moments_rescaled_ambient():
    # E[a + (b - a) X] on [a, b]
    cset = make_middle_p_cantor(3, (2.0, 5.0))
    result = integrate_recursive(FractalTerm(X, cset), depth=18)
    expected = 3.0**cset.dimension * 3.5 / GAMMA_Q3
    assert result.value == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("depth", [4, 8, 12])
@pytest.mark.parametrize("name", ["x", "x2", "poly:[1, -3, 2]"])
def test_recursive_and_riemann_agree(cantor3, depth, name):
    gbar = parse_gbar(name)
    term = FractalTerm(gbar, cantor3, gbar.lipschitz_bound((0, 1)))
    rec = integrate_recursive(term, depth)
    rie = integrate_riemann(term, depth=depth)
    wider = max(rec.width, rie.width)
    assert abs(rec.value - rie.value) <= wider


# }}}


# {{{ sums


def test_sum_one_term(cantor3):
    term = FractalTerm(X, cantor3)
    assert integrate_sum([term], depth=9) == integrate_riemann(term, depth=9)


def test_sum_disjoint_translates():
    c1 = make_middle_p_cantor(3, (0.0, 1.0))
    c2 = make_middle_p_cantor(3, (2.0, 3.0))
    result = integrate_sum([FractalTerm(1.0, c1), FractalTerm(1.0, c2)], depth=10)
    assert result.value == pytest.approx(2 / GAMMA_Q3, rel=1e-14)


def test_sum_non_equivalence_witness():
    c1 = make_middle_p_cantor(3, (0.0, 1.0))
    c2 = make_middle_p_cantor(3, (2.0, 3.0))
    two_term = integrate_sum([FractalTerm(1.0, c1), FractalTerm(2.0, c2)], depth=10).value
    union = integrate_sum([FractalTerm(3.0, c1), FractalTerm(3.0, c2)], depth=10).value
    assert two_term == pytest.approx(3 / GAMMA_Q3, rel=1e-14)
    assert abs(union - two_term) >= 0.5 / GAMMA_Q3


def test_sum_partial_range():
    c1 = make_middle_p_cantor(3, (0.0, 1.0))
    c2 = make_middle_p_cantor(3, (2.0, 3.0))
    terms = [FractalTerm(1.0, c1), FractalTerm(1.0, c2)]
    assert integrate_sum(terms, (0.0, 1.5), depth=8).value == pytest.approx(1 / GAMMA_Q3)
    assert integrate_sum(terms, (1.2, 1.8), depth=8).value == 0.0


def test_sum_rejects_dimension_mismatch(cantor3, cantor4):
    with pytest.raises(DomainError, match="dimension"):
        integrate_sum([FractalTerm(1.0, cantor3), FractalTerm(1.0, cantor4)])
    with pytest.raises(DomainError):
        integrate_sum([])


# }}}


# {{{ primitive


def test_primitive_constant_is_staircase(cantor3):
    u = primitive(FractalTerm(2.0, cantor3), x0=0.25)
    x = np.linspace(0, 1, 33)
    np.testing.assert_array_equal(u(x), 2.0 * (staircase(cantor3, x) - staircase(cantor3, 0.25)))
    assert u(0.25) == 0.0
    assert u.certified


def test_primitive_matches_riemann(cantor3):
    term = FractalTerm(X, cantor3, 1.0)
    u = primitive(term, depth=10)
    full = integrate_riemann(term, depth=10)
    assert u(1.0) == pytest.approx(full.value, rel=1e-14)
    # at cover endpoints the running sum is a plain partial sum
    assert u(1 / 3) == pytest.approx(integrate_riemann(term, (0, 1 / 3), depth=10).value, rel=1e-13)


def test_primitive_bounds_and_gaps(cantor3):
    term = FractalTerm(X2, cantor3, 2.0)
    u = primitive(term, x0=0.5, depth=8)
    assert u(0.5) == 0.0
    for x in np.linspace(0, 1, 41):
        lo, hi = u.bounds(float(x))
        assert lo - 1e-15 <= u(float(x)) <= hi + 1e-15
    gap = np.linspace(1 / 3, 2 / 3, 20)
    assert np.all(u(gap) == 0.0)


def test_primitive_monotone_for_positive_gbar(cantor3):
    u = primitive(FractalTerm(Polynomial((1.0, 1.0)), cantor3), depth=8)
    values = u(np.linspace(0, 1, 500))
    assert np.all(np.diff(values) >= 0.0)


# }}}
