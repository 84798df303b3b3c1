import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from curvemates.expressions import (DifferentiationError, DomainError,
                                    ExpressionSyntaxError, differentiate,
                                    evaluate, parse, to_text)
from curvemates.catalog import PROFILES


def ev(text, s):
    return evaluate(parse(text), s)


def test_parse_examples():
    assert ev("3*cos(s)", 0.0) == pytest.approx(3.0)
    assert ev("s^2+s-2", 1.0) == pytest.approx(0.0)


def test_syntax_error_offset():
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse("2*)s")
    assert exc.value.offset == 2
    assert "offset 2" in str(exc.value)


def test_empty_input():
    with pytest.raises(ExpressionSyntaxError):
        parse("")
    with pytest.raises(ExpressionSyntaxError):
        parse("   ")


def test_unknown_identifier():
    with pytest.raises(ExpressionSyntaxError, match="unknown identifier"):
        parse("foo(s)")
    with pytest.raises(ExpressionSyntaxError, match="unknown identifier"):
        parse("x+1")


def test_function_requires_parentheses():
    with pytest.raises(ExpressionSyntaxError, match="parentheses"):
        parse("sin s")


def test_precedence():
    # '^' binds tighter than unary minus, which binds tighter than '*'
    assert ev("-s^2", 3.0) == pytest.approx(-9.0)
    assert ev("2^3^2", 0.0) == pytest.approx(512.0)      # right-associative
    assert ev("2^-1", 0.0) == pytest.approx(0.5)
    assert ev("1-2-3", 0.0) == pytest.approx(-4.0)       # left-associative
    assert ev("12/4/3", 0.0) == pytest.approx(1.0)
    assert ev("2*s^2", 3.0) == pytest.approx(18.0)
    assert ev("pi", 0.0) == pytest.approx(math.pi)


def test_eval_sqrt2():
    assert ev("sqrt(2)", 0.123) == 1.4142135623730951


def test_eval_torsion_formula_high_precision():
    # 2*sqrt(7)*sin(pi/2)/sqrt(8) = sqrt(7/2), frozen from exact arithmetic
    value = ev("2*sqrt(7)*sin(2*s)*(1+7*sin(2*s)^2)^(-1/2)", math.pi / 4)
    assert value == pytest.approx(1.8708286933869707, abs=1e-15)
    assert value == pytest.approx(math.sqrt(3.5), abs=1e-15)


def test_domain_errors():
    with pytest.raises(DomainError):
        ev("1/s", 0.0)
    with pytest.raises(DomainError):
        ev("sqrt(s)", -1.0)
    with pytest.raises(DomainError):
        ev("s^0.5", -2.0)
    with pytest.raises(DomainError):
        ev("exp(s)", 1e4)     # overflow is an error, not inf
    # integer powers of negative bases are fine
    assert ev("s^2", -3.0) == pytest.approx(9.0)
    assert ev("s^3", -2.0) == pytest.approx(-8.0)


def test_array_evaluation():
    s = np.linspace(-1, 1, 17)
    np.testing.assert_allclose(ev("s^2+1", s), s ** 2 + 1, rtol=0, atol=0)
    np.testing.assert_allclose(ev("2", s), np.full_like(s, 2.0))
    with pytest.raises(DomainError):
        ev("sqrt(1-s)", np.array([0.0, 2.0]))


def test_differentiate_textbook():
    d = differentiate(parse("3*cos(s)"))
    for s in (0.0, 0.7, -1.3):
        assert evaluate(d, s) == pytest.approx(-3 * math.sin(s), abs=1e-15)
    d2 = differentiate(parse("s^2+s-2"))
    for s in (0.0, 1.0, 4.5):
        assert evaluate(d2, s) == pytest.approx(2 * s + 1, abs=1e-12)


def test_differentiate_matches_central_difference_on_demo_formulas():
    rng = np.random.default_rng(42)
    h = 1e-5
    for entry in PROFILES.values():
        for text in (entry.kappa, entry.tau):
            e = parse(text)
            de = differentiate(e)
            lo, hi = entry.domain
            pts = rng.uniform(lo + 10 * h, hi - 10 * h, size=50)
            for s in pts:
                sym = evaluate(de, float(s))
                fd = (evaluate(e, s + h) - evaluate(e, s - h)) / (2 * h)
                assert abs(sym - fd) <= 1e-6 * (1 + abs(sym))


def test_abs_derivative_piecewise():
    d = differentiate(parse("abs(s)"))
    assert evaluate(d, 0.5) == pytest.approx(1.0)
    assert evaluate(d, -0.5) == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        evaluate(d, 0.0)     # undefined exactly at the inner zero


def test_variable_exponent_rejected():
    with pytest.raises(DifferentiationError):
        differentiate(parse("2^s"))


def test_print_examples_roundtrip():
    for text in ["3*cos(s)", "s^2+s-2", "2*sqrt(7)*sin(2*s)*(1+7*sin(2*s)^2)^(-1/2)",
                 "-s^2", "1-(2-3)", "(1+s)*(1-s)", "2^3^2", "s/(1+s^2)"]:
        e = parse(text)
        again = parse(to_text(e))
        for s in np.linspace(0.1, 0.9, 7):
            assert evaluate(again, float(s)) == pytest.approx(
                evaluate(e, float(s)), abs=1e-12)


# ---------------------------------------------------------------------------
# property tests

_leaf = st.one_of(
    st.floats(min_value=-4, max_value=4, allow_nan=False).map(
        lambda v: f"{v:.3f}"),
    st.just("s"),
    st.just("pi"),
)


def _combine(children):
    op = st.sampled_from(["+", "-", "*"])
    fn = st.sampled_from(["sin", "cos", "exp"])
    return st.one_of(
        st.tuples(op, children, children).map(lambda t: f"({t[1]}{t[0]}{t[2]})"),
        st.tuples(fn, children).map(lambda t: f"{t[0]}({t[1]})"),
    )


expr_text = st.recursive(_leaf, _combine, max_leaves=8)


@settings(max_examples=100, deadline=None)
@given(expr_text, st.floats(min_value=-2, max_value=2, allow_nan=False))
def test_print_parse_roundtrip_property(text, s):
    e = parse(text)
    back = parse(to_text(e))
    try:
        a = evaluate(e, s)
    except DomainError:
        assume(False)
        return
    b = evaluate(back, s)
    assert abs(a - b) <= 1e-12 * (1 + abs(a))


@settings(max_examples=60, deadline=None)
@given(expr_text, expr_text,
       st.floats(min_value=-3, max_value=3, allow_nan=False),
       st.floats(min_value=-3, max_value=3, allow_nan=False),
       st.floats(min_value=-2, max_value=2, allow_nan=False))
def test_differentiate_linearity(f_text, g_text, a, b, s):
    f, g = parse(f_text), parse(g_text)
    combo = parse(f"({a})*({f_text})+({b})*({g_text})")
    try:
        lhs = evaluate(differentiate(combo), s)
        rhs = (a * evaluate(differentiate(f), s)
               + b * evaluate(differentiate(g), s))
    except DomainError:
        assume(False)
        return
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs) + abs(rhs))
