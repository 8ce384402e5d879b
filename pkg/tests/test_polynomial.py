import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvspec.polynomial import PolyParseError, PolySpec

X3 = ("x1", "x2", "x3")


def test_parse_and_evaluate():
    f = PolySpec.parse("x1^2 + 0.5*x1*x2 - x3^4", X3)
    x = [1.5, -2.0, 0.5]
    assert f(x) == pytest.approx(1.5**2 + 0.5 * 1.5 * -2.0 - 0.5**4)


def test_whitespace_insensitive():
    a = PolySpec.parse("x1^2+0.5*x1*x2-x3^4", X3)
    b = PolySpec.parse("  x1 ^ 2 +  0.5 * x1 * x2 - x3 ^ 4 ", X3)
    assert a == b


def test_parentheses_and_constant_division():
    f = PolySpec.parse("1 + (x1/10)^2", X3)
    assert f([3.0, 0, 0]) == pytest.approx(1.09)


@pytest.mark.parametrize("text, pos", [("x1 + * x2", 5), ("x1^-2", 3), ("x1 + x9", 5), ("x1 +", 4)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(PolyParseError) as err:
        PolySpec.parse(text, X3)
    assert err.value.pos == pos
    assert "position" in str(err.value)


def test_derivative_closed_under_diff():
    f = PolySpec.parse("x1^3*x2 - 2*x2^2", X3)
    assert f.diff("x1") == PolySpec.parse("3*x1^2*x2", X3)
    assert f.diff("x2").diff("x2") == PolySpec.parse("-4", X3)


def test_derivative_arrays_match_diff():
    f = PolySpec.parse("x1^2*x2^3 + x3^4 - x1*x3", X3)
    x = np.array([0.3, -0.7, 1.1])
    v0, v1, v2, v3 = f.derivatives(x, 3)
    assert v0 == pytest.approx(f(x))
    for i, vi in enumerate(X3):
        assert v1[i] == pytest.approx(f.diff(vi)(x))
        for j, vj in enumerate(X3):
            assert v2[i, j] == pytest.approx(f.diff(vi).diff(vj)(x))
            for k, vk in enumerate(X3):
                assert v3[i, j, k] == pytest.approx(f.diff(vi).diff(vj).diff(vk)(x))


monomials = st.lists(
    st.tuples(st.integers(-5, 5).filter(bool), st.tuples(*[st.integers(0, 3)] * 3)), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(monomials, st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_round_trip_through_text(terms, x):
    text = " + ".join(f"{c}*x1^{a}*x2^{b}*x3^{d}" for c, (a, b, d) in terms)
    f = PolySpec.parse(text, X3)
    g = PolySpec.parse(str(f), X3)
    assert g(x) == pytest.approx(f(x), abs=1e-9)
    direct = sum(c * x[0] ** a * x[1] ** b * x[2] ** d for c, (a, b, d) in terms)
    assert f(x) == pytest.approx(direct, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(monomials, st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_derivative_matches_finite_difference(terms, x):
    f = PolySpec(X3, tuple((e, float(c)) for c, e in terms))
    h = 1e-5
    for i, v in enumerate(X3):
        xp, xm = list(x), list(x)
        xp[i] += h
        xm[i] -= h
        fd = (f(xp) - f(xm)) / (2 * h)
        assert f.diff(v)(x) == pytest.approx(fd, abs=1e-6)
