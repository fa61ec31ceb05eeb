import pytest
from hypothesis import given, strategies as st

from frobtest import MonomialOrder, PolynomialRing, parse_polynomial
from frobtest.algebra import (
    Cmp, compare_monomials, format_polynomial, poly_power_pe, split_generators)
from frobtest.errors import ExponentOverflowError, ParseError, UnknownVariableError


def ring(p, names="x,y", order="grevlex"):
    return PolynomialRing(p, tuple(names.split(",")), MonomialOrder(order))


def polys(R, max_terms=5, max_exp=3):
    mono = st.tuples(*[st.integers(0, max_exp)] * R.nvars)
    return st.dictionaries(mono, st.integers(0, R.p - 1), max_size=max_terms).map(R.from_terms)


# -- parsing ------------------------------------------------------------

def test_parse_fermat_has_three_terms():
    f = parse_polynomial("x^3+y^3+z^3", ring(2, "x,y,z"))
    assert len(f) == 3
    assert f.is_homogeneous() and f.total_degree() == 3


def test_parse_reduces_coefficients():
    assert parse_polynomial("2*x + x", ring(3)).is_zero()
    assert parse_polynomial("x*y - y*x + 5", ring(5)).is_zero()


def test_parse_extensions():
    R = ring(3)
    assert R.parse("-x") == R.parse("2*x")
    assert R.parse("(x+y)^3") == R.parse("x^3+y^3")
    assert R.parse("x**2") == R.parse("x*x")


@pytest.mark.parametrize("bad", ["x+", "x^", "(x", "x)", "x y", "*x", "x^-1"])
def test_parse_syntax_errors_carry_position(bad):
    with pytest.raises(ParseError) as info:
        ring(2).parse(bad)
    assert info.value.position is not None


def test_parse_unknown_variable():
    with pytest.raises(UnknownVariableError):
        ring(2).parse("x + w")


def test_split_generators():
    assert split_generators("x, (x+y)*y, y^2") == ["x", "(x+y)*y", "y^2"]
    assert split_generators("  ") == []
    with pytest.raises(ParseError):
        split_generators("x,,y")


@given(st.data())
def test_print_parse_round_trip(data):
    for R in (ring(2, "x,y,z"), ring(5), ring(3, "a,b", "lex")):
        f = data.draw(polys(R))
        assert parse_polynomial(format_polynomial(f), R) == f


# -- canonical form -----------------------------------------------------

@given(st.data())
def test_canonical_form_independent_of_association(data):
    R = ring(3, "x,y,z")
    f, g, h = (data.draw(polys(R)) for _ in range(3))
    left = (f + g) * h
    right = h * g + f * h
    assert left.terms() == right.terms()
    assert (f * g) * h == f * (g * h)


@given(st.data())
def test_terms_strictly_descending_without_zeros(data):
    R = ring(5, "x,y,z")
    f = data.draw(polys(R, max_terms=8))
    monos = [m for _, m in f.terms()]
    keys = [R.sort_key(m) for m in monos]
    assert keys == sorted(keys, reverse=True) and len(set(keys)) == len(keys)
    assert all(0 < c < R.p for c, _ in f.terms())


def test_zero_polynomial_is_empty():
    R = ring(2)
    assert R.zero().terms() == [] and not R.zero()
    assert R.parse("x+x").terms() == []


# -- Frobenius powers ---------------------------------------------------

def test_poly_power_pe_examples():
    R2, R3 = ring(2), ring(3)
    assert poly_power_pe(R2.parse("x+y"), 1) == R2.parse("x^2+y^2")
    assert poly_power_pe(R3.parse("x+y"), 1) == R3.parse("x^3+y^3")
    assert poly_power_pe(R2.zero(), 3).is_zero()
    f = R3.parse("x+2*y")
    assert poly_power_pe(f, 0) is f


@given(st.data())
def test_poly_power_pe_matches_repeated_multiplication(data):
    for p, e in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)]:
        R = ring(p, "x,y,z")
        f = data.draw(polys(R, max_terms=3, max_exp=2))
        prod = R.one()
        for _ in range(p ** e):
            prod = prod * f
        assert poly_power_pe(f, e) == prod


def test_exponent_overflow_is_reported():
    R = ring(2)
    with pytest.raises(ExponentOverflowError):
        poly_power_pe(R.parse("x"), 40)


# -- monomial orders ----------------------------------------------------

def test_compare_examples():
    o = MonomialOrder("grevlex").for_size(2)
    assert compare_monomials((2, 0), (1, 1), o) is Cmp.GT
    assert compare_monomials((1, 2), (1, 2), o) is Cmp.EQ
    assert compare_monomials((0, 3), (2, 0), o) is Cmp.GT


def test_grevlex_differs_from_lex():
    # x*z^2 versus y^3 in three variables
    assert compare_monomials((1, 0, 2), (0, 3, 0), MonomialOrder("lex").for_size(3)) is Cmp.GT
    assert compare_monomials((1, 0, 2), (0, 3, 0), MonomialOrder("grevlex").for_size(3)) is Cmp.LT


def test_variable_priority():
    o = MonomialOrder("lex", (1, 0))
    assert compare_monomials((0, 1), (5, 0), o) is Cmp.GT


def test_dimension_mismatch():
    from frobtest.errors import RingMismatchError
    with pytest.raises(RingMismatchError):
        compare_monomials((1,), (1, 0), MonomialOrder())


exps = st.tuples(*[st.integers(0, 4)] * 3)


@pytest.mark.parametrize("kind", ["grevlex", "lex", "graded-lex"])
@given(a=exps, b=exps, c=exps)
def test_order_axioms(kind, a, b, c):
    o = MonomialOrder(kind).for_size(3)
    ab, ba = o.compare(a, b), o.compare(b, a)
    assert ab == -ba
    assert (ab is Cmp.EQ) == (a == b)
    mul = lambda u, v: tuple(x + y for x, y in zip(u, v))
    assert o.compare(mul(a, c), mul(b, c)) == ab
    assert o.compare(a, (0, 0, 0)) is not Cmp.LT
    if ab is Cmp.GT and o.compare(b, c) is Cmp.GT:
        assert o.compare(a, c) is Cmp.GT


def test_ring_validation():
    with pytest.raises(ValueError):
        PolynomialRing(4, ("x",))
    with pytest.raises(ValueError):
        PolynomialRing(2, ("x", "x"))
    with pytest.raises(ValueError):
        PolynomialRing(2147483659, ("x",))
