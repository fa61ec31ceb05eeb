import itertools
import random

import pytest

from frobtest import (
    Caps, Ideal, PolynomialRing, Status, frobenius_closure, frobenius_power, frobenius_root,
    frobenius_test_exponent)
from frobtest.errors import NotArtinianError
from frobtest.frobenius import brute_force_closure_members, root_basis
from frobtest.groebner import monomials_of_degree
from frobtest.rings import PresentedRing, local_component


def S(p, names="x,y"):
    return PolynomialRing(p, tuple(names.split(",")))


# -- Frobenius powers and roots -------------------------------------------

def test_frobenius_power_examples():
    A = S(2)
    assert frobenius_power(Ideal.parse(A, "x, y"), 1).same_ideal(Ideal.parse(A, "x^2, y^2"))
    B = S(3)
    got = frobenius_power(Ideal.parse(B, "x+y, y^3"), 1)
    assert got.same_ideal(Ideal.parse(B, "x^3+y^3, y^9"))
    I = Ideal.parse(B, "x^2+y, x*y")
    assert frobenius_power(I, 0).same_ideal(I)


def test_frobenius_power_independent_of_generators():
    A = S(3, "x,y,z")
    I1 = Ideal.parse(A, "x+y, y*z")
    I2 = Ideal.parse(A, "x+y+y*z, y*z, x*y+y^2")
    assert I1.same_ideal(I2)
    assert frobenius_power(I1, 1).same_ideal(frobenius_power(I2, 1))


def test_root_basis_size_and_decomposition():
    for n, p, e in [(2, 2, 1), (3, 2, 2), (2, 3, 1)]:
        basis = root_basis(n, p, e)
        assert len(basis) == p ** (e * n)
        q = p ** e
        m = tuple(range(3, 3 + n))
        parts = [b for b in basis if all((x - y) % q == 0 for x, y in zip(m, b))]
        assert len(parts) == 1


def test_frobenius_root_examples():
    A = S(2)
    assert frobenius_root(Ideal.parse(A, "x^2*y^3"), 1).same_ideal(Ideal.parse(A, "x*y"))
    B = S(3)
    assert frobenius_root(Ideal.parse(B, "x^3"), 1).same_ideal(Ideal.parse(B, "x"))
    assert frobenius_root(Ideal.parse(B, "x^2"), 1).is_unit()
    K = Ideal.parse(B, "x^2 + y")
    assert frobenius_root(K, 0) is K


def test_root_is_minimal_among_monomial_ideals():
    A = S(2)
    K = Ideal.parse(A, "x^2*y^3")
    for a, b in itertools.product(range(3), repeat=2):
        J = Ideal(A, [A.monomial((a, b))])
        assert frobenius_power(J, 1).contains_ideal(K) == (a <= 1 and b <= 1)


def _random_ideal(A, rng, count, degree):
    gens = []
    for _ in range(count):
        terms = {m: rng.randrange(1, A.p)
                 for d in range(1, degree + 1) for m in monomials_of_degree(A.nvars, d)
                 if rng.random() < 0.25}
        if terms:
            gens.append(A.from_terms(terms))
    return Ideal(A, gens or [A.gens()[0]])


@pytest.mark.parametrize("seed", range(30))
def test_root_adjunction(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3])
    A = S(p, "x,y,z")
    e = 1 if p == 3 else rng.choice([1, 2])
    K = Ideal(A, [A.monomial([rng.randint(0, 5) for _ in range(3)]) for _ in range(2)])
    root = frobenius_root(K, e)
    for _ in range(4):
        J = _random_ideal(A, rng, rng.randint(1, 3), 2)
        assert frobenius_power(J, e).contains_ideal(K) == J.contains_ideal(root)


@pytest.mark.parametrize("seed", range(20))
def test_root_inverts_power(seed):
    rng = random.Random(50 + seed)
    p = rng.choice([2, 3, 5])
    A = S(p, "x,y,z")
    J = _random_ideal(A, rng, rng.randint(1, 3), 2)
    e = 1 if p > 2 else rng.choice([1, 2])
    assert frobenius_root(frobenius_power(J, e), e).same_ideal(J)


@pytest.mark.parametrize("seed", range(15))
def test_power_composition(seed):
    rng = random.Random(80 + seed)
    p = rng.choice([2, 3])
    A = S(p, "x,y,z")
    I = _random_ideal(A, rng, 2, 2)
    e, f = rng.choice([(0, 1), (1, 1), (1, 2), (2, 1), (0, 3)] if p == 2 else [(0, 1), (1, 1)])
    assert frobenius_power(frobenius_power(I, e), f).same_ideal(frobenius_power(I, e + f))


# -- Frobenius closure ----------------------------------------------------

def test_fermat_closure(fermat2):
    I = fermat2.ideal("x, y")
    res = frobenius_closure(I, fermat2)
    assert res.fte.value == 1 and res.fte.status is Status.CERTIFIED
    z = fermat2.parse("z")
    assert res.closure.contains(z ** 2) and not res.closure.contains(z)
    assert not fermat2.lift(I).contains(z ** 2)
    assert fermat2.lift(fermat2.ideal("x^2, y^2")).contains(z ** 4)
    assert res.witnesses and all(w.e == 1 and w.verify(fermat2, I) for w in res.witnesses)
    assert res.fte.evidence["minimality"] is True


def test_polynomial_ring_ideals_are_closed(poly2):
    res = frobenius_closure(poly2.ideal("x^2, y"), poly2)
    assert res.fte.value == 0 and res.fte.status is Status.CERTIFIED
    assert res.closure.same_ideal(poly2.ideal("x^2, y"))
    assert res.chain == [0, 0, 0]


def test_unit_ideal(fermat2, poly2):
    for R in (fermat2, poly2):
        res = frobenius_closure(R.ideal("1"), R)
        assert res.closure.is_unit() and res.fte.value == 0


def test_maximal_ideal_of_fermat(fermat2):
    assert frobenius_test_exponent(fermat2.maximal_ideal(), fermat2).value == 0


def test_max_e_truncation(fermat2):
    v = frobenius_test_exponent(fermat2.ideal("x, y"), fermat2, Caps(max_e=1))
    assert v.value is None and v.status is Status.TRUNCATED and v.cap == "max_e"


def test_positive_dimensional_quotient_rejected(fermat2):
    with pytest.raises(NotArtinianError):
        frobenius_closure(fermat2.ideal("x"), fermat2)


def test_nonreduced_closure(nonreduced2):
    # x is nilpotent, so it lies in the closure of every ideal
    res = frobenius_closure(nonreduced2.ideal("y"), nonreduced2)
    assert res.closure.contains(nonreduced2.parse("x"))
    assert res.fte.value == 1


CLOSURE_CASES = [
    ("fermat2", "x, y"), ("fermat2", "x^2, y"), ("fermat2", "x+z^2, y"),
    ("fermat2", "y, z"), ("nonreduced2", "y"), ("nonreduced2", "y^2"),
    ("nonreduced2", "x+y"), ("poly2", "x^2, x*y, y^3"),
]


@pytest.mark.parametrize("name,gens", CLOSURE_CASES)
def test_closure_extensive_and_idempotent(name, gens, request):
    R = request.getfixturevalue(name)
    I = R.ideal(gens)
    res = frobenius_closure(I, R)
    assert res.closure.contains_ideal(R.lift(I))
    again = frobenius_closure(res.closure, R)
    assert again.fte.value == 0
    assert again.closure.same_ideal(res.closure)


@pytest.mark.parametrize("name,gens", CLOSURE_CASES)
def test_closure_matches_brute_force(name, gens, request):
    R = request.getfixturevalue(name)
    I = R.ideal(gens)
    res = frobenius_closure(I, R)
    monos = [R.ambient.monomial(m) for d in range(5) for m in monomials_of_degree(R.ambient.nvars, d)]
    found = brute_force_closure_members(R, I, monos, 3)
    assert {m for m in monos if res.closure.contains(m)} == found


@pytest.mark.parametrize("name,gens", CLOSURE_CASES)
def test_certified_fte_is_minimal(name, gens, request):
    R = request.getfixturevalue(name)
    I = R.ideal(gens)
    res = frobenius_closure(I, R)
    fte = res.fte.value
    target = lambda e: local_component(R.lift(I.frobenius_power(e)))
    assert all(target(fte).contains(g.frobenius(fte)) for g in res.closure.generators)
    if fte > 0:
        assert not all(target(fte - 1).contains(g.frobenius(fte - 1))
                       for g in res.closure.generators)


def test_non_origin_component_is_ignored():
    # (x) + (x-1)*y: the second point is away from the origin
    R = PresentedRing.build(2, ["x", "y"])
    I = R.ideal("x^2, x*y, y^2*(y+1)")
    res = frobenius_closure(I, R)
    assert res.fte.value == 0
