from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmes.poly import (
    BiIndex,
    LinearSubstitution,
    PolyXY,
    divided_difference,
    extract_bi_coefficients,
    from_bi_coefficients,
    negation_substitution,
    poly_mul,
    poly_substitute,
    swap_substitution,
)

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=6)


def polys(depth, bound):
    exps = st.lists(st.integers(0, bound), min_size=2 * depth, max_size=2 * depth).map(tuple)
    return st.dictionaries(exps, rationals, max_size=6).map(lambda t: PolyXY(depth, bound, t))


@given(polys(2, 4), polys(2, 4), polys(2, 4))
@settings(max_examples=40)
def test_product_laws(p, q, r):
    assert poly_mul(p, q) == poly_mul(q, p)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@pytest.mark.parametrize("r", [1, 2, 3])
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_swap_is_an_involution(r, data):
    p = data.draw(polys(r, 4))
    s = swap_substitution(r)
    assert poly_substitute(poly_substitute(p, s), s) == p


@given(polys(2, 4))
def test_negation_twice_is_identity(p):
    s = negation_substitution(2)
    assert poly_substitute(poly_substitute(p, s), s) == p


@given(polys(2, 4))
@settings(max_examples=40)
def test_substitution_is_multiplicative(p):
    s = swap_substitution(2)
    q = PolyXY.var("X", 1, 2, 4) + PolyXY.var("Y", 2, 2, 4)
    assert poly_substitute(p * q, s) == poly_substitute(p, s) * poly_substitute(q, s)


@given(st.lists(rationals, min_size=5, max_size=5))
def test_divided_difference_times_difference(cs):
    # p(X1) in depth 2; (X1 - X2) * dd(p) = p(X1) - p(X2)
    p = PolyXY(2, 4, {(a, 0, 0, 0): c for a, c in enumerate(cs)})
    dd = divided_difference(p, 1, 2)
    diff = PolyXY.var("X", 1, 2, 4) - PolyXY.var("X", 2, 2, 4)
    moved = poly_substitute(p, LinearSubstitution.from_forms(2, 2, [{("X", 2): 1}, {("X", 2): 1}],
                                                          [{("Y", 1): 1}, {("Y", 2): 1}]))
    assert (diff * dd).truncate(4) == (p - moved).truncate(4)


def test_bi_coefficient_round_trip():
    table = {BiIndex.of((2, 1), (0, 3)): Fraction(5), BiIndex.of((1, 1), (1, 1)): Fraction(-1, 2)}
    p = from_bi_coefficients(table, 2, 5)
    # the Y^3/3! normalisation
    assert p.coefficient((1, 0, 0, 3)) == Fraction(5, 6)
    assert extract_bi_coefficients(p) == table


def test_biindex_properties():
    idx = BiIndex.of((3, 1), (0, 2))
    assert idx.weight == 6 and idx.depth == 2
    assert BiIndex.from_word(((3, 0), (1, 2))) == idx
    assert str(idx) == "(3,1;0,2)"
    assert str(BiIndex.of((2,))) == "(2)"
    with pytest.raises(ValueError):
        BiIndex.of((0,))


def test_ybound_drops_terms():
    p = PolyXY(1, 3, {(0, 2): 1, (1, 0): 1}, ybound=1)
    assert p.terms == {(1, 0): 1}


def test_swap_substitution_depth_two():
    # X1 -> Y1 + Y2, X2 -> Y1, Y1 -> X2, Y2 -> X1 - X2
    s = swap_substitution(2)
    x1 = PolyXY.var("X", 1, 2, 2)
    y2 = PolyXY.var("Y", 2, 2, 2)
    assert poly_substitute(x1, s) == PolyXY.var("Y", 1, 2, 2) + PolyXY.var("Y", 2, 2, 2)
    assert poly_substitute(y2, s) == PolyXY.var("X", 1, 2, 2) - PolyXY.var("X", 2, 2, 2)
