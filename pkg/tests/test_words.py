from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmes.words import (
    BI_STUFFLE,
    HAT_DIAMOND,
    SHUFFLE_XY,
    STUFFLE,
    antipode_sum,
    bi_words,
    compositions,
    deconcat_coproduct,
    hat_lambda,
    parse_word,
    format_word,
    quasi_shuffle,
    quasi_shuffle_lc,
    shuffle,
    xy_to_z,
    z_to_xy,
    z_words,
)

zword = st.lists(st.integers(1, 3), max_size=3).map(tuple)
biword = st.lists(st.tuples(st.integers(1, 3), st.integers(0, 2)), max_size=3).map(tuple)
xyword = st.lists(st.sampled_from("xy"), max_size=5).map(tuple)

CASES = [(STUFFLE, zword), (BI_STUFFLE, biword), (HAT_DIAMOND, biword), (SHUFFLE_XY, xyword)]


@pytest.mark.parametrize("diamond,words", CASES, ids=lambda x: getattr(x, "name", ""))
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_quasi_shuffle_commutative_and_associative(diamond, words, data):
    u, v, w = data.draw(words), data.draw(words), data.draw(words)
    assert quasi_shuffle(u, v, diamond) == quasi_shuffle(v, u, diamond)
    left = quasi_shuffle_lc(quasi_shuffle(u, v, diamond), {w: Fraction(1)}, diamond)
    right = quasi_shuffle_lc({u: Fraction(1)}, quasi_shuffle(v, w, diamond), diamond)
    assert left == right


@given(xyword, xyword)
def test_shuffle_term_count(u, v):
    assert sum(shuffle(u, v).values()) == comb(len(u) + len(v), len(u))


@given(zword)
def test_z_xy_round_trip(w):
    assert xy_to_z(z_to_xy(w)) == w


@given(st.lists(st.sampled_from("xy"), min_size=1, max_size=5).map(tuple))
def test_antipode_sum_vanishes(w):
    assert antipode_sum(w) == {}


def test_stuffle_small_example():
    assert quasi_shuffle((1,), (1,), STUFFLE) == {(1, 1): 2, (2,): 1}
    assert quasi_shuffle((2,), (1, 1), STUFFLE) == {(2, 1, 1): 1, (1, 2, 1): 1, (1, 1, 2): 1, (3, 1): 1, (1, 3): 1}


def test_shuffle_z2_z1_in_xy():
    # xy sh y = 2 xyy + yxy
    out = shuffle(z_to_xy((2,)), z_to_xy((1,)))
    assert {xy_to_z(w): c for w, c in out.items()} == {(2, 1): 2, (1, 2): 1}


def test_hat_lambda_values():
    # lambda^{1,1}_1 = -(-1 - 1) B_1/1! = -1 ; lambda^{2,2}_2 = -(1 + 1) B_2/2! = -1/6
    assert hat_lambda(1, 1, 1) == -1
    assert hat_lambda(2, 2, 2) == Fraction(-1, 6)
    assert quasi_shuffle(((1, 0),), ((1, 0),), HAT_DIAMOND) == {((1, 0), (1, 0)): 2, ((2, 0),): 1, ((1, 0),): -1}


def test_enumeration_counts():
    assert sorted(compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
    assert len(list(z_words(6, 6))) == 2 ** 6 - 1
    # bi-words of weight n, depth 1: k + d = n, k >= 1
    assert sum(1 for w in bi_words(5, 1) if w[0][0] + w[0][1] == 5) == 5
    assert all(sum(d for _, d in w) <= 1 for w in bi_words(5, 2, max_ysum=1))


def test_deconcatenation():
    assert deconcat_coproduct((1, 2)) == [((), (1, 2)), ((1,), (2,)), ((1, 2), ())]


def test_mixed_alphabets_rejected():
    with pytest.raises(ValueError):
        quasi_shuffle((1,), ((1, 0),), STUFFLE)
    with pytest.raises(ValueError):
        xy_to_z(("y", "x"))


def test_word_text_round_trip():
    for w in [(3, 1, 2), ((2, 1), (1, 0))]:
        assert parse_word(format_word(w)) == w
