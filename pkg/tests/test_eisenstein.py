import json
from fractions import Fraction
from math import factorial

import pytest

from cmes.eds import solve_eds
from cmes.eisenstein import (
    EisensteinContext,
    coefficient_records,
    g_bruteforce,
    lm_series,
    parse_index,
    records_to_csv,
    records_to_json,
)
from cmes.exact import QSeries, TruncationParams
from cmes.moulds import swap
from cmes.poly import BiIndex
from cmes.words import bi_words

# frozen from the partition-sum oracle (distinct parts m_i, multiplicities n_i), q^0..q^12
FROZEN_G = {
    BiIndex.of((2, 1)): [0, 0, 0, 1, 2, 6, 7, 15, 18, 25, 34, 45, 47],
    BiIndex.of((1, 1), (1, 1)): [0, 0, 0, 2, 5, 17, 24, 55, 75, 116, 167, 240, 280],
    BiIndex.of((2, 2), (0, 1)): [0, 0, 0, 1, 3, 10, 16, 35, 52, 78, 120, 165, 210],
    BiIndex.of((1, 1, 1)): [0, 0, 0, 0, 0, 0, 1, 2, 5, 10, 15, 25, 37],
    BiIndex.of((3,)): [0, Fraction(1, 2), Fraction(5, 2), 5, Fraction(21, 2), 13, 25, 25, Fraction(85, 2),
                       Fraction(91, 2), 65, 61, 105],
}


def sigma(n, s):
    return sum(t ** s for t in range(1, n + 1) if n % t == 0)


def test_g2_is_the_eisenstein_series(ctx63):
    expected = QSeries({0: Fraction(-1, 24), **{n: sigma(n, 1) for n in range(1, 31)}}, 30)
    assert ctx63.G_coefficient((2,)) == expected
    assert ctx63.G_coefficient((2,)).to_list()[:5] == [Fraction(-1, 24), 1, 3, 4, 7]


@pytest.mark.parametrize("k", range(1, 7))
def test_depth_one_divisor_sums(ctx63, beta63, k):
    expected = QSeries({0: beta63(k), **{n: Fraction(sigma(n, k - 1), factorial(k - 1)) for n in range(1, 31)}},
                       30)
    assert ctx63.G_coefficient((k,)) == expected


@pytest.mark.parametrize("idx", list(FROZEN_G), ids=str)
def test_g_frozen_values(ctx63, idx):
    assert ctx63.coefficient_of("g", idx).to_list()[:13] == FROZEN_G[idx]
    assert g_bruteforce(idx, 12).to_list() == FROZEN_G[idx]


def test_g_matches_partition_oracle_small(ctx_small):
    for w in bi_words(5, 3):
        idx = BiIndex.from_word(w)
        assert ctx_small.coefficient_of("g", idx) == g_bruteforce(idx, 10), idx


def test_example_coefficients(ctx63):
    assert ctx63.coefficient_of("g", (3,))[1] == Fraction(1, 2)
    G32 = ctx63.G_coefficient((3, 2))
    assert G32[0] == ctx63.beta(3, 2)
    assert G32[1] == Fraction(-1, 24)


def test_lm_series_by_hand():
    L = lm_series(2, TruncationParams(3, 1, 8))
    # coefficient of X^1 Y^0 is sum_n n q^(2n); of Y^1 is sum_n 2 q^(2n)
    assert L.coefficient((1, 0)) == QSeries({2: 1, 4: 2, 6: 3, 8: 4}, 8)
    assert L.coefficient((0, 1)) == QSeries({2: 2, 4: 2, 6: 2, 8: 2}, 8)


def test_btilde_forms_agree(ctx63):
    assert ctx63.b_tilde == ctx63.b_tilde_product


def test_swap_and_blocks(ctx63):
    assert swap(ctx63.G) == ctx63.G
    total = ctx63.Gj(0)
    for j in range(1, 4):
        total = total + ctx63.Gj(j)
    assert total == ctx63.G


def test_symbolic_decomposition_reproduces_G(ctx63):
    for r in range(1, 4):
        for idx, form in ctx63.G_in_g.coefficients(r).items():
            assert ctx63.evaluate_symbolic(form) == ctx63.G_coefficient(idx)


def test_y_free_context_agrees(ctx_small):
    capped = EisensteinContext(ctx_small.beta, ctx_small.trunc, ybound=0)
    for w in bi_words(5, 3, max_ysum=0):
        idx = BiIndex.from_word(w)
        assert capped.G_coefficient(idx) == ctx_small.G_coefficient(idx)
    with pytest.raises(KeyError):
        capped.G_coefficient(BiIndex.of((1,), (1,)))


def test_free_parameter_changes_G():
    t = TruncationParams(8, 2, 6)
    zero = EisensteinContext(solve_eds(8, 2), t)
    one = EisensteinContext(solve_eds(8, 2, {(6, 2): 1}), t)
    assert one.G_coefficient((6, 2)) - zero.G_coefficient((6, 2)) == 1
    assert one.G_coefficient((4, 2)) == zero.G_coefficient((4, 2))


def test_out_of_truncation(ctx63):
    with pytest.raises(KeyError):
        ctx63.G_coefficient((7,))
    with pytest.raises(KeyError):
        ctx63.G_coefficient((1, 1, 1, 1))
    with pytest.raises(KeyError):
        ctx63.coefficient_of("nonsense", (2,))


def test_context_needs_enough_beta():
    with pytest.raises(ValueError):
        EisensteinContext(solve_eds(4, 2), TruncationParams(6, 3, 5))


def test_parse_index():
    assert parse_index("3,2") == BiIndex.of((3, 2))
    assert parse_index("3,2;0,1") == BiIndex.of((3, 2), (0, 1))
    assert parse_index("2 1") == BiIndex.of((2, 1))


def test_csv_and_json_exports_agree(ctx63):
    rows = coefficient_records(ctx63, "G", [(2,), "1,1;1,1"])
    from_json = {(tuple(e["k"]), tuple(e["d"]), e["n"]): Fraction(e["value"]) for e in json.loads(records_to_json(rows))}
    lines = records_to_csv(rows).splitlines()
    assert lines[0] == "k,d,n,value"
    from_csv = {}
    for line in lines[1:]:
        k, d, n, v = line.split(",")
        from_csv[(tuple(map(int, k.split())), tuple(map(int, d.split())), int(n))] = Fraction(v)
    assert from_csv == from_json
    assert len(from_csv) == 2 * 31
    assert from_json[((2,), (0,), 0)] == Fraction(-1, 24)


def test_b_records_are_rational(ctx63):
    rows = coefficient_records(ctx63, "b", [(1, 1)])
    assert rows == [((1, 1), (0, 0), 0, ctx63.b.coefficient(BiIndex.of((1, 1))))]
