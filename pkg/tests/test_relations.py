import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmes.eds import solve_eds
from cmes.eisenstein import EisensteinContext
from cmes.exact import TruncationParams
from cmes.poly import BiIndex
from cmes.relations import (
    DEPTH2TIMES3_STATED,
    DEPTH2TIMES3_SWAP,
    REGISTRY,
    all_passed,
    check_identity,
    derivative_expansion,
    formal_swap_product,
    g_in_terms_of_G,
    h_map,
    reports_to_jsonl,
    run_all,
    two_sin_half,
    z_shuffle_z2,
)
from cmes.words import STUFFLE, quasi_shuffle

zword = st.lists(st.integers(1, 4), min_size=1, max_size=3).map(tuple)


@pytest.fixture(scope="module")
def reference_reports(ctx63):
    return run_all(ctx63)


def test_registry_passes_at_reference_truncation(reference_reports):
    bad = [(r.identity, r.status, r.first_failure) for r in reference_reports if not r.passed]
    assert bad == []
    assert [r.identity for r in reference_reports] == list(REGISTRY)
    assert all_passed(reference_reports)


def test_reports_are_reproducible(ctx63, reference_reports):
    again = [check_identity(i, ctx63) for i in ("weight4", "dsh-depth2", "g-span")]
    first = {r.identity: r.to_json() for r in reference_reports}
    assert all(first[r.identity] == r.to_json() for r in again)


def test_jsonl_output(reference_reports):
    lines = reports_to_jsonl(reference_reports[:3]).splitlines()
    assert len(lines) == 3
    doc = json.loads(lines[0])
    assert set(doc) >= {"identity", "trunc", "status", "checked", "first_failure"}
    assert doc["trunc"] == [6, 3, 30]


def test_weight4(ctx63):
    rep = check_identity("weight4", ctx63)
    assert rep.passed and rep.checked == 1


def test_dsh_single_case(ctx63):
    rep = check_identity("dsh-depth2", ctx63, cases=[(1, 1, 0, 0)])
    assert rep.passed and rep.checked == 3


def test_G221_q1_combination(beta63):
    b = beta63
    assert 2 * b(2) - b(2) ** 2 + 12 * b(1, 1) + 4 * b(1, 3) + 6 * b(2, 2) + 12 * b(3, 1) - Fraction(1, 6) == 0


def test_unknown_identity(ctx63):
    with pytest.raises(KeyError, match="weight4"):
        check_identity("nosuchid", ctx63)


def test_small_truncation_reports_skipped():
    ctx = EisensteinContext(solve_eds(3, 1), TruncationParams(3, 1, 5))
    for i in ("weight4", "dsh-depth2", "ex-211", "depth2times3"):
        assert check_identity(i, ctx).status == "skipped-out-of-truncation"
    assert not all_passed([check_identity("weight4", ctx)])


def test_corrupted_beta_is_detected(beta63):
    bad = beta63.with_value((2, 2), Fraction(1, 7))
    ctx = EisensteinContext(bad, TruncationParams(6, 3, 8))
    reports = run_all(ctx, ["symmetril-G", "weight4", "constant-term"])
    failed = [r.identity for r in reports if r.status == "fail"]
    assert "symmetril-G" in failed
    assert reports[0].first_failure["index"]


def test_stated_depth2times3_variant_fails(ctx63):
    rep = check_identity("depth2times3", ctx63, coefficients="stated")
    assert rep.status == "fail"
    assert rep.first_failure["index"] == "swap evaluation"
    assert rep.first_failure["q_exponent"] == 1
    # the stated variant exceeds the true value by exactly G[3,2;0,1]
    diff = {k: DEPTH2TIMES3_STATED[k] - DEPTH2TIMES3_SWAP.get(k, 0) for k in DEPTH2TIMES3_STATED}
    assert {k: v for k, v in diff.items() if v} == {BiIndex.of((3, 2), (0, 1)): 1}


def test_formal_swap_product_depth_one():
    out = formal_swap_product((1,), (1,), 3, 2)
    # coefficients from the depth-two double shuffle formula at k1=k2=1, d1=d2=0
    assert out == {BiIndex.of((1, 1)): 2, BiIndex.of((1,), (1,)): 1}


@given(zword)
@settings(max_examples=30, deadline=None)
def test_derivative_expansion_is_the_shuffle(w):
    assert derivative_expansion(w) == z_shuffle_z2(w)


def test_h_of_z1():
    assert h_map((1,)) == {(3,): 1, (2, 1): -1}


@given(zword, zword)
@settings(max_examples=20, deadline=None)
def test_h_map_is_linear(u, v):
    expected = {}
    for w, c in h_map(u).items():
        expected[w] = expected.get(w, 0) + 2 * c
    for w, c in h_map(v).items():
        expected[w] = expected.get(w, 0) - c
    combo = {u: Fraction(2)}
    combo[v] = combo.get(v, 0) - 1
    assert h_map({w: c for w, c in combo.items() if c}) == {w: c for w, c in expected.items() if c}


def test_stuffle_with_z2_part_of_h():
    w = (2, 1)
    h = h_map(w)
    st_part = quasi_shuffle((2,), w, STUFFLE)
    for x, c in z_shuffle_z2(w).items():
        st_part[x] = st_part.get(x, 0) - c
    assert h == {x: c for x, c in st_part.items() if c}


def test_g_in_terms_of_G_is_unitriangular(ctx63):
    table = g_in_terms_of_G(ctx63, 4, 2)
    g2 = table[BiIndex.of((2,))]
    # g(2) = G(2) + 1/24
    assert g2 == (Fraction(1, 24), {BiIndex.of((2,)): 1})
    for idx, (_, comb) in table.items():
        assert comb[idx] == 1
        assert all(x.weight <= idx.weight for x in comb)


def test_two_sin_half():
    s = two_sin_half(7)
    assert s[:8] == [0, 1, 0, Fraction(-1, 24), 0, Fraction(1, 1920), 0, Fraction(-1, 322560)]


def test_every_identity_has_a_statement():
    assert len(REGISTRY) == 31
    for entry in REGISTRY.values():
        assert entry.statement and callable(entry.check)
