"""Acceptance criteria 1-8, each run exactly as stated.

Every test records one PASS/FAIL line; the lines are printed as they happen and
again in the terminal summary. Criterion 4 asks for the G(2,1)G(3) identity with
coefficient 3 for G[3,2;0,1], which does not hold: swap invariance and
symmetrility force 2. That criterion is therefore an expected failure.
"""
from fractions import Fraction

import pytest

from cmes.eds import solve_eds
from cmes.eisenstein import EisensteinContext, g_bruteforce
from cmes.exact import TruncationParams
from cmes.poly import BiIndex
from cmes.relations import check_identity
from cmes.words import bi_words

from conftest import ACCEPTANCE_LINES


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return ok


def summarize(reports):
    return ", ".join(f"{r.identity}={r.status}[{r.checked}]" for r in reports)


def failures(reports):
    return [(r.identity, r.first_failure) for r in reports if not r.passed]


# --- 1: beta solver

def test_criterion_1_beta_solver():
    full = solve_eds(8, 8)
    desk = solve_eds(8, 4)
    b = full
    values_ok = (b(2) == Fraction(-1, 24) and b(1, 1) == Fraction(1, 48) and b(3) == 0 and b(5) == 0
                 and 2 * b(1, 3) + 3 * b(2, 2) + 6 * b(3, 1) == Fraction(1, 1152))
    unique_ok = all(s.free_count(w) == 0 for s in (full, desk) for w in range(2, 8))
    free8_ok = full.free_count(8) >= 1 and desk.free_count(8) >= 1
    same_low = all(full(k) == desk(k) for k in desk.values if sum(k) <= 7)
    ok = values_ok and unique_ok and free8_ok and same_low
    record(1, ok, f"values={values_ok}, no free parameters at weights 2-7={unique_ok}, "
                  f"free at weight 8: D=8 {[f['index'] for f in full.free_params]}, "
                  f"D=4 {[f['index'] for f in desk.free_params]}")
    assert ok


# --- 2: mould-built g against the partition sums

def test_criterion_2_oracle_equivalence(ctx63):
    bad = []
    count = 0
    for w in bi_words(6, 3):
        idx = BiIndex.from_word(w)
        count += 1
        diff = ctx63.coefficient_of("g", idx).first_difference(g_bruteforce(idx, 30))
        if diff is not None:
            bad.append((str(idx), diff))
    ok = not bad
    record(2, ok, f"{count} bi-indices of weight <= 6, depth <= 3, q^0..q^30; mismatches {bad[:1]}")
    assert ok


# --- 3: swap invariance, symmetrility, the G_j pieces

def test_criterion_3_swap_and_symmetril(ctx63):
    reports = [check_identity(i, ctx63) for i in ("swap-G", "symmetril-G", "swap-Gj", "sum-Gj")]
    ok = all(r.passed for r in reports)
    record(3, ok, summarize(reports))
    assert ok, failures(reports)


# --- 4: named identities to q^30

CRITERION_4 = [("weight4", {}), ("nonduality", {}), ("ex-32", {}), ("ex-211", {}), ("quasimod-1111", {}),
               ("depth2times3", {"coefficients": "stated"}), ("G221-expansion", {})]


@pytest.mark.xfail(strict=True, reason="G(2,1)G(3) as stated has 3 G[3,2;0,1]; the derived coefficient is 2")
def test_criterion_4_named_identities(ctx63):
    reports = [check_identity(i, ctx63, **kw) for i, kw in CRITERION_4]
    ok = all(r.passed for r in reports)
    derived = check_identity("depth2times3", ctx63)
    record(4, ok, summarize(reports) + f"; with the derived coefficient depth2times3={derived.status}")
    assert ok, failures(reports)


# --- 5: double shuffle in depth two, derivatives, the map h

def test_criterion_5_dsh_and_derivatives():
    # z_2 * w for w of weight 4 reaches depth 5
    ctx = EisensteinContext(solve_eds(6, 5), TruncationParams(6, 5, 30))
    reports = [check_identity("dsh-depth2", ctx), check_identity("deriv-formula", ctx, max_weight=4),
               check_identity("deriv-map", ctx, max_weight=4), check_identity("h-cocycle", ctx, max_weight=4)]
    complete = all(not r.skipped for r in reports)
    ok = complete and all(r.passed for r in reports)
    record(5, ok, summarize(reports) + f"; nothing skipped={complete}")
    assert ok, failures(reports)


# --- 6: closed forms

def criterion_6_reports(ctx, capped_ctx=None, gamma_order=8):
    reports = [check_identity("gamma-sinh", ctx, order=gamma_order)]
    sin_ctx = EisensteinContext(ctx.beta, TruncationParams(ctx.W, ctx.D, 20))
    reports.append(check_identity("sin-identity", sin_ctx))
    reports.append(check_identity("qsh-exp", ctx, pairs=[(2, 0), (1, 1)]))
    if capped_ctx is not None:
        reports.append(check_identity("qsh-exp", capped_ctx, pairs=[(4, 0)]))
    return reports


def test_criterion_6_closed_forms(ctx63):
    capped = EisensteinContext(solve_eds(12, 3), TruncationParams(12, 3, 30), ybound=0)
    reports = criterion_6_reports(ctx63, capped)
    # to X^8 (9 coefficients), T^1..T^7 (4), r = 1..3 for each of the three (k, d)
    reach = (reports[1].checked == 4 and reports[2].checked == 6 and reports[3].checked == 3
             and all(not r.skipped for r in reports))
    ok = reach and all(r.passed for r in reports)
    record(6, ok, summarize(reports) + f"; full reach={reach}")
    assert ok, failures(reports)


# --- 7: constant terms

def test_criterion_7_constant_terms():
    ctx = EisensteinContext(solve_eds(6, 6), TruncationParams(6, 6, 30), ybound=0)
    rep = check_identity("constant-term", ctx)
    ok = rep.passed and rep.checked == 2 ** 6 - 1
    record(7, ok, f"{rep.checked} z-indices of weight <= 6, status {rep.status}")
    assert ok, rep.first_failure


# --- 8: a different EDS solution

CRITERIA_3_TO_6 = ["swap-G", "symmetril-G", "swap-Gj", "sum-Gj", "weight4", "nonduality", "ex-32", "ex-211",
                   "quasimod-1111", "depth2times3", "G221-expansion", "dsh-depth2", "deriv-formula", "deriv-map",
                   "h-cocycle"]


def test_criterion_8_other_free_value():
    beta = solve_eds(8, 2, {(6, 2): 1})
    ctx = EisensteinContext(beta, TruncationParams(8, 2, 30))
    reports = [check_identity(i, ctx) for i in CRITERIA_3_TO_6] + criterion_6_reports(ctx)
    no_fail = all(r.status != "fail" for r in reports)
    ran = [r for r in reports if r.passed]
    skipped = [r.identity for r in reports if r.status == "skipped-out-of-truncation"]
    # only the depth-3 displays may be out of reach at D = 2
    skips_ok = set(skipped) <= {"ex-211", "depth2times3", "G221-expansion"}
    ok = no_fail and skips_ok and beta(6, 2) == 1
    record(8, ok, f"beta(6,2)=1, {len(ran)} passed, skipped (depth 3 at D=2): {skipped}")
    assert ok, failures(reports)
