"""q-series bimoulds: L_m, g, b, b-tilde, frak-L_m, g*, G and the G_j pieces.

All q-series bimoulds are truncated at q^N (``trunc.q_order``). Built objects
live on an :class:`EisensteinContext`, one per (beta, truncation).

frak-L_m in depth r is  sum_j P_{r,j}(X, Y) * L_m[X_j; Y_1 + ... + Y_r]  with
rational polynomials P_{r,j} built from b and b-tilde. Since
L_m[X; Y] = sum_n e^{nX + mY} q^{nm}, every monomial coefficient of frak-L_m is
sum_{n: nm <= N} P_mu(n, m) q^{nm} for a polynomial P_mu that only depends on r.
Those polynomials are computed once and evaluated for every m.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from functools import cached_property
from math import factorial

from .eds import BetaSolution
from .exact import LinForm, QSeries, TruncationParams, format_rational, q_derivative
from .moulds import (
    Bimould,
    ConstantMould,
    bz_construct,
    lift_Y,
    mould_product,
    negate_x,
    unit_bimould,
    z_gamma,
)
from .poly import BiIndex, LinearSubstitution, PolyXY, from_bi_coefficients, poly_mul, poly_substitute
from .report import RelationReport
from .words import bi_words


def lm_series(m: int, trunc: TruncationParams, ybound=None) -> PolyXY:
    """Depth-1 part of L_m: coefficient of X^a Y^b is sum_n n^a/a! m^b/b! q^{nm}."""
    if m < 1:
        raise ValueError("m must be >= 1")
    N, bound = trunc.q_order, trunc.degree_bound(1)
    terms = {}
    if m <= N:
        ymax = bound if ybound is None else min(bound, ybound)
        for a in range(bound + 1):
            for b in range(min(bound - a, ymax) + 1):
                c = Fraction(m ** b, factorial(a) * factorial(b))
                terms[(a, b)] = QSeries._raw({n * m: c * n ** a for n in range(1, N // m + 1)}, N)
    return PolyXY(1, bound, terms, ybound)


def g_bruteforce(idx, N: int) -> QSeries:
    """Direct partition sum for g[k; d] up to q^N."""
    idx = idx if isinstance(idx, BiIndex) else BiIndex.of(idx)
    r = idx.depth
    out: dict = {}

    def rec(i, mmax, total, weight):
        if i == r:
            out[total] = out.get(total, 0) + weight
            return
        k, d = idx.k[i], idx.d[i]
        rest = r - i - 1
        # the remaining parts need at least 1 + 2 + ... + rest
        for m in range(rest + 1, mmax):
            if total + m + rest * (rest + 1) // 2 > N:
                break
            for n in range(1, (N - total - rest * (rest + 1) // 2) // m + 1):
                rec(i + 1, m, total + m * n, weight * Fraction(n ** (k - 1) * m ** d, factorial(k - 1)))

    if r == 0:
        return QSeries({0: 1}, N)
    rec(0, N + 1, 0, Fraction(1))
    return QSeries(out, N)


def _embed(p: PolyXY, r: int, xforms, yforms, bound: int, ybound) -> PolyXY:
    """Place a depth-s polynomial into depth r via linear forms for its variables."""
    if p.depth == 0:
        return PolyXY.constant(p.constant_term(), r, bound, ybound)
    s = LinearSubstitution.from_forms(p.depth, r, xforms, yforms)
    return poly_substitute(p, s, bound, ybound)


def _mul(factors, r, bound, ybound) -> PolyXY:
    acc = PolyXY.constant(Fraction(1), r, bound, ybound)
    for f in factors:
        acc = poly_mul(acc, f).truncate(bound, ybound)
    return acc


class EisensteinContext:
    """Bimoulds attached to one rational EDS solution beta at one truncation.

    ``ybound=0`` restricts everything to Y-free coefficients (combinatorial
    multiple Eisenstein series without derivative data); swap checks then refuse.
    ``btilde_negate_y`` flips the Y arguments of b-tilde inside frak-L_m; kept
    only for experiments, the default follows the definition literally.
    """

    def __init__(self, beta: BetaSolution, trunc: TruncationParams, ybound=None, btilde_negate_y=False):
        if beta.weight_max < trunc.weight_max or beta.depth_max < min(trunc.depth_max, trunc.weight_max):
            raise ValueError(
                f"beta solved to (W={beta.weight_max}, D={beta.depth_max}) does not cover {trunc}")
        self.beta = beta
        self.trunc = trunc
        self.ybound = ybound
        self.btilde_negate_y = btilde_negate_y
        self._frak: dict = {}
        self._Gj: dict = {}

    @property
    def W(self):
        return self.trunc.weight_max

    @property
    def D(self):
        return self.trunc.depth_max

    @property
    def N(self):
        return self.trunc.q_order

    # rational bimoulds

    @cached_property
    def beta_mould(self) -> Bimould:
        return self.beta.mould(self.trunc)

    @cached_property
    def b(self) -> Bimould:
        return _cap_y(bz_construct(self.beta_mould), self.ybound)

    @cached_property
    def b_tilde(self) -> Bimould:
        """Expanded form: sum_i (-1)^i/(2^i i!) b[X_{i+1}..X_r; -Y_1..-Y_{r-i}]."""
        trunc, yb = self.trunc, self.ybound
        parts = [PolyXY.constant(Fraction(1), 0, trunc.weight_max, yb)]
        for r in range(1, self.D + 1):
            bound = trunc.degree_bound(r)
            acc = PolyXY.zero(r, bound, yb)
            for i in range(r + 1):
                s = r - i
                xs = [{("X", i + l): 1} for l in range(1, s + 1)]
                ys = [{("Y", l): -1} for l in range(1, s + 1)]
                term = _embed(self.b.parts[s], r, xs, ys, bound, yb)
                acc = acc + term.scale(Fraction((-1) ** i, 2 ** i * factorial(i)))
            parts.append(acc)
        return Bimould(trunc, parts, yb)

    @cached_property
    def b_tilde_product(self) -> Bimould:
        """Product form Y^{b_gamma^-} x exp(-T/2) x X^b, used as a cross-check."""
        Z = self.beta_mould
        left = lift_Y(negate_x(z_gamma(Z)))
        half = ConstantMould([Fraction((-1) ** r, 2 ** r * factorial(r)) for r in range(self.D + 1)])
        return _cap_y(mould_product(mould_product(left, half.to_bimould(self.trunc)), Z), self.ybound)

    def block_factor(self, r: int, start: int, n: int, end: int) -> PolyXY:
        """b[X_start - X_n, .., X_{n-1} - X_n; Y_start..Y_{n-1}] * b~[X_end - X_n, .., X_{n+1} - X_n; Y_end..Y_{n+1}]
        inside depth r (1-based, start <= n <= end)."""
        bound, yb = self.trunc.degree_bound(r), self.ybound
        s1 = n - start
        xs = [{("X", start + l - 1): 1, ("X", n): -1} for l in range(1, s1 + 1)]
        ys = [{("Y", start + l - 1): 1} for l in range(1, s1 + 1)]
        left = _embed(self.b.parts[s1], r, xs, ys, bound, yb)
        s2 = end - n
        sign = -1 if self.btilde_negate_y else 1
        xs = [{("X", end - l + 1): 1, ("X", n): -1} for l in range(1, s2 + 1)]
        ys = [{("Y", end - l + 1): sign} for l in range(1, s2 + 1)]
        right = _embed(self.b_tilde.parts[s2], r, xs, ys, bound, yb)
        return _mul([left, right], r, bound, yb)

    def tail_factor(self, r: int, start: int) -> PolyXY:
        """b[X_start..X_r; Y_start..Y_r] inside depth r."""
        bound, yb = self.trunc.degree_bound(r), self.ybound
        s = r - start + 1
        xs = [{("X", start + l - 1): 1} for l in range(1, s + 1)]
        ys = [{("Y", start + l - 1): 1} for l in range(1, s + 1)]
        return _embed(self.b.parts[s], r, xs, ys, bound, yb)

    @cached_property
    def _frak_tables(self) -> dict:
        """r -> {monomial: [(a, b, c)]} with frak-L_m[mu] = sum_n sum c n^a m^b q^{nm}."""
        tables = {}
        yb = self.ybound
        for r in range(1, self.D + 1):
            bound = self.trunc.degree_bound(r)
            ysum = PolyXY(r, bound, {tuple(1 if i == r + l else 0 for i in range(2 * r)): 1 for l in range(r)}, yb)
            ypow = [PolyXY.constant(Fraction(1), r, bound, yb)]
            for _ in range(bound):
                ypow.append(poly_mul(ypow[-1], ysum).truncate(bound, yb))
            table: dict = {}
            for j in range(1, r + 1):
                P = self.block_factor(r, 1, j, r)
                xj = PolyXY.var("X", j, r, bound, yb)
                xpow = PolyXY.constant(Fraction(1), r, bound, yb)
                for a in range(bound + 1):
                    Pa = poly_mul(P, xpow).truncate(bound, yb)
                    for b in range(bound - a + 1):
                        if yb is not None and b > yb:
                            break
                        term = poly_mul(Pa, ypow[b]).truncate(bound, yb)
                        scale = Fraction(1, factorial(a) * factorial(b))
                        for e, c in term.terms.items():
                            table.setdefault(e, {}).setdefault((a, b), Fraction(0))
                            table[e][(a, b)] += c * scale
                    xpow = poly_mul(xpow, xj).truncate(bound, yb)
            tables[r] = {e: [(a, b, c) for (a, b), c in sorted(ab.items()) if c] for e, ab in table.items()}
        return tables

    def frak_lm(self, m: int) -> Bimould:
        hit = self._frak.get(m)
        if hit is not None:
            return hit
        if m < 1:
            raise ValueError("m must be >= 1")
        N, yb = self.N, self.ybound
        parts = [PolyXY.constant(Fraction(1), 0, self.W, yb)]
        for r in range(1, self.D + 1):
            terms = {}
            if m <= N:
                for e, poly in self._frak_tables[r].items():
                    coeffs = {}
                    for n in range(1, N // m + 1):
                        v = sum((c * n ** a * m ** b for a, b, c in poly), Fraction(0))
                        if v:
                            coeffs[n * m] = v
                    if coeffs:
                        terms[e] = QSeries._raw(coeffs, N)
            parts.append(PolyXY._raw(r, self.trunc.degree_bound(r), terms, yb))
        hit = self._frak[m] = Bimould(self.trunc, parts, yb)
        return hit

    def _depth_one_lm(self, m: int) -> Bimould:
        yb = self.ybound
        parts = [PolyXY.constant(Fraction(1), 0, self.W, yb), lm_series(m, self.trunc, yb)]
        parts += [PolyXY.zero(r, self.trunc.degree_bound(r), yb) for r in range(2, self.D + 1)]
        return Bimould(self.trunc, parts, yb)

    # q-series bimoulds

    @cached_property
    def g(self) -> Bimould:
        """The raw bimould g via C_{M+1} = L_M x C_M (L_M only in depth 1)."""
        C = unit_bimould(self.trunc, self.ybound)
        for M in range(1, self.N + 1):
            C = mould_product(self._depth_one_lm(M), C)
        return C

    @cached_property
    def gstar(self) -> Bimould:
        C = unit_bimould(self.trunc, self.ybound)
        for M in range(1, self.N + 1):
            C = mould_product(self.frak_lm(M), C)
        return C

    @cached_property
    def G(self) -> Bimould:
        return mould_product(self.gstar, self.b)

    @cached_property
    def _block_sums(self) -> list:
        """D_j = sum over exactly j blocks of frak-L with m_1 > .. > m_j, for j = 0..D."""
        unit = unit_bimould(self.trunc, self.ybound)
        Ds = [unit] + [_zero_bimould(self.trunc, self.ybound) for _ in range(self.D)]
        for M in range(1, self.N + 1):
            L = self.frak_lm(M) - unit
            new = [Ds[0]]
            for j in range(1, self.D + 1):
                new.append(Ds[j] + mould_product(L, Ds[j - 1]))
            Ds = new
        return Ds

    def Gj(self, j: int) -> Bimould:
        """G_j: j blocks of frak-L followed by a b tail; G_0 = b, zero in depths < j."""
        if j < 0:
            raise ValueError("j must be >= 0")
        hit = self._Gj.get(j)
        if hit is None:
            if j == 0:
                hit = self.b
            elif j > self.D:
                hit = _zero_bimould(self.trunc, self.ybound)
            else:
                hit = mould_product(self._block_sums[j], self.b)
            self._Gj[j] = hit
        return hit

    # symbolic route: G as an explicit combination of g's

    def g_symbolic_part(self, j: int) -> PolyXY:
        """Depth-j part of g with one unknown per bi-index."""
        table = {}
        for w in bi_words(self.W, j, max_ysum=self.ybound, min_depth=j):
            if len(w) == j:
                idx = BiIndex.from_word(w)
                table[idx] = LinForm.var(idx)
        return from_bi_coefficients(table, j, self.trunc.degree_bound(j), self.ybound)

    @cached_property
    def G_in_g(self) -> Bimould:
        """G with LinForm coefficients in the unknowns g[k; d] (constant = rational part)."""
        yb = self.ybound
        gsym = {j: self.g_symbolic_part(j) for j in range(1, self.D + 1)}
        parts = [PolyXY.constant(Fraction(1), 0, self.W, yb)]
        for r in range(1, self.D + 1):
            bound = self.trunc.degree_bound(r)
            acc = self.b.parts[r].map_scalars(lambda c: LinForm(const=c))
            for j in range(1, r + 1):
                for ns, rs in _block_layouts(r, j):
                    factors = []
                    prev = 0
                    for n, rr in zip(ns, rs):
                        factors.append(self.block_factor(r, prev + 1, n, rr))
                        prev = rr
                    factors.append(self.tail_factor(r, prev + 1))
                    C = _mul(factors, r, bound, yb)
                    xs = [{("X", n): 1} for n in ns]
                    starts = [0] + list(rs[:-1])
                    ys = [{("Y", l): 1 for l in range(s + 1, e + 1)} for s, e in zip(starts, rs)]
                    gpart = _embed(gsym[j], r, xs, ys, bound, yb)
                    acc = acc + poly_mul(gpart, C).truncate(bound, yb)
            parts.append(acc)
        return Bimould(self.trunc, parts, yb)

    @cached_property
    def g_table(self) -> dict:
        """BiIndex -> q-series of g for every index inside the truncation."""
        out = {}
        for r in range(1, self.D + 1):
            out.update(self.g.coefficients(r))
        return out

    def evaluate_symbolic(self, form) -> QSeries:
        """Substitute the built g-series into a LinForm over g-indices."""
        if not isinstance(form, LinForm):
            return QSeries({0: form}, self.N)
        acc = QSeries({0: form.const}, self.N)
        for idx, c in form.coeffs.items():
            acc = acc + self.g_table.get(idx, QSeries({}, self.N)) * c
        return acc

    # coefficients

    def G_coefficient(self, idx) -> QSeries:
        idx = _as_index(idx)
        return _series(self.G.coefficient(idx), self.N)

    def coefficient_of(self, name: str, idx):
        """Coefficient of one of the named bimoulds: G, g, gstar, b, btilde."""
        idx = _as_index(idx)
        B = {"G": lambda: self.G, "g": lambda: self.g, "gstar": lambda: self.gstar,
             "b": lambda: self.b, "btilde": lambda: self.b_tilde}.get(name)
        if B is None:
            raise KeyError(f"unknown bimould {name!r}")
        c = B().coefficient(idx)
        return c if name in ("b", "btilde") else _series(c, self.N)

    def q_derivative_check(self, idx) -> RelationReport:
        """q d/dq G[k; d] = sum_i k_i G[.., k_i + 1, ..; .., d_i + 1, ..]."""
        idx = _as_index(idx)
        rep = RelationReport("deriv-formula", (self.W, self.D, self.N))
        if idx.weight + 2 > self.W or idx.depth > self.D or (self.ybound is not None and sum(idx.d) + 1 > self.ybound):
            rep.skip(f"{idx}: weight + 2 exceeds the truncation")
            return rep.finish()
        lhs = q_derivative(self.G_coefficient(idx))
        rhs = QSeries({}, self.N)
        for i in range(idx.depth):
            k, d = list(idx.k), list(idx.d)
            k[i] += 1
            d[i] += 1
            rhs = rhs + self.G_coefficient(BiIndex(tuple(k), tuple(d))) * idx.k[i]
        rep.compare(str(idx), lhs, rhs)
        return rep.finish()


def _cap_y(B: Bimould, ybound) -> Bimould:
    if ybound is None:
        return B
    return Bimould(B.trunc, [p.truncate(ybound=ybound) for p in B.parts], ybound)


def _zero_bimould(trunc, ybound) -> Bimould:
    parts = [PolyXY.zero(r, trunc.degree_bound(r) if r else trunc.weight_max, ybound)
             for r in range(trunc.depth_max + 1)]
    return Bimould(trunc, parts, ybound)


def _block_layouts(r: int, j: int):
    """All 0 < n_1 <= r_1 < n_2 <= r_2 < ... < n_j <= r_j <= r."""
    out = []

    def rec(prev, ns, rs):
        if len(ns) == j:
            out.append((tuple(ns), tuple(rs)))
            return
        for n in range(prev + 1, r + 1):
            for rr in range(n, r + 1):
                rec(rr, ns + [n], rs + [rr])

    rec(0, [], [])
    return out


def _as_index(idx) -> BiIndex:
    if isinstance(idx, BiIndex):
        return idx
    if isinstance(idx, str):
        return parse_index(idx)
    return BiIndex.of(*idx) if idx and isinstance(idx[0], (tuple, list)) else BiIndex.of(idx)


def parse_index(text: str) -> BiIndex:
    """'3,2' or '3,2;0,1' -> BiIndex."""
    text = text.strip()
    if ";" in text:
        ks, ds = text.split(";")
        return BiIndex.of(tuple(int(x) for x in ks.split(",")), tuple(int(x) for x in ds.split(",")))
    return BiIndex.of(tuple(int(x) for x in text.replace(" ", ",").split(",") if x))


def _series(c, N) -> QSeries:
    return c if isinstance(c, QSeries) else QSeries({0: c}, N)


def coefficient_records(ctx: EisensteinContext, name: str, indices):
    """(k, d, n, value) rows for every index and q-exponent 0..N."""
    rows = []
    for idx in indices:
        idx = _as_index(idx)
        c = ctx.coefficient_of(name, idx)
        if isinstance(c, QSeries):
            for n in range(c.prec + 1):
                rows.append((idx.k, idx.d, n, c[n]))
        else:
            rows.append((idx.k, idx.d, 0, Fraction(c)))
    return rows


def records_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "d", "n", "value"])
    for k, d, n, v in rows:
        w.writerow([" ".join(map(str, k)), " ".join(map(str, d)), n, format_rational(v)])
    return buf.getvalue()


def records_to_json(rows) -> str:
    doc = [{"k": list(k), "d": list(d), "n": n, "value": format_rational(v)} for k, d, n, v in rows]
    return json.dumps(doc, indent=1)
