"""Moulds and bimoulds as truncated families of polynomials.

A :class:`Bimould` holds one :class:`PolyXY` per depth 0..D. The depth-r part
has degree bound W - r, so every stored coefficient belongs to an index of
weight <= W. A mould is a bimould without Y-monomials.

An optional ``ybound`` caps the Y-degree of every part. ``ybound=0`` keeps only
the Y-free coefficients G(k_1, ..., k_r), which is much cheaper at high weight.
Setting Y = 0 commutes with products and with the substitutions used to build
the Eisenstein bimoulds, but not with swap, so swap refuses such bimoulds.
"""
from __future__ import annotations

from fractions import Fraction

from .exact import TruncationParams, series_exp
from .poly import (
    BiIndex,
    LinearSubstitution,
    PolyXY,
    concat_mul,
    extract_bi_coefficients,
    from_bi_coefficients,
    negation_substitution,
    poly_substitute,
    swap_substitution,
)
from .report import RelationReport
from .words import SHUFFLE_Z, Z, ZBI, DiamondProduct, bi_words, quasi_shuffle, z_words


class Bimould:
    """Treat as immutable; coefficient tables are cached on first use."""

    def __init__(self, trunc: TruncationParams, parts, ybound=None):
        parts = list(parts)
        if len(parts) != trunc.depth_max + 1:
            raise ValueError("need one part per depth 0..D")
        for r, p in enumerate(parts):
            if p.depth != r:
                raise ValueError(f"part {r} has depth {p.depth}")
        self.trunc = trunc
        self.ybound = ybound
        self.parts = parts
        self._coeffs: dict = {}

    @classmethod
    def from_parts(cls, trunc, make, ybound=None) -> Bimould:
        """Build from ``make(r)`` returning a dict of terms for depth r >= 1."""
        parts = [PolyXY.constant(Fraction(1), 0, trunc.weight_max, ybound)]
        for r in range(1, trunc.depth_max + 1):
            parts.append(PolyXY(r, trunc.degree_bound(r), make(r), ybound))
        return cls(trunc, parts, ybound)

    def part(self, r: int) -> PolyXY:
        return self.parts[r]

    @property
    def depth_max(self) -> int:
        return self.trunc.depth_max

    def coefficients(self, r: int) -> dict:
        hit = self._coeffs.get(r)
        if hit is None:
            hit = self._coeffs[r] = extract_bi_coefficients(self.parts[r])
        return hit

    def in_truncation(self, idx: BiIndex) -> bool:
        if idx.depth > self.depth_max or idx.weight > self.trunc.weight_max:
            return False
        return self.ybound is None or sum(idx.d) <= self.ybound

    def coefficient(self, idx) -> object:
        """b[k; d]; raises for indices outside the truncation."""
        if not isinstance(idx, BiIndex):
            idx = BiIndex.of(*idx) if isinstance(idx[0], tuple) else BiIndex.of(idx)
        if idx.depth == 0:
            return self.parts[0].constant_term()
        if not self.in_truncation(idx):
            raise KeyError(f"index {idx} is outside the truncation {self.trunc} (ybound={self.ybound})")
        return self.coefficients(idx.depth).get(idx, 0)

    def phi(self, w) -> object:
        """Coefficient map on a z-word or bi-word."""
        if not w:
            return self.parts[0].constant_term()
        return self.coefficient(BiIndex.from_word(w))

    def is_mould(self) -> bool:
        return not any(p.has_y() for p in self.parts)

    def _combine(self, other, f) -> Bimould:
        _same(self, other)
        yb = _min_opt(self.ybound, other.ybound)
        return Bimould(self.trunc, [f(a, b) for a, b in zip(self.parts, other.parts)], yb)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def scale(self, c) -> Bimould:
        return Bimould(self.trunc, [p.scale(c) for p in self.parts], self.ybound)

    def map_parts(self, f) -> Bimould:
        return Bimould(self.trunc, [f(p) for p in self.parts], self.ybound)

    def first_difference(self, other: Bimould, min_depth: int = 0):
        """(index, lhs, rhs) for the lowest differing coefficient, or None."""
        _same(self, other)
        for r in range(min_depth, self.depth_max + 1):
            diff = self.parts[r].first_difference(other.parts[r])
            if diff is not None:
                e, a, b = diff
                k = tuple(x + 1 for x in e[:r])
                idx = BiIndex(k, tuple(e[r:]))
                return idx, a, b
        return None

    def __eq__(self, other):
        if not isinstance(other, Bimould):
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def __repr__(self):
        sizes = [len(p.terms) for p in self.parts]
        return f"Bimould(trunc={self.trunc}, ybound={self.ybound}, terms per depth={sizes})"


def _min_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _same(a: Bimould, b: Bimould):
    if a.trunc.weight_max != b.trunc.weight_max or a.trunc.depth_max != b.trunc.depth_max:
        raise ValueError(f"truncation mismatch: {a.trunc} vs {b.trunc}")


def unit_bimould(trunc: TruncationParams, ybound=None) -> Bimould:
    return Bimould.from_parts(trunc, lambda r: {}, ybound)


def mould_from_coefficients(table, trunc: TruncationParams, ybound=None) -> Bimould:
    """Mould or bimould from a coefficient table.

    Keys are z-indices (tuples of ints) or BiIndex; entries outside the
    truncation are dropped.
    """
    by_depth: dict = {}
    for key, c in table.items():
        idx = key if isinstance(key, BiIndex) else BiIndex.of(key)
        if idx.depth == 0 or idx.depth > trunc.depth_max or idx.weight > trunc.weight_max:
            continue
        by_depth.setdefault(idx.depth, {})[idx] = c
    parts = [PolyXY.constant(Fraction(1), 0, trunc.weight_max, ybound)]
    for r in range(1, trunc.depth_max + 1):
        parts.append(from_bi_coefficients(by_depth.get(r, {}), r, trunc.degree_bound(r), ybound))
    return Bimould(trunc, parts, ybound)


class ConstantMould:
    """The power series sum a_r T^r viewed as a mould with constant parts."""

    def __init__(self, coeffs):
        self.coeffs = list(coeffs)

    def __getitem__(self, r):
        return self.coeffs[r] if r < len(self.coeffs) else Fraction(0)

    def __mul__(self, other: ConstantMould) -> ConstantMould:
        n = max(len(self.coeffs), len(other.coeffs))
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                if i + j < n:
                    out[i + j] += a * b
        return ConstantMould(out)

    def to_bimould(self, trunc: TruncationParams, ybound=None) -> Bimould:
        parts = [PolyXY.constant(self[0], 0, trunc.weight_max, ybound)]
        for r in range(1, trunc.depth_max + 1):
            parts.append(PolyXY.constant(self[r], r, trunc.degree_bound(r), ybound))
        return Bimould(trunc, parts, ybound)

    def __repr__(self):
        return f"ConstantMould({[str(c) for c in self.coeffs]})"


def mould_product(A: Bimould, B: Bimould) -> Bimould:
    """(A x B)^(r) = sum_j A^(j)(first j variables) * B^(r-j)(remaining variables)."""
    _same(A, B)
    trunc = A.trunc
    yb = _min_opt(A.ybound, B.ybound)
    parts = []
    for r in range(trunc.depth_max + 1):
        bound = trunc.degree_bound(r) if r else trunc.weight_max
        acc = None
        for j in range(r + 1):
            term = concat_mul(A.parts[j], B.parts[r - j], bound, yb)
            acc = term if acc is None else acc + term
        parts.append(acc)
    return Bimould(trunc, parts, yb)


def substitute_parts(B: Bimould, subst_for_depth, ybound="same") -> Bimould:
    """Apply a per-depth linear substitution (depth r -> depth r)."""
    yb = B.ybound if ybound == "same" else ybound
    parts = [B.parts[0]]
    for r in range(1, B.depth_max + 1):
        parts.append(poly_substitute(B.parts[r], subst_for_depth(r), B.trunc.degree_bound(r), yb))
    return Bimould(B.trunc, parts, yb)


_SHARPS: dict = {}


def sharp_substitution(r: int) -> LinearSubstitution:
    """X_i -> X_1 + ... + X_{r-i+1}; Y variables untouched."""
    hit = _SHARPS.get(r)
    if hit is None:
        xs = [{("X", j): 1 for j in range(1, r - i + 2)} for i in range(1, r + 1)]
        ys = [{("Y", i): 1} for i in range(1, r + 1)]
        hit = _SHARPS[r] = LinearSubstitution.from_forms(r, r, xs, ys)
    return hit


def sharp(Z: Bimould) -> Bimould:
    return substitute_parts(Z, sharp_substitution)


def depth_one_coefficients(Z: Bimould) -> dict:
    """n -> z(n) read from the Y-free depth-1 part."""
    out = {}
    for e, c in Z.parts[1].terms.items():
        if e[1] == 0:
            out[e[0] + 1] = c
    return out


def _gamma_series(Z: Bimould, sign: int, order: int) -> list:
    z = depth_one_coefficients(Z)
    f = [Fraction(0)] * (order + 1)
    for n in range(2, order + 1):
        c = z.get(n, 0)
        if c:
            f[n] = sign * Fraction((-1) ** n, n) * c
    return series_exp(f, order)


def gamma_mould(Z: Bimould, order=None) -> ConstantMould:
    """Gamma^Z = exp(sum_{n>=2} (-1)^n/n z(n) T^n)."""
    return ConstantMould(_gamma_series(Z, 1, Z.depth_max if order is None else order))


def gamma_tilde(Z: Bimould, order=None) -> ConstantMould:
    """exp(sum_{n>=2} (-1)^(n+1)/n z(n) T^n), the inverse constant mould."""
    return ConstantMould(_gamma_series(Z, -1, Z.depth_max if order is None else order))


def z_gamma(Z: Bimould) -> Bimould:
    """Z_gamma = Z^sharp x Gamma^Z."""
    return mould_product(sharp(Z), gamma_mould(Z).to_bimould(Z.trunc, Z.ybound))


def reconstruct_from_z_gamma(Zg: Bimould, gt: ConstantMould) -> Bimould:
    """Z(X_1..X_r) = sum_j gt_j Z_gamma(X_r, X_{r-1} - X_r, ..., X_{j+1} - X_{j+2})."""
    trunc = Zg.trunc
    parts = [Zg.parts[0]]
    for r in range(1, trunc.depth_max + 1):
        bound = trunc.degree_bound(r)
        acc = PolyXY.constant(gt[r], r, bound, Zg.ybound)
        for j in range(r):
            s = r - j
            xs = [{("X", r): 1}] + [{("X", r - i + 1): 1, ("X", r - i + 2): -1} for i in range(2, s + 1)]
            sub = LinearSubstitution.from_forms(s, r, xs, [{}] * s)
            if gt[j]:
                acc = acc + poly_substitute(Zg.parts[s], sub, bound, Zg.ybound).scale(gt[j])
        parts.append(acc)
    return Bimould(trunc, parts, Zg.ybound)


def lift_X(Z: Bimould) -> Bimould:
    """X^Z: the mould placed on the X variables."""
    if not Z.is_mould():
        raise ValueError("lift_X expects a Y-free mould")
    return Z


def lift_Y(Z: Bimould) -> Bimould:
    """Y^Z: the mould's variables moved to the Y side."""
    if not Z.is_mould():
        raise ValueError("lift_Y expects a Y-free mould")
    trunc = Z.trunc
    parts = [Z.parts[0]]
    for r in range(1, trunc.depth_max + 1):
        terms = {(0,) * r + e[:r]: c for e, c in Z.parts[r].terms.items()}
        parts.append(PolyXY(r, trunc.degree_bound(r), terms, Z.ybound))
    return Bimould(trunc, parts, Z.ybound)


def bz_construct(Z: Bimould) -> Bimould:
    """B^Z = Y^{Z_gamma} x X^Z."""
    return mould_product(lift_Y(z_gamma(Z)), lift_X(Z))


def _check_swappable(B: Bimould):
    if B.ybound is not None and B.ybound < B.trunc.weight_max - 1:
        raise ValueError("swap needs all Y-monomials; this bimould was built with a Y-degree cap")


def swap(B: Bimould) -> Bimould:
    """X_i -> Y_1 + ... + Y_{r-i+1}, Y_i -> X_{r-i+1} - X_{r-i+2} in every depth."""
    _check_swappable(B)
    return substitute_parts(B, swap_substitution)


def negate(B: Bimould) -> Bimould:
    """All variables replaced by their negatives."""
    return substitute_parts(B, negation_substitution)


def signed_swap(B: Bimould) -> Bimould:
    """swap followed by negating every variable."""
    return negate(swap(B))


def negate_x(Z: Bimould) -> Bimould:
    """Z^-(X_1..X_r) = Z(-X_1..-X_r) (Y untouched)."""
    def sub(r):
        return LinearSubstitution(r, r, [{v: -1} for v in range(r)] + [{v: 1} for v in range(r, 2 * r)])

    return substitute_parts(Z, sub)


def negate_y(B: Bimould) -> Bimould:
    def sub(r):
        return LinearSubstitution(r, r, [{v: 1} for v in range(r)] + [{v: -1} for v in range(r, 2 * r)])

    return substitute_parts(B, sub)


def symmetril_pairs(B: Bimould, diamond: DiamondProduct, max_weight=None, max_depth=None):
    """Deterministic list of word pairs (u, v), u <= v, inside the truncation."""
    W = B.trunc.weight_max if max_weight is None else max_weight
    D = B.depth_max if max_depth is None else max_depth
    if diamond.alphabet == Z:
        words = list(z_words(W - 1, D - 1))
        weight = sum
    elif diamond.alphabet == ZBI:
        words = bi_words(W - 1, D - 1, max_ysum=B.ybound)
        def weight(w):
            return sum(k + d for k, d in w)
    else:
        raise ValueError("symmetrility is defined for z- and bi-alphabets")
    pairs = []
    for i, u in enumerate(words):
        for v in words[i:]:
            if weight(u) + weight(v) <= W and len(u) + len(v) <= D:
                pairs.append((u, v))
    return pairs


def check_diamond_symmetril(B: Bimould, diamond: DiamondProduct, max_weight=None, max_depth=None,
                            identity=None) -> RelationReport:
    """phi_B(u * v) = phi_B(u) phi_B(v) for every pair inside the truncation."""
    W = B.trunc.weight_max if max_weight is None else min(max_weight, B.trunc.weight_max)
    D = B.depth_max if max_depth is None else min(max_depth, B.depth_max)
    rep = RelationReport(identity or f"{diamond.name}-symmetril", (W, D, B.trunc.q_order))
    for u, v in symmetril_pairs(B, diamond, W, D):
        lhs = 0
        for w, c in quasi_shuffle(u, v, diamond).items():
            lhs = lhs + B.phi(w) * c
        rhs = B.phi(u) * B.phi(v)
        rep.compare(f"{u} * {v}", lhs, rhs)
        if not rep.passed:
            break
    return rep.finish()


def check_symmetral(Z: Bimould, max_weight=None, max_depth=None, identity=None) -> RelationReport:
    return check_diamond_symmetril(Z, SHUFFLE_Z, max_weight, max_depth, identity or "symmetral")
