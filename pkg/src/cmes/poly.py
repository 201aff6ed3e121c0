"""Sparse truncated polynomials in X_1..X_r, Y_1..Y_r.

A term is keyed by the exponent tuple ``(a_1, ..., a_r, b_1, ..., b_r)``, so
X_i is variable index ``i - 1`` and Y_i is index ``r + i - 1``. Scalars can be
anything supporting ``+``, ``*`` and truthiness: rationals, :class:`QSeries`,
:class:`LinForm`.

Truncation: ``bound`` caps the total degree sum(a) + sum(b) and the optional
``ybound`` caps sum(b). A bi-index (k; d) of weight w and depth r sits in the
monomial X^(k-1) Y^d of degree w - r, so a weight cap W becomes the degree
bound W - r at depth r. Callers do that conversion (see
``TruncationParams.degree_bound``).
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial, prod
from typing import NamedTuple


class BiIndex(NamedTuple):
    k: tuple
    d: tuple

    @property
    def depth(self) -> int:
        return len(self.k)

    @property
    def weight(self) -> int:
        return sum(self.k) + sum(self.d)

    @classmethod
    def of(cls, k, d=None) -> BiIndex:
        k = tuple(k)
        d = tuple(d) if d is not None else (0,) * len(k)
        if len(k) != len(d):
            raise ValueError("k and d must have the same length")
        if any(x < 1 for x in k) or any(x < 0 for x in d):
            raise ValueError(f"invalid bi-index {k};{d}")
        return cls(k, d)

    @classmethod
    def from_word(cls, w) -> BiIndex:
        """From a z-word (ints) or a bi-word ((k, d) pairs)."""
        if w and isinstance(w[0], tuple):
            return cls(tuple(a for a, _ in w), tuple(b for _, b in w))
        return cls(tuple(w), (0,) * len(w))

    def word(self) -> tuple:
        return tuple(zip(self.k, self.d))

    def exponent(self) -> tuple:
        return tuple(x - 1 for x in self.k) + self.d

    def __str__(self):
        ks = ",".join(map(str, self.k))
        if any(self.d):
            return f"({ks};{','.join(map(str, self.d))})"
        return f"({ks})"


def xvar(i: int, r: int) -> int:
    """Variable index of X_i (1-based) at depth r."""
    return i - 1


def yvar(i: int, r: int) -> int:
    return r + i - 1


def _ydeg(e, r):
    return sum(e[r:])


def _min_opt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class PolyXY:
    """Truncated polynomial of a fixed depth. Treat instances as immutable."""

    __slots__ = ("depth", "bound", "ybound", "terms")

    def __init__(self, depth: int, bound: int, terms=None, ybound=None):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.depth = depth
        self.bound = bound
        self.ybound = ybound
        t = {}
        if terms:
            n = 2 * depth
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match depth {depth}")
                if c and self._fits(e):
                    t[e] = c
        self.terms = t

    def _fits(self, e) -> bool:
        if sum(e) > self.bound:
            return False
        return self.ybound is None or _ydeg(e, self.depth) <= self.ybound

    @classmethod
    def _raw(cls, depth, bound, terms, ybound=None) -> PolyXY:
        p = object.__new__(cls)
        p.depth, p.bound, p.terms, p.ybound = depth, bound, terms, ybound
        return p

    @classmethod
    def constant(cls, c, depth: int, bound: int, ybound=None) -> PolyXY:
        return cls(depth, bound, {(0,) * (2 * depth): c}, ybound)

    @classmethod
    def zero(cls, depth: int, bound: int, ybound=None) -> PolyXY:
        return cls._raw(depth, bound, {}, ybound)

    @classmethod
    def var(cls, name: str, i: int, depth: int, bound: int, ybound=None) -> PolyXY:
        e = [0] * (2 * depth)
        e[xvar(i, depth) if name == "X" else yvar(i, depth)] = 1
        return cls(depth, bound, {tuple(e): Fraction(1)}, ybound)

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, e):
        return self.terms.get(tuple(e), 0)

    def constant_term(self):
        return self.terms.get((0,) * (2 * self.depth), 0)

    def has_y(self) -> bool:
        return any(_ydeg(e, self.depth) for e in self.terms)

    def truncate(self, bound=None, ybound=None) -> PolyXY:
        bound = self.bound if bound is None else min(bound, self.bound)
        ybound = _min_opt(self.ybound, ybound)
        p = PolyXY._raw(self.depth, bound, {}, ybound)
        p.terms = {e: c for e, c in self.terms.items() if p._fits(e)}
        return p

    def map_scalars(self, f) -> PolyXY:
        t = {}
        for e, c in self.terms.items():
            v = f(c)
            if v:
                t[e] = v
        return PolyXY._raw(self.depth, self.bound, t, self.ybound)

    def _same_space(self, other):
        if not isinstance(other, PolyXY) or other.depth != self.depth:
            raise ValueError("polynomials live in different variable sets")

    def __add__(self, other: PolyXY) -> PolyXY:
        self._same_space(other)
        out = PolyXY._raw(self.depth, min(self.bound, other.bound), {}, _min_opt(self.ybound, other.ybound))
        t = {e: c for e, c in self.terms.items() if out._fits(e)}
        for e, c in other.terms.items():
            if out._fits(e):
                s = t.get(e, 0) + c
                if s:
                    t[e] = s
                else:
                    t.pop(e, None)
        out.terms = t
        return out

    def __neg__(self):
        return PolyXY._raw(self.depth, self.bound, {e: -c for e, c in self.terms.items()}, self.ybound)

    def __sub__(self, other: PolyXY) -> PolyXY:
        return self + (-other)

    def scale(self, c) -> PolyXY:
        if not c:
            return PolyXY._raw(self.depth, self.bound, {}, self.ybound)
        t = {}
        for e, v in self.terms.items():
            w = v * c
            if w:
                t[e] = w
        return PolyXY._raw(self.depth, self.bound, t, self.ybound)

    def __mul__(self, other):
        if isinstance(other, PolyXY):
            return poly_mul(self, other)
        return self.scale(other)

    def __eq__(self, other):
        """Equality of the terms both operands are known for."""
        if not isinstance(other, PolyXY):
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def first_difference(self, other: PolyXY):
        """Lowest differing monomial (graded order) with both coefficients, else None."""
        self._same_space(other)
        bound = min(self.bound, other.bound)
        yb = _min_opt(self.ybound, other.ybound)
        keys = set(self.terms) | set(other.terms)
        for e in sorted(keys, key=lambda e: (sum(e), e)):
            if sum(e) > bound or (yb is not None and _ydeg(e, self.depth) > yb):
                continue
            a, b = self.terms.get(e, 0), other.terms.get(e, 0)
            if not _scalar_eq(a, b):
                return e, a, b
        return None

    def __repr__(self):
        return f"PolyXY(depth={self.depth}, bound={self.bound}, ybound={self.ybound}, terms={len(self.terms)})"


def _scalar_eq(a, b) -> bool:
    d = a - b
    return not d


def _add_into(acc: dict, e, c):
    s = acc.get(e)
    s = c if s is None else s + c
    if s:
        acc[e] = s
    else:
        acc.pop(e, None)


def poly_mul(p: PolyXY, q: PolyXY) -> PolyXY:
    """Product in the same variables, truncated at the smaller bounds."""
    p._same_space(q)
    r = p.depth
    out = PolyXY._raw(r, min(p.bound, q.bound), {}, _min_opt(p.ybound, q.ybound))
    acc: dict = {}
    for e1, c1 in p.terms.items():
        for e2, c2 in q.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if out._fits(e):
                _add_into(acc, e, c1 * c2)
    out.terms = acc
    return out


def concat_mul(p: PolyXY, q: PolyXY, bound: int, ybound=None) -> PolyXY:
    """p(X_1..X_a; Y_1..Y_a) * q(X_{a+1}..X_{a+b}; Y_{a+1}..Y_{a+b})."""
    a, b = p.depth, q.depth
    r = a + b
    ybound = _min_opt(ybound, _min_opt(p.ybound, q.ybound))
    acc: dict = {}
    qitems = [(e, c, sum(e), sum(e[b:])) for e, c in q.terms.items()]
    for e1, c1 in p.terms.items():
        d1 = sum(e1)
        if d1 > bound:
            continue
        y1 = sum(e1[a:])
        room = bound - d1
        for e2, c2, d2, y2 in qitems:
            if d2 > room or (ybound is not None and y1 + y2 > ybound):
                continue
            e = e1[:a] + e2[:b] + e1[a:] + e2[b:]
            _add_into(acc, e, c1 * c2)
    return PolyXY._raw(r, bound, acc, ybound)


class LinearSubstitution:
    """Each source variable goes to a rational linear form in the target variables.

    ``images[v]`` is a dict target-index -> coefficient for source index v.
    Monomial images are cached, so reuse one instance for many polynomials.
    """

    def __init__(self, source_depth: int, target_depth: int, images):
        images = tuple(dict(im) for im in images)
        if len(images) != 2 * source_depth:
            raise ValueError("substitution must cover every source variable")
        for im in images:
            for t in im:
                if not 0 <= t < 2 * target_depth:
                    raise ValueError(f"target index {t} outside depth {target_depth}")
        self.source_depth = source_depth
        self.target_depth = target_depth
        self.images = images
        self._powers: dict = {}
        self._monos: dict = {}

    @classmethod
    def from_forms(cls, source_depth: int, target_depth: int, xforms, yforms):
        """Build from lists of forms written as {("X", i): c, ("Y", j): c}."""
        def idx(key):
            name, i = key
            return xvar(i, target_depth) if name == "X" else yvar(i, target_depth)

        imgs = [{idx(k): Fraction(c) for k, c in f.items() if c} for f in list(xforms) + list(yforms)]
        return cls(source_depth, target_depth, imgs)

    def _power(self, v: int, n: int, ybound):
        key = (v, n, ybound)
        hit = self._powers.get(key)
        if hit is not None:
            return hit
        rt = self.target_depth
        if n == 0:
            res = {(0,) * (2 * rt): Fraction(1)}
        else:
            prev = self._power(v, n - 1, ybound)
            res = {}
            for e, c in prev.items():
                for t, a in self.images[v].items():
                    f = list(e)
                    f[t] += 1
                    f = tuple(f)
                    if ybound is not None and _ydeg(f, rt) > ybound:
                        continue
                    _add_into(res, f, c * a)
        self._powers[key] = res
        return res

    def monomial_image(self, e, ybound=None) -> dict:
        key = (e, ybound)
        hit = self._monos.get(key)
        if hit is not None:
            return hit
        rt = self.target_depth
        res = {(0,) * (2 * rt): Fraction(1)}
        for v, n in enumerate(e):
            if not n:
                continue
            pw = self._power(v, n, ybound)
            nxt: dict = {}
            for e1, c1 in res.items():
                for e2, c2 in pw.items():
                    f = tuple(x + y for x, y in zip(e1, e2))
                    if ybound is not None and _ydeg(f, rt) > ybound:
                        continue
                    _add_into(nxt, f, c1 * c2)
            res = nxt
        self._monos[key] = res
        return res


def poly_substitute(p: PolyXY, s: LinearSubstitution, bound=None, ybound=None) -> PolyXY:
    """p with every variable replaced by its linear image, truncated at `bound`."""
    if p.depth != s.source_depth:
        raise ValueError(f"substitution expects depth {s.source_depth}, got {p.depth}")
    bound = p.bound if bound is None else bound
    acc: dict = {}
    for e, c in p.terms.items():
        if sum(e) > bound:
            continue
        for f, k in s.monomial_image(e, ybound).items():
            _add_into(acc, f, c * k)
    return PolyXY._raw(s.target_depth, bound, acc, ybound)


def identity_substitution(r: int) -> LinearSubstitution:
    return LinearSubstitution(r, r, [{v: 1} for v in range(2 * r)])


_SWAPS: dict = {}


def swap_substitution(r: int) -> LinearSubstitution:
    """X_i -> Y_1 + ... + Y_{r-i+1},  Y_i -> X_{r-i+1} - X_{r-i+2} (X_{r+1} = 0)."""
    hit = _SWAPS.get(r)
    if hit is None:
        xs = [{("Y", j): 1 for j in range(1, r - i + 2)} for i in range(1, r + 1)]
        ys = []
        for i in range(1, r + 1):
            f = {("X", r - i + 1): 1}
            if i > 1:
                f[("X", r - i + 2)] = -1
            ys.append(f)
        hit = _SWAPS[r] = LinearSubstitution.from_forms(r, r, xs, ys)
    return hit


_NEGS: dict = {}


def negation_substitution(r: int) -> LinearSubstitution:
    hit = _NEGS.get(r)
    if hit is None:
        hit = _NEGS[r] = LinearSubstitution(r, r, [{v: -1} for v in range(2 * r)])
    return hit


def extract_bi_coefficients(p: PolyXY) -> dict:
    """Map BiIndex -> coefficient in the basis X^(k-1) Y^d / d!."""
    r = p.depth
    out = {}
    for e, c in p.terms.items():
        k = tuple(a + 1 for a in e[:r])
        d = tuple(e[r:])
        f = prod(factorial(x) for x in d)
        out[BiIndex(k, d)] = c * f if f != 1 else c
    return out


def from_bi_coefficients(table, depth: int, bound: int, ybound=None) -> PolyXY:
    """Inverse of :func:`extract_bi_coefficients`."""
    terms = {}
    for idx, c in table.items():
        idx = BiIndex(tuple(idx[0]), tuple(idx[1]))
        if idx.depth != depth:
            raise ValueError(f"index {idx} does not have depth {depth}")
        f = prod(factorial(x) for x in idx.d)
        terms[idx.exponent()] = c / f if f != 1 else c
    return PolyXY(depth, bound, terms, ybound)


def divided_difference(p: PolyXY, i: int, j: int) -> PolyXY:
    """(p - p|_{X_i -> X_j}) / (X_i - X_j) for p not involving X_j.

    Each X_i^a becomes the complete homogeneous sum of X_i^s X_j^t, s + t = a - 1,
    so no polynomial division is needed.
    """
    r = p.depth
    vi, vj = xvar(i, r), xvar(j, r)
    acc: dict = {}
    for e, c in p.terms.items():
        if e[vj]:
            raise ValueError("divided_difference needs p free of X_j")
        a = e[vi]
        for s in range(a):
            f = list(e)
            f[vi] = s
            f[vj] = a - 1 - s
            _add_into(acc, tuple(f), c)
    # the degree drops by one, so the result is only known one degree lower
    return PolyXY._raw(r, p.bound - 1, acc, p.ybound)
