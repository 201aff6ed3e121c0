"""Exact scalars: rationals, Bernoulli numbers, truncated power series and q-series.

Everything here is exact. ``Q`` is :class:`fractions.Fraction`; there is no
floating point anywhere in the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

Q = Fraction

__all__ = [
    "LinForm",
    "Q",
    "QSeries",
    "TruncationParams",
    "bernoulli",
    "binomial",
    "factorial",
    "format_rational",
    "parse_rational",
    "qseries_mul",
    "q_derivative",
    "series_exp",
    "series_log",
    "series_mul",
]


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or ``"n"``."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def format_rational(x) -> str:
    # integers are rendered without denominator, everything else as num/den
    return str(Fraction(x))


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with the convention sum B_n X^n/n! = X/(e^X - 1), so B_1 = -1/2."""
    if n < 0:
        raise ValueError("bernoulli index must be non-negative")
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2 == 1:
        return Fraction(0)
    # sum_{k=0}^{n} C(n+1, k) B_k = 0
    acc = sum((comb(n + 1, k) * bernoulli(k) for k in range(n)), Fraction(0))
    return -acc / (n + 1)


# --- truncated univariate series, stored as coefficient lists [a_0, ..., a_order]

def _pad(f, order):
    # ints become Fractions; other scalars (q-series, linear forms) pass through
    f = [Fraction(c) if isinstance(c, int) else c for c in f[: order + 1]]
    return f + [Fraction(0)] * (order + 1 - len(f))


def series_mul(f, g, order: int) -> list[Fraction]:
    f, g = _pad(f, order), _pad(g, order)
    out = [Fraction(0)] * (order + 1)
    for i, a in enumerate(f):
        if a:
            for j in range(order + 1 - i):
                if g[j]:
                    out[i + j] += a * g[j]
    return out


def series_exp(f, order: int) -> list[Fraction]:
    """exp(f) truncated at T^order; f must have zero constant term."""
    f = _pad(f, order)
    if f[0] != 0:
        raise ValueError("series_exp needs a series with zero constant term")
    # e' = f' e  =>  n e_n = sum_{k=1}^{n} k f_k e_{n-k}
    e = [Fraction(0)] * (order + 1)
    e[0] = Fraction(1)
    for n in range(1, order + 1):
        e[n] = sum((k * f[k] * e[n - k] for k in range(1, n + 1)), Fraction(0)) / n
    return e


def series_log(f, order: int) -> list[Fraction]:
    """log(f) truncated at T^order; f must have constant term 1."""
    f = _pad(f, order)
    if f[0] != 1:
        raise ValueError("series_log needs a series with constant term 1")
    # f l' = f'  =>  n l_n = n f_n - sum_{k=1}^{n-1} k l_k f_{n-k}
    out = [Fraction(0)] * (order + 1)
    for n in range(1, order + 1):
        acc = n * f[n] - sum((k * out[k] * f[n - k] for k in range(1, n)), Fraction(0))
        out[n] = acc / n
    return out


@dataclass(frozen=True)
class TruncationParams:
    """Weight, depth and q-order bounds shared by every truncated object."""

    weight_max: int
    depth_max: int
    q_order: int = 30

    def __post_init__(self):
        if self.depth_max < 1 or self.weight_max < 1:
            raise ValueError("weight_max and depth_max must be >= 1")
        if self.weight_max < self.depth_max:
            raise ValueError("weight_max must be >= depth_max")
        if self.q_order < 0:
            raise ValueError("q_order must be >= 0")

    def degree_bound(self, depth: int) -> int:
        """Monomial degree cap at a given depth: an index of weight w sits in degree w - r."""
        return self.weight_max - depth


class QSeries:
    """Sparse power series in q, known exactly up to and including q^prec.

    Immutable by convention. Binary operations keep the smaller precision;
    plain rationals behave as series of infinite precision.
    """

    __slots__ = ("prec", "coeffs")

    def __init__(self, coeffs=None, prec: int = 0):
        if prec < 0:
            raise ValueError("precision must be >= 0")
        self.prec = prec
        c = {}
        if coeffs:
            items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
            for n, v in items:
                if n <= prec and v:
                    c[n] = Fraction(v)
        self.coeffs = c

    @classmethod
    def _raw(cls, coeffs: dict, prec: int) -> QSeries:
        s = object.__new__(cls)
        s.prec = prec
        s.coeffs = coeffs
        return s

    @classmethod
    def constant(cls, c, prec: int) -> QSeries:
        return cls({0: c}, prec)

    def __getitem__(self, n: int) -> Fraction:
        if n > self.prec:
            raise IndexError(f"q^{n} is beyond the truncation order {self.prec}")
        return self.coeffs.get(n, Fraction(0))

    def to_list(self) -> list[Fraction]:
        return [self.coeffs.get(n, Fraction(0)) for n in range(self.prec + 1)]

    def valuation(self):
        return min(self.coeffs) if self.coeffs else None

    def truncate(self, prec: int) -> QSeries:
        prec = min(prec, self.prec)
        return QSeries._raw({n: v for n, v in self.coeffs.items() if n <= prec}, prec)

    def __bool__(self):
        return bool(self.coeffs)

    def __neg__(self):
        return QSeries._raw({n: -v for n, v in self.coeffs.items()}, self.prec)

    def __add__(self, other):
        if isinstance(other, QSeries):
            prec = min(self.prec, other.prec)
            c = {n: v for n, v in self.coeffs.items() if n <= prec}
            for n, v in other.coeffs.items():
                if n <= prec:
                    s = c.get(n, 0) + v
                    if s:
                        c[n] = s
                    else:
                        c.pop(n, None)
            return QSeries._raw(c, prec)
        if isinstance(other, (int, Fraction)):
            if not other:
                return self
            c = dict(self.coeffs)
            s = c.get(0, 0) + other
            if s:
                c[0] = Fraction(s)
            else:
                c.pop(0, None)
            return QSeries._raw(c, self.prec)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (QSeries, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return qseries_mul(self, other)
        if isinstance(other, (int, Fraction)):
            if not other:
                return QSeries._raw({}, self.prec)
            return QSeries._raw({n: v * other for n, v in self.coeffs.items()}, self.prec)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        return NotImplemented

    def __pow__(self, e: int):
        out = QSeries({0: 1}, self.prec)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        """Equality up to the common truncation order."""
        if isinstance(other, (int, Fraction)):
            other = QSeries({0: other}, self.prec)
        if not isinstance(other, QSeries):
            return NotImplemented
        prec = min(self.prec, other.prec)
        a = {n: v for n, v in self.coeffs.items() if n <= prec}
        b = {n: v for n, v in other.coeffs.items() if n <= prec}
        return a == b

    __hash__ = None

    def first_difference(self, other):
        """Lowest exponent where two series differ, with both values; None if equal."""
        if isinstance(other, (int, Fraction)):
            other = QSeries({0: other}, self.prec)
        prec = min(self.prec, other.prec)
        keys = sorted(n for n in set(self.coeffs) | set(other.coeffs) if n <= prec)
        for n in keys:
            a, b = self.coeffs.get(n, Fraction(0)), other.coeffs.get(n, Fraction(0))
            if a != b:
                return n, a, b
        return None

    def q_derivative(self) -> QSeries:
        return q_derivative(self)

    def __repr__(self):
        if not self.coeffs:
            return f"O(q^{self.prec + 1})"
        terms = []
        for n in sorted(self.coeffs):
            c = self.coeffs[n]
            terms.append(f"{c}" if n == 0 else f"({c})*q^{n}")
        return " + ".join(terms) + f" + O(q^{self.prec + 1})"


def qseries_mul(f: QSeries, g: QSeries) -> QSeries:
    """Cauchy product truncated at the smaller precision."""
    prec = min(f.prec, g.prec)
    out: dict[int, Fraction] = {}
    gitems = sorted(g.coeffs.items())
    for i, a in f.coeffs.items():
        if i > prec:
            continue
        lim = prec - i
        for j, b in gitems:
            if j > lim:
                break
            out[i + j] = out.get(i + j, 0) + a * b
    return QSeries._raw({n: v for n, v in out.items() if v}, prec)


def q_derivative(f: QSeries) -> QSeries:
    """q d/dq, i.e. the coefficient of q^n is multiplied by n."""
    return QSeries._raw({n: n * v for n, v in f.coeffs.items() if n}, f.prec)


class LinForm:
    """Affine form  c + sum_v a_v * v  over rationals, keyed by hashable symbols.

    Used as a polynomial scalar when unknowns (solver variables, formal q-series
    symbols) have to flow through the generic polynomial and mould code. Products
    are only defined when at least one side is constant.
    """

    __slots__ = ("const", "coeffs")

    def __init__(self, coeffs=None, const=0):
        self.const = Fraction(const)
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items() if v}

    @classmethod
    def var(cls, name) -> LinForm:
        return cls({name: 1})

    @classmethod
    def _raw(cls, coeffs, const):
        s = object.__new__(cls)
        s.coeffs = coeffs
        s.const = const
        return s

    def is_constant(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.const) or bool(self.coeffs)

    def __neg__(self):
        return LinForm._raw({k: -v for k, v in self.coeffs.items()}, -self.const)

    def __add__(self, other):
        if isinstance(other, LinForm):
            c = dict(self.coeffs)
            for k, v in other.coeffs.items():
                s = c.get(k, 0) + v
                if s:
                    c[k] = s
                else:
                    c.pop(k, None)
            return LinForm._raw(c, self.const + other.const)
        if isinstance(other, (int, Fraction)):
            return LinForm._raw(dict(self.coeffs), self.const + other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return LinForm._raw({}, Fraction(0))
            return LinForm._raw({k: v * other for k, v in self.coeffs.items()}, self.const * other)
        if isinstance(other, LinForm):
            if other.is_constant():
                return self * other.const
            if self.is_constant():
                return other * self.const
            raise ValueError("product of two non-constant linear forms is not linear")
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Fraction(1) / Fraction(other))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return not self.coeffs and self.const == other
        if isinstance(other, LinForm):
            return self.const == other.const and self.coeffs == other.coeffs
        return NotImplemented

    __hash__ = None

    def evaluate(self, values, default=None):
        """Substitute symbols by scalars (rationals or q-series)."""
        acc = self.const
        for k, v in self.coeffs.items():
            x = values.get(k, default) if default is not None else values[k]
            acc = acc + x * v
        return acc

    def __repr__(self):
        parts = [str(self.const)] if self.const or not self.coeffs else []
        parts += [f"{v}*{k}" for k, v in self.coeffs.items()]
        return "LinForm(" + " + ".join(parts) + ")"
