"""Words over the three alphabets, diamond products and quasi-shuffles.

Letters are plain Python values so words can be hashed and used as table keys:

* ``Z``   letters are ints ``k >= 1`` (the letter z_k),
* ``ZBI`` letters are pairs ``(k, d)`` with ``k >= 1, d >= 0`` (z^k_d),
* ``XY``  letters are the strings ``"x"`` and ``"y"``.

A word is a tuple of letters; the empty tuple is the unit word.
Linear combinations are dicts ``word -> Fraction`` without zero entries.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .exact import bernoulli, binomial, factorial

Z, ZBI, XY = "Z", "ZBI", "XY"

Word = tuple


def letter_alphabet(a) -> str:
    if isinstance(a, bool):
        raise ValueError(f"not a letter: {a!r}")
    if isinstance(a, int):
        if a < 1:
            raise ValueError(f"z-letter weight must be >= 1, got {a}")
        return Z
    if isinstance(a, tuple) and len(a) == 2:
        k, d = a
        if k < 1 or d < 0:
            raise ValueError(f"bi-letter needs k >= 1, d >= 0, got {a}")
        return ZBI
    if a in ("x", "y"):
        return XY
    raise ValueError(f"not a letter: {a!r}")


def alphabet_of(w: Word):
    """Alphabet tag of a word, or None for the empty word."""
    if not w:
        return None
    tags = {letter_alphabet(a) for a in w}
    if len(tags) != 1:
        raise ValueError(f"word mixes alphabets: {w!r}")
    return tags.pop()


def letter_weight(a) -> int:
    if isinstance(a, int):
        return a
    if isinstance(a, tuple):
        return a[0] + a[1]
    return 1


def weight(w: Word) -> int:
    return sum(letter_weight(a) for a in w)


def depth(w: Word) -> int:
    return len(w)


# --- text syntax: "z3 z2", "z3_1 z2_0", "xxy"; the unit word is "1"

def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return ()
    if set(text) <= {"x", "y"}:
        return tuple(text)
    out = []
    for tok in text.split():
        if not tok.startswith("z"):
            raise ValueError(f"bad letter token {tok!r}")
        body = tok[1:]
        if "_" in body:
            k, d = body.split("_")
            out.append((int(k), int(d)))
        else:
            out.append(int(body))
    w = tuple(out)
    alphabet_of(w)
    return w


def format_word(w: Word) -> str:
    if not w:
        return "1"
    tag = alphabet_of(w)
    if tag == XY:
        return "".join(w)
    if tag == Z:
        return " ".join(f"z{k}" for k in w)
    return " ".join(f"z{k}_{d}" for k, d in w)


# --- linear combinations

def lc_add(acc: dict, w: Word, c) -> None:
    """acc[w] += c, dropping zeros."""
    if not c:
        return
    s = acc.get(w, 0) + c
    if s:
        acc[w] = s
    else:
        del acc[w]


def lc_scale(lc: dict, c) -> dict:
    if not c:
        return {}
    return {w: v * c for w, v in lc.items()}


def lc_sum(*lcs) -> dict:
    out: dict = {}
    for lc in lcs:
        for w, v in lc.items():
            lc_add(out, w, v)
    return out


def lc_concat_left(a, lc: dict) -> dict:
    return {(a,) + w: v for w, v in lc.items()}


# --- diamond products

@dataclass(frozen=True, eq=False)
class DiamondProduct:
    """A commutative, associative product on letters.

    ``rule(a, b)`` returns a list of ``(letter, coefficient)`` pairs; an empty
    list is the zero product (shuffle).
    """

    name: str
    alphabet: str
    rule: Callable
    _memo: dict = field(default_factory=dict, repr=False)

    def __call__(self, a, b):
        return self.rule(a, b)


def _zero(a, b):
    return []


def _z_stuffle(a, b):
    return [(a + b, Fraction(1))]


def _bi_stuffle(a, b):
    return [((a[0] + b[0], a[1] + b[1]), Fraction(1))]


def hat_lambda(k1: int, k2: int, j: int) -> Fraction:
    """Coefficient lambda^{k1,k2}_j of the product that makes g homomorphic."""
    n = k1 + k2 - j
    s = (-1) ** k1 * binomial(k1 + k2 - 1 - j, k2 - j) + (-1) ** k2 * binomial(k1 + k2 - 1 - j, k1 - j)
    return -s * bernoulli(n) / factorial(n)


def _hat(a, b):
    (k1, d1), (k2, d2) = a, b
    out = [((k1 + k2, d1 + d2), Fraction(1))]
    for j in range(1, k1 + k2):
        lam = hat_lambda(k1, k2, j)
        if lam:
            out.append(((j, d1 + d2), lam))
    return out


SHUFFLE_Z = DiamondProduct("shuffle-z", Z, _zero)
SHUFFLE_BI = DiamondProduct("shuffle-bi", ZBI, _zero)
SHUFFLE_XY = DiamondProduct("shuffle-xy", XY, _zero)
STUFFLE = DiamondProduct("stuffle", Z, _z_stuffle)
BI_STUFFLE = DiamondProduct("bi-stuffle", ZBI, _bi_stuffle)
HAT_DIAMOND = DiamondProduct("hat-diamond", ZBI, _hat)

DIAMONDS = {d.name: d for d in (SHUFFLE_Z, SHUFFLE_BI, SHUFFLE_XY, STUFFLE, BI_STUFFLE, HAT_DIAMOND)}


def _check(u, v, diamond):
    for w in (u, v):
        tag = alphabet_of(w)
        if tag is not None and tag != diamond.alphabet:
            raise ValueError(f"word {w!r} is not over the {diamond.alphabet} alphabet of {diamond.name}")


def _qsh(u: Word, v: Word, diamond: DiamondProduct) -> dict:
    if not u:
        return {v: Fraction(1)}
    if not v:
        return {u: Fraction(1)}
    key = (u, v)
    memo = diamond._memo
    hit = memo.get(key)
    if hit is not None:
        return hit
    a, w = u[0], u[1:]
    b, t = v[0], v[1:]
    out: dict = {}
    for x, c in _qsh(w, v, diamond).items():
        lc_add(out, (a,) + x, c)
    for x, c in _qsh(u, t, diamond).items():
        lc_add(out, (b,) + x, c)
    rest = None
    for letter, lam in diamond(a, b):
        if rest is None:
            rest = _qsh(w, t, diamond)
        for x, c in rest.items():
            lc_add(out, (letter,) + x, lam * c)
    memo[key] = out
    return out


def quasi_shuffle(u: Word, v: Word, diamond: DiamondProduct) -> dict:
    """u *_diamond v as a dict word -> coefficient (memoized per diamond)."""
    _check(u, v, diamond)
    return dict(_qsh(tuple(u), tuple(v), diamond))


def quasi_shuffle_lc(x: dict, y: dict, diamond: DiamondProduct) -> dict:
    out: dict = {}
    for u, a in x.items():
        for v, b in y.items():
            for w, c in quasi_shuffle(u, v, diamond).items():
                lc_add(out, w, a * b * c)
    return out


def _shuffle_diamond(u, v):
    tag = alphabet_of(u) or alphabet_of(v)
    if tag == Z:
        return SHUFFLE_Z
    if tag == ZBI:
        return SHUFFLE_BI
    return SHUFFLE_XY


def shuffle(u: Word, v: Word) -> dict:
    return quasi_shuffle(u, v, _shuffle_diamond(u, v))


def deconcat_coproduct(w: Word) -> list:
    """All splittings w = uv in order of the length of u."""
    w = tuple(w)
    return [(w[:i], w[i:]) for i in range(len(w) + 1)]


def antipode_sum(w: Word) -> dict:
    """sum_i (-1)^i (a_i ... a_1) sh (a_{i+1} ... a_r); identically zero."""
    w = tuple(w)
    if not w:
        raise ValueError("antipode_sum needs a non-empty word")
    out: dict = {}
    for i in range(len(w) + 1):
        left = tuple(reversed(w[:i]))
        for x, c in shuffle(left, w[i:]).items():
            lc_add(out, x, (-1) ** i * c)
    return out


def z_to_xy(w: Word) -> Word:
    out = []
    for k in w:
        if letter_alphabet(k) != Z:
            raise ValueError("z_to_xy needs a z-word")
        out.extend("x" * (k - 1))
        out.append("y")
    return tuple(out)


def xy_to_z(w: Word) -> Word:
    if w and w[-1] != "y":
        raise ValueError("only words ending in y (or the unit) come from z-words")
    out, run = [], 0
    for a in w:
        if a == "x":
            run += 1
        elif a == "y":
            out.append(run + 1)
            run = 0
        else:
            raise ValueError(f"not an xy-letter: {a!r}")
    return tuple(out)


def lc_z_to_xy(lc: dict) -> dict:
    return {z_to_xy(w): c for w, c in lc.items()}


def lc_xy_to_z(lc: dict) -> dict:
    return {xy_to_z(w): c for w, c in lc.items()}


# --- enumeration

def compositions(n: int, parts: int):
    """Ordered tuples of `parts` positive ints summing to n."""
    if parts == 0:
        if n == 0:
            yield ()
        return
    for cut in itertools.combinations(range(1, n), parts - 1):
        bounds = (0,) + cut + (n,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def z_words(max_weight: int, max_depth: int, min_depth: int = 1):
    """z-words ordered by weight, then depth, then lexicographically."""
    for w in range(1, max_weight + 1):
        for r in range(max(min_depth, 1), min(w, max_depth) + 1):
            yield from compositions(w, r)


def bi_words(max_weight: int, max_depth: int, max_ysum=None, min_depth: int = 1):
    """Bi-words ordered by weight, then depth, then lexicographically.

    ``max_ysum`` caps d_1 + ... + d_r (None means no cap beyond the weight).
    """
    out = []
    for r in range(max(min_depth, 1), max_depth + 1):
        for total in range(r, max_weight + 1):
            for dsum in range(0, total - r + 1):
                if max_ysum is not None and dsum > max_ysum:
                    continue
                ksum = total - dsum
                for ks in compositions(ksum, r):
                    for ds in _weak_compositions(dsum, r):
                        out.append(tuple(zip(ks, ds)))
    out.sort(key=lambda w: (weight(w), len(w), w))
    return out


def _weak_compositions(n: int, parts: int):
    for c in compositions(n + parts, parts):
        yield tuple(x - 1 for x in c)
