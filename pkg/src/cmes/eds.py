"""Rational solution of the truncated extended double shuffle equations.

The depth-one part is fixed to beta(k) = -B_k / (2 k!) (zero for odd k). Higher
depths are solved weight by weight: at weight w the unknowns are beta of weight w
and depth 2..min(w, D), and every constraint

* phi(u * v) = phi(u) phi(v)          (stuffle, on the mould itself)
* phi_g(u sh v) = phi_g(u) phi_g(v)   (shuffle, on Z_gamma = Z^sharp x Gamma)

with weight(u) + weight(v) = w and depth(u) + depth(v) <= D is affine-linear in
those unknowns, because the right-hand sides only involve lower weights and
Gamma only needs depth-one data. Unknowns enter the generic mould code as
:class:`LinForm` scalars.

Free variables are set to 0 (or to caller-supplied values) and logged. Basis
order: depth ascending, then lexicographic; pivots are taken as early as
possible in that order, so the free variables are the latest ones.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .exact import LinForm, TruncationParams, bernoulli, format_rational, parse_rational
from .moulds import (
    Bimould,
    check_diamond_symmetril,
    check_symmetral,
    gamma_mould,
    mould_from_coefficients,
    z_gamma,
)
from .poly import LinearSubstitution, PolyXY, divided_difference, poly_substitute
from .report import RelationReport
from .words import SHUFFLE_Z, STUFFLE, compositions, quasi_shuffle, z_words


class InconsistentSystem(RuntimeError):
    pass


def beta_depth1(k: int) -> Fraction:
    if k < 1:
        raise ValueError("beta is defined for k >= 1")
    if k % 2:
        return Fraction(0)
    return -bernoulli(k) / (2 * factorial(k))


@dataclass
class BetaSolution:
    weight_max: int
    depth_max: int
    values: dict
    free_params: list = field(default_factory=list)

    def __call__(self, *idx) -> Fraction:
        if len(idx) == 1 and isinstance(idx[0], (tuple, list)):
            idx = tuple(idx[0])
        if sum(idx) > self.weight_max or len(idx) > self.depth_max:
            raise KeyError(f"beta{idx} is outside the solved range (W={self.weight_max}, D={self.depth_max})")
        return self.values.get(tuple(idx), Fraction(0))

    def free_count(self, w: int) -> int:
        return sum(1 for f in self.free_params if f["weight"] == w)

    def mould(self, trunc: TruncationParams | None = None, ybound=None) -> Bimould:
        if trunc is None:
            trunc = TruncationParams(self.weight_max, self.depth_max)
        if trunc.weight_max > self.weight_max or trunc.depth_max > self.depth_max:
            raise ValueError(f"beta solved to (W={self.weight_max}, D={self.depth_max}) cannot serve {trunc}")
        return mould_from_coefficients(self.values, trunc, ybound)

    def with_value(self, idx, value) -> BetaSolution:
        vals = dict(self.values)
        vals[tuple(idx)] = Fraction(value)
        return BetaSolution(self.weight_max, self.depth_max, vals, list(self.free_params))

    def to_dict(self) -> dict:
        return {
            "weight_max": self.weight_max,
            "depth_max": self.depth_max,
            "free_params": [
                {"weight": f["weight"], "index": list(f["index"]), "value": format_rational(f["value"])}
                for f in self.free_params
            ],
            "values": [
                {"index": list(idx), "value": format_rational(v)}
                for idx, v in sorted(self.values.items(), key=lambda kv: (sum(kv[0]), len(kv[0]), kv[0]))
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> BetaSolution:
        W, D = int(doc["weight_max"]), int(doc["depth_max"])
        vals = {tuple(int(x) for x in e["index"]): parse_rational(str(e["value"])) for e in doc["values"]}
        free = [
            {"weight": int(f["weight"]), "index": tuple(f["index"]), "value": parse_rational(str(f["value"]))}
            for f in doc.get("free_params", [])
        ]
        return cls(W, D, vals, free)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path) -> BetaSolution:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _as_form(x) -> LinForm:
    return x if isinstance(x, LinForm) else LinForm(const=x)


def _solve_affine(rows, unknowns):
    """Reduced row echelon form of sum a_v v + c = 0 with columns in `unknowns` order."""
    order = {u: i for i, u in enumerate(unknowns)}
    pivots: dict = {}
    for row in rows:
        coeffs, const = dict(row.coeffs), row.const
        for col in sorted(coeffs, key=order.__getitem__):
            if col in pivots and col in coeffs:
                a = coeffs[col]
                pc, pk = pivots[col]
                for v, b in pc.items():
                    s = coeffs.get(v, 0) - a * b
                    if s:
                        coeffs[v] = s
                    else:
                        coeffs.pop(v, None)
                const -= a * pk
        if not coeffs:
            if const:
                raise InconsistentSystem(f"constraint reduces to {const} = 0")
            continue
        col = min(coeffs, key=order.__getitem__)
        a = coeffs[col]
        coeffs = {v: b / a for v, b in coeffs.items()}
        const = const / a
        for pcol, (pc, pk) in list(pivots.items()):
            if col in pc:
                f = pc[col]
                new = dict(pc)
                for v, b in coeffs.items():
                    s = new.get(v, 0) - f * b
                    if s:
                        new[v] = s
                    else:
                        new.pop(v, None)
                pivots[pcol] = (new, pk - f * const)
        pivots[col] = (coeffs, const)
    return pivots


def _weight_constraints(table: dict, w: int, D: int):
    """Affine constraints at weight w; also returns the rows' origins for messages."""
    Dw = min(w, D)
    trunc = TruncationParams(w, Dw)
    Z = mould_from_coefficients(table, trunc)
    Zg = z_gamma(Z)
    rows = []
    words = [u for u in z_words(w - 1, Dw - 1)]
    for i, u in enumerate(words):
        for v in words[i:]:
            if sum(u) + sum(v) != w or len(u) + len(v) > Dw:
                continue
            for M, diamond in ((Z, STUFFLE), (Zg, SHUFFLE_Z)):
                lhs = 0
                for x, c in quasi_shuffle(u, v, diamond).items():
                    lhs = lhs + M.phi(x) * c
                rows.append(_as_form(lhs - M.phi(u) * M.phi(v)))
    return rows


def solve_eds(weight_max: int, depth_max: int, free_values=None) -> BetaSolution:
    """Solve weight by weight up to (W, D); see the module docstring."""
    if weight_max < 2 or depth_max < 1:
        raise ValueError("solve_eds needs weight_max >= 2 and depth_max >= 1")
    if depth_max > weight_max:
        depth_max = weight_max
    free_values = {tuple(k): Fraction(v) for k, v in (free_values or {}).items()}
    values = {(k,): beta_depth1(k) for k in range(1, weight_max + 1)}
    free_log = []
    for w in range(2, weight_max + 1):
        unknowns = []
        for r in range(2, min(w, depth_max) + 1):
            unknowns.extend(sorted(compositions(w, r)))
        if not unknowns:
            continue
        table = dict(values)
        for u in unknowns:
            table[u] = LinForm.var(u)
        rows = _weight_constraints(table, w, depth_max)
        pivots = _solve_affine(rows, unknowns)
        assigned = {}
        for u in unknowns:
            if u not in pivots:
                val = free_values.pop(u, Fraction(0))
                assigned[u] = val
                free_log.append({"weight": w, "index": u, "value": val})
        for col, (coeffs, const) in pivots.items():
            val = -const
            for v, a in coeffs.items():
                if v != col:
                    val -= a * assigned[v]
            assigned[col] = val
        values.update(assigned)
    if free_values:
        raise ValueError(f"values supplied for indices that are not free: {sorted(free_values)}")
    return BetaSolution(weight_max, depth_max, values, free_log)


def verify_eds(beta: BetaSolution, weight_max=None, depth_max=None) -> RelationReport:
    """Re-check stuffle symmetrility of beta, shuffle symmetrality of beta_gamma,
    and the depth-two generating-series displays."""
    W = beta.weight_max if weight_max is None else weight_max
    D = min(beta.depth_max if depth_max is None else depth_max, W)
    trunc = TruncationParams(W, D)
    Z = beta.mould(trunc)
    Zg = z_gamma(Z)
    rep = RelationReport("eds", (W, D, None))
    for sub in (check_diamond_symmetril(Z, STUFFLE, identity="stuffle"),
                check_symmetral(Zg, identity="shuffle")):
        rep.checked += sub.checked
        if not sub.passed and sub.status != "skipped-out-of-truncation" and rep.passed:
            rep.status = sub.status
            rep.first_failure = dict(sub.first_failure, identity=sub.identity)
    if D >= 2 and rep.passed:
        _check_depth_two_displays(Z, Zg, rep)
    return rep.finish()


def _depth1_in(p: PolyXY, var: int, target: int, bound: int) -> PolyXY:
    """A depth-1 mould part placed on X_var inside depth `target`."""
    xs = [{("X", var): 1}]
    return poly_substitute(p, LinearSubstitution.from_forms(1, target, xs, [{}]), bound)


def _check_depth_two_displays(Z, Zg, rep):
    bound = Z.trunc.degree_bound(2)
    z1 = Z.parts[1]
    a, b = _depth1_in(z1, 1, 2, bound + 1), _depth1_in(z1, 2, 2, bound + 1)
    swap12 = LinearSubstitution.from_forms(2, 2, [{("X", 2): 1}, {("X", 1): 1}], [{}, {}])
    z2 = Z.parts[2]
    # stuffle display: Z(X1)Z(X2) = Z(X1,X2) + Z(X2,X1) + (Z(X1) - Z(X2))/(X1 - X2)
    lhs = (a * b).truncate(bound)
    rhs = z2 + poly_substitute(z2, swap12, bound) + divided_difference(a, 1, 2).truncate(bound)
    _compare_poly(rep, "Z(X1)Z(X2)", lhs, rhs)
    # shuffle display; the constant is 2 gamma_2 since each of Zg(X1,X2), Zg(X2,X1) carries one gamma_2
    g1 = Zg.parts[1]
    ga, gb = _depth1_in(g1, 1, 2, bound), _depth1_in(g1, 2, 2, bound)
    lhs = (ga * gb).truncate(bound)
    mid = Zg.parts[2] + poly_substitute(Zg.parts[2], swap12, bound)
    s1 = LinearSubstitution.from_forms(2, 2, [{("X", 1): 1, ("X", 2): 1}, {("X", 1): 1}], [{}, {}])
    s2 = LinearSubstitution.from_forms(2, 2, [{("X", 1): 1, ("X", 2): 1}, {("X", 2): 1}], [{}, {}])
    gamma2 = gamma_mould(Z)[2]
    right = poly_substitute(z2, s1, bound) + poly_substitute(z2, s2, bound) + PolyXY.constant(2 * gamma2, 2, bound)
    _compare_poly(rep, "Zg(X1)Zg(X2) vs Zg(X1,X2)+Zg(X2,X1)", lhs, mid)
    _compare_poly(rep, "Zg(X1)Zg(X2) vs sharp form", lhs, right)


def _compare_poly(rep, name, p, q):
    rep.checked += 1
    diff = p.first_difference(q)
    if diff is not None:
        e, x, y = diff
        rep.fail(f"{name} at monomial {e}", x, y)
