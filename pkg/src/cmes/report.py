"""Machine-readable outcome of an identity check."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exact import QSeries

PASS, FAIL, SKIPPED = "pass", "fail", "skipped-out-of-truncation"


def render_scalar(x):
    if isinstance(x, QSeries):
        return {"prec": x.prec, "coeffs": {str(n): str(v) for n, v in sorted(x.coeffs.items())}}
    return str(x)


@dataclass
class RelationReport:
    identity: str
    trunc: tuple
    status: str = PASS
    checked: int = 0
    first_failure: dict | None = None
    detail: str = ""
    skipped: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def fail(self, where, lhs, rhs, q_exponent=None, note=""):
        """Record a failure; only the first one is kept."""
        if self.first_failure is None:
            self.status = FAIL
            self.first_failure = {
                "index": str(where),
                "q_exponent": q_exponent,
                "lhs": render_scalar(lhs),
                "rhs": render_scalar(rhs),
            }
            if note:
                self.first_failure["note"] = note

    def compare(self, where, lhs, rhs) -> bool:
        """Count one exact comparison and record it when the sides differ."""
        self.checked += 1
        if isinstance(lhs, QSeries) or isinstance(rhs, QSeries):
            a = lhs if isinstance(lhs, QSeries) else QSeries({0: lhs}, rhs.prec)
            diff = a.first_difference(rhs)
            if diff is not None:
                n, x, y = diff
                self.fail(where, x, y, q_exponent=n)
                return False
            return True
        if lhs - rhs:
            self.fail(where, lhs, rhs)
            return False
        return True

    def skip(self, why: str):
        self.skipped.append(why)

    def finish(self) -> RelationReport:
        """Nothing was checkable -> skipped rather than a vacuous pass."""
        if self.status == PASS and self.checked == 0:
            self.status = SKIPPED
        return self

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "trunc": list(self.trunc),
            "status": self.status,
            "checked": self.checked,
            "first_failure": self.first_failure,
            "detail": self.detail,
            "skipped": self.skipped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
