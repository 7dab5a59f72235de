"""Residual records for identity checks and their JSON-lines form."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


def _num(v):
    if v is None:
        return None
    c = complex(v)
    if c.imag == 0:
        return c.real
    return {"re": c.real, "im": c.imag}


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    point: dict
    lhs: complex | None
    rhs: complex | None
    abs_residual: float
    rel_residual: float
    tolerance: float
    status: str
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        out = {
            "identity": self.identity,
            "point": self.point,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "tolerance": self.tolerance,
            "status": self.status,
        }
        if self.note:
            out["note"] = self.note
        if self.extra:
            out["extra"] = self.extra
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)


def compare(identity: str, point: dict, lhs, rhs, tol: float, scale: float | None = None, note: str = "", **extra):
    """Build a report; the relative residual divides by ``max(|lhs|, |rhs|, scale)``."""
    diff = abs(complex(lhs) - complex(rhs))
    denom = max(abs(complex(lhs)), abs(complex(rhs)), scale or 0.0)
    rel = diff / denom if denom > 0 else diff
    status = PASS if rel < tol and math.isfinite(rel) else FAIL
    return IdentityReport(identity, point, complex(lhs), complex(rhs), diff, rel, tol, status, note, dict(extra))


def skipped(identity: str, point: dict, reason: str, tol: float = 0.0, **extra) -> IdentityReport:
    return IdentityReport(identity, point, None, None, math.nan, math.nan, tol, SKIPPED, reason, dict(extra))


def summarize(reports) -> dict:
    counts = {PASS: 0, FAIL: 0, SKIPPED: 0}
    for r in reports:
        counts[r.status] += 1
    return counts


def point_descriptor(x) -> dict:
    """JSON-friendly rendering of a matrix or scalar sample point."""
    import numpy as np

    m = np.asarray(x)
    if m.ndim == 0 or m.size == 1:
        return {"x": _num(m.reshape(-1)[0])}
    rows = [[_num(v) for v in row] for row in m]
    return {"x": rows}
