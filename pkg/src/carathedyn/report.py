"""Verification records shared by every check and the CLI."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field


@dataclass
class CheckRecord:
    check: str
    fixture: str
    lhs: float
    rhs: float
    tolerance: float
    passed: bool
    params: dict = field(default_factory=dict)
    mode: str = "ratio"

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 1.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    @property
    def deviation(self) -> float:
        if self.mode == "abs":
            return abs(self.lhs - self.rhs)
        if self.mode == "spread":
            return self.ratio - 1.0 if self.rhs > 0 else math.inf
        if self.mode == "bound":
            return self.lhs
        return abs(self.ratio - 1.0)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ratio"] = _clean(self.ratio)
        d["deviation"] = _clean(self.deviation)
        d["lhs"], d["rhs"] = _clean(self.lhs), _clean(self.rhs)
        d["pass"] = d.pop("passed")
        return d


def _clean(x: float):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def ratio_record(check: str, fixture: str, lhs: float, rhs: float, tol: float, **params) -> CheckRecord:
    rec = CheckRecord(check, fixture, float(lhs), float(rhs), tol, False, params)
    rec.passed = rec.deviation <= tol
    return rec


def abs_record(check: str, fixture: str, lhs: float, rhs: float, tol: float, **params) -> CheckRecord:
    rec = CheckRecord(check, fixture, float(lhs), float(rhs), tol, False, params, mode="abs")
    rec.passed = rec.deviation <= tol
    return rec


def bound_record(check: str, fixture: str, value: float, bound: float, **params) -> CheckRecord:
    """Passes when ``value <= bound``."""
    return CheckRecord(check, fixture, float(value), float(bound), 0.0, bool(value <= bound), params, mode="bound")


def spread(values) -> float:
    """Relative spread ``max/min - 1`` of positive values."""
    values = list(values)
    lo, hi = min(values), max(values)
    if lo <= 0:
        return math.inf
    return hi / lo - 1.0


def spread_record(check: str, fixture: str, ratios, tol: float, **params) -> CheckRecord:
    """Passes when positive ``ratios`` agree up to a relative spread of ``tol``."""
    ratios = list(ratios)
    rec = CheckRecord(check, fixture, float(max(ratios)), float(min(ratios)), tol, False,
                      dict(params, count=len(ratios)), mode="spread")
    rec.passed = spread(ratios) <= tol
    return rec
