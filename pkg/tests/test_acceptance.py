"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bruteforce import acceptance_cases, brute_cover_value  # noqa: E402
from carathedyn import harness  # noqa: E402
from carathedyn.caratheodory import LeafProblem, cover_value  # noqa: E402
from carathedyn.config import fixture, load_fixture  # noqa: E402

ALL = ("FULL2", "GOLD", "ROOF2", "BERN13", "SRB3")
LINES: list[str] = []


def _badness(r) -> float:
    if r.mode == "bound":
        return r.lhs / r.rhs
    return r.deviation / r.tolerance if r.tolerance else r.deviation


def _describe(r) -> str:
    if r.mode == "bound":
        return f"{r.check} {r.lhs:.3g} <= {r.rhs:g}"
    return f"{r.check} dev {r.deviation:.2g} (tol {r.tolerance:g})"


def _suite(task: str, names, checks=None):
    """Run one harness suite per fixture; return (passed, worst-line detail)."""
    ok, details = True, []
    for name in names:
        spec = load_fixture(name)
        res = harness.SUITES[task](spec, harness.RunConfig(task, fixture=name))
        recs = [r for r in res.records if checks is None or r.check in checks]
        if not recs:
            ok = False
            details.append(f"{name}: no records")
            continue
        bad = [r for r in recs if not r.passed]
        ok &= not bad
        worst = max(recs, key=_badness)
        details.append(f"{name}:{'ok' if not bad else 'FAIL ' + bad[0].check} {_describe(worst)}")
    return ok, "; ".join(details)


def criterion_1():
    return _suite("pressure", ("FULL2", "SRB3", "GOLD", "ROOF2"))


def criterion_2():
    return _suite("leaf", ALL)


def criterion_3():
    return _suite("conformality", ALL)


def criterion_4():
    return _suite("cocycle", ALL)


def criterion_5():
    return _suite("holonomy", ALL)


def criterion_6():
    return _suite("product", ("FULL2", "BERN13", "SRB3"),
                  {"product_four_formulas", "product_overlap", "product_gibbs", "conditional_density"})


def criterion_7():
    return _suite("two-sided", ALL, {"two_sided_flow_invariance", "gibbs_star", "two_sided_proportionality"})


def criterion_8():
    return _suite("srb", ("SRB3",))


def criterion_9():
    return _suite("pushforward", ("BERN13", "SRB3"))


def criterion_10():
    worst, count, antichains = 0.0, 0, 0
    for name in ("FULL2", "GOLD"):
        for system, x, cons, alpha, T, cap in acceptance_cases(fixture(name)):
            bf, n = brute_cover_value(system, x, cons, alpha, T, cap)
            dp = cover_value(LeafProblem(system, x, -1), cons, alpha, T, cap).value
            worst = max(worst, abs(dp - bf) / bf)
            count += 1
            antichains += n
    return worst <= 1e-12, f"{count} cases, {antichains} antichains, worst rel err {worst:.2g} (tol 1e-12)"


CRITERIA = [(i, globals()[f"criterion_{i}"]) for i in range(1, 11)]
TITLES = {1: "pressure as critical value", 2: "leaf-measure proportionality", 3: "conformality",
          4: "cocycle identities", 5: "holonomy Radon-Nikodym", 6: "product construction",
          7: "two-sided measure", 8: "SRB", 9: "averaged pushforwards", 10: "brute-force equivalence"}


def run_one(i, fn) -> bool:
    t0 = time.perf_counter()
    ok, detail = fn()
    line = f"criterion {i:>2} {TITLES[i]:<30} {'PASS' if ok else 'FAIL'}  ({time.perf_counter() - t0:.1f}s) {detail}"
    LINES.append(line)
    print(line)
    return ok


@pytest.mark.parametrize("i,fn", CRITERIA, ids=[f"criterion_{i}" for i, _ in CRITERIA])
def test_criterion(i, fn):
    assert run_one(i, fn), LINES[-1]


if __name__ == "__main__":
    results = [run_one(i, fn) for i, fn in CRITERIA]
    sys.exit(0 if all(results) else 1)
