"""Verification suites, run configuration and report emission."""
from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import holonomy as hol
from .caratheodory import CoverError, LeafProblem, cover_value, critical_value, reference_points
from .config import FIXTURE_NAMES, ConfigError, SystemSpec, load_fixture, load_system_file
from .oracle import (flow_equilibrium, flow_pressure, gibbs_cylinder, leaf_eigenmeasure,
                     reversed_flow_equilibrium, stable_leaf_eigenmeasure)
from .product import (ConsistencyError, GlobalProductMeasure, LeafMeasures, ProductMeasure, conditional_density,
                      flow_invariance_product, make_rectangle, patch_global, product_gibbs_ratio,
                      srb_product_global)
from .pushforward import (LeafPushforward, cesaro_check, convergence_table, cylinder_algebra, mass_conservation,
                          nonincreasing)
from .report import CheckRecord, abs_record, bound_record, ratio_record, spread_record
from .system import CylinderSet, SuspensionSystem, completions, reflect
from .twosided import MeasureM, default_cap, flow_invariance_check, gibbs_star_check, srb_main_check

TASKS = ("pressure", "leaf", "conformality", "cocycle", "holonomy", "product", "two-sided", "srb", "pushforward")


@dataclass
class RunConfig:
    task: str
    fixture: str | None = None
    system_file: str | None = None
    cutoffs: list[float] | None = None
    depth_cap: int | None = None
    alpha_tol: float = 1e-7
    seed: int = 0
    out: str | None = None
    tolerances: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {"task": self.task, "fixture": self.fixture, "system_file": self.system_file,
                "cutoffs": self.cutoffs, "depth_cap": self.depth_cap, "alpha_tol": self.alpha_tol,
                "seed": self.seed, "tolerances": dict(sorted(self.tolerances.items()))}


@dataclass
class SuiteResult:
    records: list[CheckRecord]
    tables: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


@dataclass
class Report:
    fixture: str
    config: dict
    suites: dict
    timing: dict

    @property
    def records(self) -> list[CheckRecord]:
        return [r for s in self.suites.values() for r in s.records]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def as_json(self) -> str:
        doc = {
            "fixture": self.fixture,
            "config": self.config,
            "pass": self.passed,
            "suites": {name: {"pass": all(r.passed for r in s.records),
                              "records": [r.as_dict() for r in s.records],
                              "notes": s.notes}
                       for name, s in self.suites.items()},
        }
        return json.dumps(doc, indent=2, sort_keys=True, default=_jsonable)

    def summary(self) -> str:
        lines = [f"fixture {self.fixture}: {'PASS' if self.passed else 'FAIL'}"]
        for name, s in self.suites.items():
            ok = all(r.passed for r in s.records)
            lines.append(f"  {name:<13} {'pass' if ok else 'FAIL'}  ({len(s.records)} checks, "
                         f"{self.timing.get(name, 0.0):.2f}s)")
            for r in s.records:
                lines.append(f"    [{'ok' if r.passed else 'XX'}] {r.check:<28} dev={r.deviation:.3g} "
                             f"tol={r.tolerance:g} lhs={r.lhs:.6g} rhs={r.rhs:.6g}")
            lines.extend(f"    note: {n}" for n in s.notes)
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, tuple):
        return list(x)
    return str(x)


# -- helpers -----------------------------------------------------------------

def _tol(cfg: RunConfig, name: str, default: float) -> float:
    return float(cfg.tolerances.get(name, default))


def _rng(cfg: RunConfig, suite: str) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, TASKS.index(suite)])


def _cutoff(cfg: RunConfig, default: float) -> float:
    return float(max(cfg.cutoffs)) if cfg.cutoffs else default


def _leaf_cap(cfg: RunConfig) -> int:
    return cfg.depth_cap if cfg.depth_cap is not None else 40


def _random_forward_word(system: SuspensionSystem, first: int, depth: int, rng) -> tuple:
    w = [first]
    for _ in range(depth):
        w.append(int(rng.choice(system.sft.successors(w[-1]))))
    return tuple(w[1:])


def _worst(records: list[CheckRecord], check: str, fixture: str, tol: float, mode: str = "ratio", **params):
    """Collapse many records into the one with the largest deviation."""
    worst = max(records, key=lambda r: r.deviation)
    out = CheckRecord(check, fixture, worst.lhs, worst.rhs, tol, all(r.passed for r in records),
                      dict(worst.params, count=len(records), **params), mode=worst.mode)
    return out


def _exact_window(system: SuspensionSystem) -> bool:
    return system.potential.lo == system.potential.hi == 0 and system.roof.lo == system.roof.hi == 0


# -- suites ------------------------------------------------------------------

def suite_pressure(spec: SystemSpec, cfg: RunConfig) -> SuiteResult:
    system, name = spec.system, spec.name
    T = cfg.cutoffs or [18.0]
    cap = _leaf_cap(cfg)
    est = critical_value(system, T, cap, cfg.alpha_tol)
    P = flow_pressure(system)
    default = 1e-3 if name in ("FULL2", "SRB3") else 1e-2
    rec = abs_record("pressure", name, est.alpha_star, P, _tol(cfg, "pressure", default),
                     cutoffs=list(T), depth_cap=cap, flagged=est.flagged)
    rows = [{"cutoff_T": t, "critical_value": a, "cover_value_at_critical": v}
            for t, a, v in est.per_cutoff_values]
    return SuiteResult([rec], {"pressure": rows}, [f"P_est={est.alpha_star:.9f} oracle={P:.9f}"])


def suite_leaf(spec: SystemSpec, cfg: RunConfig) -> SuiteResult:
    system, name = spec.system, spec.name
    T, cap = _cutoff(cfg, 18.0), _leaf_cap(cfg)
    P = flow_pressure(system)
    tol = _tol(cfg, "leaf", 1e-10 if name == "FULL2" else 0.05)
    om, om_rev = flow_equilibrium(system, P), reversed_flow_equilibrium(system, P)
    rev = system.reversed()
    records, rows = [], []
    refs = reference_points(system)
    for x in (refs[0], refs[-1]):
        ru, rs = [], []
        for d in range(1, 7):
            for w in completions(system.sft, {0: x.symbol(0)}, 0, d):
                cons = dict(enumerate(w[1:], 1))
                v = cover_value(LeafProblem(system, x, -1), cons, P, T, cap).value
                ru.append(v / leaf_eigenmeasure(om, x, cons))
            for w in completions(system.sft, {0: x.symbol(0)}, -d, 0):
                cons = dict(zip(range(-d, 0), w[:-1]))
                v = cover_value(LeafProblem(rev, reflect(x), +1), {-c: s for c, s in cons.items()},
                                P, T, cap).value
                rs.append(v / stable_leaf_eigenmeasure(om_rev, x, cons))
        label = "".join(map(str, x.word(-2, 0)))
        records.append(spread_record("leaf_u_proportional", name, ru, tol, leaf=label))
        records.append(spread_record("leaf_s_proportional", name, rs, tol, leaf=label))
        rows.append({"leaf": label, "u_ratio_min": min(ru), "u_ratio_max": max(ru),
                     "s_ratio_min": min(rs), "s_ratio_max": max(rs)})
    return SuiteResult(records, {"leaf": rows})


def suite_conformality(spec: SystemSpec, cfg: RunConfig) -> SuiteResult:
    system, name = spec.system, spec.name
    T, cap = _cutoff(cfg, 18.0), _leaf_cap(cfg)
    P = flow_pressure(system)
    tol = _tol(cfg, "conformality", 1e-10 if name == "FULL2" else 0.01)
    rng = _rng(cfg, "conformality")
    out = []
    for t in (1.0, 2.0, 3.0):
        recs = []
        for _ in range(20):
            x = system.random_point(rng)
            word = _random_forward_word(system, x.symbol(0), int(rng.integers(1, 4)), rng)
            recs.append(hol.check_conformality(system, P, t, CylinderSet(1, word), x, (T,), cap, tol, name))
        out.append(_worst(recs, "conformality", name, tol, t=t))
    return SuiteResult(out)


def suite_cocycle(spec: SystemSpec, cfg: RunConfig, n: int = 500) -> SuiteResult:
    system, name = spec.system, spec.name
    P = flow_pressure(system)
    tol = _tol(cfg, "cocycle", 1e-12)
    rng = _rng(cfg, "cocycle")
    worst = {k: 0.0 for k in ("plus_cocycle", "plus_antisymmetry", "minus_cocycle", "minus_antisymmetry",
                              "orbit_identity")}
    span = system.min_roof
    for _ in range(n):
        x = system.random_point(rng)
        y = hol.random_weak_stable(system, x, rng)
        z = system.flow(hol.random_weak_stable(system, x, rng), float(rng.uniform(-span, span)))
        a, b, c = (hol.omega_plus(system, *pair, P).value for pair in ((x, z), (x, y), (y, z)))
        worst["plus_cocycle"] = max(worst["plus_cocycle"], abs(a - b - c))
        worst["plus_antisymmetry"] = max(worst["plus_antisymmetry"],
                                         abs(b + hol.omega_plus(system, y, x, P).value))
        y = hol.random_weak_unstable(system, x, rng)
        z = system.flow(hol.random_weak_unstable(system, x, rng), float(rng.uniform(-span, span)))
        a, b, c = (hol.omega_minus(system, *pair, P).value for pair in ((x, z), (x, y), (y, z)))
        worst["minus_cocycle"] = max(worst["minus_cocycle"], abs(a - b - c))
        worst["minus_antisymmetry"] = max(worst["minus_antisymmetry"],
                                          abs(b + hol.omega_minus(system, y, x, P).value))
        fx = system.flow(x, float(rng.uniform(-3 * span, 3 * span)))
        worst["orbit_identity"] = max(worst["orbit_identity"],
                                      abs(hol.omega_minus(system, x, fx, P).value
                                          + hol.omega_plus(system, x, fx, P).value))
    recs = [abs_record(k, name, v, 0.0, tol, samples=n) for k, v in worst.items()]
    return SuiteResult(recs)


def suite_holonomy(spec: SystemSpec, cfg: RunConfig, n: int = 20) -> SuiteResult:
    system, name = spec.system, spec.name
    T, cap = _cutoff(cfg, 18.0), _leaf_cap(cfg)
    P = flow_pressure(system)
    tol = _tol(cfg, "holonomy", 1e-10 if _exact_window(system) else 0.02)
    rng = _rng(cfg, "holonomy")
    recs = []
    for _ in range(n):
        x1 = system.random_point(rng)
        x2 = system.random_point(rng)
        while x2.symbol(0) != x1.symbol(0):
            x2 = system.random_point(rng)
        word = _random_forward_word(system, x1.symbol(0), int(rng.integers(1, 4)), rng)
        recs.append(hol.holonomy_rn_check(system, P, hol.PastReplacement(x1, x2), CylinderSet(1, word),
                                          (T,), cap, tol, name))
    return SuiteResult([_worst(recs, "holonomy_rn", name, tol)])


def _rect_test_sets(system: SuspensionSystem, rect, rng, count: int) -> list[CylinderSet]:
    lo_b, hi_b = rect.band
    out = []
    while len(out) < count:
        lo, hi = -int(rng.integers(0, 3)), int(rng.integers(0, 3))
        words = completions(system.sft, {0: rect.symbol}, lo, hi)
        w = words[int(rng.integers(len(words)))]
        a, b = sorted(rng.uniform(lo_b, hi_b, 2))
        if b - a > 1e-3:
            out.append(CylinderSet(lo, w, (float(a), float(b))))
    return out


def suite_product(spec: SystemSpec, cfg: RunConfig) -> SuiteResult:
    system, name = spec.system, spec.name
    T, cap = _cutoff(cfg, 18.0), _leaf_cap(cfg)
    P = flow_pressure(system)
    rng = _rng(cfg, "product")
    lm = LeafMeasures(system, P, T, cap)
    om = flow_equilibrium(system, P)
    pm = ProductMeasure(make_rectangle(system, 0), lm)
    sets = _rect_test_sets(system, pm.rect, rng, 50)
    tol4 = _tol(cfg, "product_formulas", 1e-6 if name == "FULL2" else 0.01)
    recs, rows, worst = [], [], []
    for i, Z in enumerate(sets):
        vals = [pm.value(Z, k) for k in (1, 2, 3, 4)]
        oracle = gibbs_cylinder(om, Z)
        worst.append(max(vals) / min(vals))
        rows.append({"set_id": i, "lo": Z.lo, "word": "".join(map(str, Z.word)), "fiber_a": Z.fiber[0],
                     "fiber_b": Z.fiber[1], "formula1": vals[0], "formula2": vals[1], "formula3": vals[2],
                     "formula4": vals[3], "oracle": oracle, "ratio": vals[0] / oracle})
    recs.append(spread_record("product_four_formulas", name, [max(worst), 1.0], tol4, sets=len(sets)))
    # the same sets against the oracle, up to one constant
    recs.append(spread_record("product_vs_oracle", name, [r["ratio"] for r in rows],
                              _tol(cfg, "product_vs_oracle", 0.02)))
    recs.append(spread_record("product_reconstruction", name,
                              [pm.reconstruct_from_conditionals(Z) / pm.formula3(Z) for Z in sets[:10]] + [1.0],
                              _tol(cfg, "product_reconstruction", 1e-9)))
    # overlapping rectangles with different centers, pasts and futures
    delta = pm.rect.delta
    c1 = pm.rect.q.fiber
    sym = pm.rect.symbol
    others = [make_rectangle(system, sym, c1 + delta / 2,
                             past=_random_past(system, sym, 3, rng), future=_random_forward_word(system, sym, 3, rng))
              for _ in range(2)]
    overlap = [Z for Z in sets if Z.fiber[0] >= c1 - delta / 2][:15]
    overlap += [CylinderSet(Z.lo, Z.word, (c1 - delta / 4, c1 + delta / 2)) for Z in sets[:10]]
    try:
        patch_global([pm] + [ProductMeasure(r, lm) for r in others], overlap, 1e-6)
        recs.append(CheckRecord("product_overlap", name, 0.0, 0.0, 1e-6, True, {"sets": len(overlap)}, "abs"))
    except ConsistencyError as exc:
        dev = max(max(v) / min(v) - 1 for _, v in exc.records)
        recs.append(CheckRecord("product_overlap", name, dev, 0.0, 1e-6, False, {"sets": len(overlap)}, "abs"))
    gpm = GlobalProductMeasure(system, lm)
    samples = [(system.random_point(rng), float(rng.uniform(1, 20))) for _ in range(100)]
    recs.append(bound_record("product_gibbs", name, product_gibbs_ratio(gpm, samples),
                             _tol(cfg, "product_gibbs", 10.0), samples=len(samples)))
    lo_b, hi_b = pm.rect.band
    dens = [conditional_density(pm, _random_past(system, sym, 2, rng), float(rng.uniform(lo_b, hi_b)),
                                _tol(cfg, "conditional_density", 0.01), name) for _ in range(10)]
    recs.append(_worst(dens, "conditional_density", name, _tol(cfg, "conditional_density", 0.01)))
    Zf = CylinderSet(0, (sym,), (lo_b, lo_b + delta))
    recs.append(flow_invariance_product(pm, Zf, 0.4 * delta, 1, 0.01, name))
    return SuiteResult(recs, {"product": rows})


def _random_past(system: SuspensionSystem, last: int, length: int, rng) -> tuple:
    rev = system.sft.reversed()
    w = [last]
    for _ in range(length):
        w.append(int(rng.choice(rev.successors(w[-1]))))
    return tuple(reversed(w[1:]))


def _two_sided_sets(system: SuspensionSystem) -> list[CylinderSet]:
    out = []
    for lo, hi in ((0, 0), (-1, 0), (0, 1), (-1, 1)):
        for s in range(system.sft.alphabet_size):
            out.extend(CylinderSet(lo, w) for w in completions(system.sft, {0: s}, lo, hi))
    return out


def suite_two_sided(spec: SystemSpec, cfg: RunConfig) -> SuiteResult:
    system, name = spec.system, spec.name
    T = _cutoff(cfg, 10.0)
    cap = cfg.depth_cap if cfg.depth_cap is not None else default_cap(system, T)
    P = flow_pressure(system)
    rng = _rng(cfg, "two-sided")
    om = flow_equilibrium(system, P)
    mm = MeasureM(system, P, T, cap)
    tol_f = _tol(cfg, "two_sided_flow", 0.10)
    recs, rows = [], []
    r = [system.roof.values[(s,)] for s in range(system.sft.alphabet_size)]
    for Z in (CylinderSet(0, (0,), (0.0, r[0] / 2)), CylinderSet(0, (1,), (0.0, r[1]))):
        for tau in (0.25, 1.0):
            rec = flow_invariance_check(mm, Z, tau, tol_f, name)
            recs.append(rec)
            rows.append({"Z": f"{Z.word}x{Z.fiber}", "tau": tau, "ratio": rec.ratio, "symmetric": False})
    symm = MeasureM(system, P, T, cap, symmetric=True)
    for tau in (0.25, 1.0):
        rec = flow_invariance_check(symm, CylinderSet(0, (0,), (0.0, r[0] / 2)), tau, tol_f, name)
        rows.append({"Z": f"(0,)x(0,{r[0] / 2})", "tau": tau, "ratio": rec.ratio, "symmetric": True})
    samples = []
    for _ in range(100):
        x = system.random_point(rng, radius=16)
        r0 = system.roof.at(x)
        x = x.with_fiber(float(rng.uniform(0.05 * r0, 0.95 * r0)))
        st = float(rng.uniform(4, 24))
        s = float(rng.uniform(2, st - 2))
        samples.append((x, s, st - s))
    rec, flagged = gibbs_star_check(mm, samples, _tol(cfg, "gibbs_star", 4.0), name,
                                    adaptive=cfg.depth_cap is None)
    recs.append(rec)
    sets = _two_sided_sets(system)
    ratios = [mm(Z) / gibbs_cylinder(om, Z) for Z in sets]
    recs.append(spread_record("two_sided_proportionality", name, ratios, _tol(cfg, "two_sided_proportionality", 0.05)))
    if name == "FULL2":
        whole = CylinderSet(0, ())
        recs.append(ratio_record("two_sided_split", name, symm(whole), mm(whole), _tol(cfg, "two_sided_split", 0.01)))
    notes = [f"{len(flagged)} Gibbs samples deeper than depth_cap were excluded"] if flagged else []
    return SuiteResult(recs, {"two_sided": rows}, notes)


def suite_srb(spec: SystemSpec, cfg: RunConfig) -> SuiteResult:
    system, name = spec.system, spec.name
    if spec.expansion is None:
        return SuiteResult([], notes=["no expansion rates: SRB checks not applicable"])
    P = flow_pressure(system)
    recs = [abs_record("srb_pressure_zero", name, P, 0.0, _tol(cfg, "srb_pressure_zero", 1e-6))]
    om = flow_equilibrium(system, P)
    sets = [CylinderSet(-1, w) for w in system.sft.words(3)] + [CylinderSet(0, ())]
    T = _cutoff(cfg, 10.0)
    tol = _tol(cfg, "srb", 0.05)
    recs.append(srb_main_check(system, spec.expansion, sets, T, cfg.depth_cap, tol, name))
    lm = LeafMeasures(system, 0.0, _cutoff(cfg, 18.0), _leaf_cap(cfg))
    ratios = [srb_product_global(system, spec.expansion, Z, lm) / gibbs_cylinder(om, Z) for Z in sets]
    recs.append(spread_record("srb_product", name, ratios, tol))
    return SuiteResult(recs)


def suite_pushforward(spec: SystemSpec, cfg: RunConfig) -> SuiteResult:
    system, name = spec.system, spec.name
    if not system.constant_roof:
        return SuiteResult([], notes=["non-constant roof: pushforward averaging not applicable"])
    P = flow_pressure(system)
    rng = _rng(cfg, "pushforward")
    x = system.random_point(rng)
    lp = LeafPushforward(system, P, x, _cutoff(cfg, 18.0))
    ts = [10.0, 20.0, 40.0, 80.0]
    table = convergence_table(lp, ts, 2)
    tvs = [row["tv_distance"] for row in table]
    recs = [CheckRecord("tv_nonincreasing", name, max(b / a for a, b in zip(tvs, tvs[1:])), 1.10, 0.10,
                        nonincreasing(tvs, 0.10), {"t": ts}, "bound"),
            bound_record("tv_final", name, tvs[-1], _tol(cfg, "tv_final", 0.05), t=ts[-1])]
    recs.append(_worst([mass_conservation(lp, t, 0.01, name) for t in ts + [13.7]], "pushforward_mass", name, 0.01))
    ces = []
    for Z in cylinder_algebra(system, 2)[::2]:
        for t in (10.0, 20.0, 40.0):
            for eta in (0.5, 3.7):
                ces.append(cesaro_check(lp, Z, t, eta, name))
    worst = max(ces, key=lambda r: r.lhs / r.rhs)
    recs.append(CheckRecord("cesaro_stability", name, worst.lhs, worst.rhs, 0.0, all(r.passed for r in ces),
                            {"triples": len(ces)}, "bound"))
    return SuiteResult(recs, {"convergence": table})


SUITES: dict[str, Callable[[SystemSpec, RunConfig], SuiteResult]] = {
    "pressure": suite_pressure,
    "leaf": suite_leaf,
    "conformality": suite_conformality,
    "cocycle": suite_cocycle,
    "holonomy": suite_holonomy,
    "product": suite_product,
    "two-sided": suite_two_sided,
    "srb": suite_srb,
    "pushforward": suite_pushforward,
}


# -- orchestration -------------------------------------------------------------

def load_spec(cfg: RunConfig) -> SystemSpec:
    if (cfg.fixture is None) == (cfg.system_file is None):
        raise ConfigError("give exactly one of --fixture or --system")
    return load_fixture(cfg.fixture) if cfg.fixture else load_system_file(cfg.system_file)


def validate(cfg: RunConfig, spec: SystemSpec) -> None:
    """Config-level guards, raised before any suite runs."""
    system = spec.system
    if cfg.task not in TASKS + ("all",):
        raise ConfigError(f"unknown task {cfg.task!r}")
    if cfg.cutoffs and min(cfg.cutoffs) < 1:
        raise ConfigError("cutoffs must be at least 1")
    if cfg.depth_cap is not None:
        if cfg.depth_cap < 1:
            raise ConfigError("depth_cap must be positive")
        T = max(cfg.cutoffs) if cfg.cutoffs else None
        tasks = TASKS if cfg.task == "all" else (cfg.task,)
        for task in tasks:
            need_T = T if T is not None else (10.0 if task in ("two-sided", "srb") else 18.0)
            if task in ("two-sided",):
                ok = cfg.depth_cap * system.min_roof - system.max_roof >= need_T
            else:
                ok = (cfg.depth_cap - system.depth_offset) * system.min_roof >= need_T
            if not ok:
                raise ConfigError(f"depth_cap {cfg.depth_cap} insufficient for cutoff {need_T:g} ({task})")


def _run_suite(args):
    task, spec, cfg = args
    t0 = time.perf_counter()
    res = SUITES[task](spec, cfg)
    return task, res, time.perf_counter() - t0


def threads() -> int:
    try:
        return max(1, int(os.environ.get("CARATHEDYN_THREADS", "1")))
    except ValueError:
        raise ConfigError("CARATHEDYN_THREADS must be an integer") from None


def run(cfg: RunConfig) -> Report:
    spec = load_spec(cfg)
    validate(cfg, spec)
    tasks = list(TASKS) if cfg.task == "all" else [cfg.task]
    jobs = [(t, spec, cfg) for t in tasks]
    workers = min(threads(), len(jobs))
    try:
        if workers > 1:
            with ProcessPoolExecutor(workers) as ex:
                results = list(ex.map(_run_suite, jobs))
        else:
            results = [_run_suite(j) for j in jobs]
    except CoverError as exc:
        raise ConfigError(str(exc)) from None
    suites = {t: r for t, r, _ in results}
    timing = {t: dt for t, _, dt in results}
    return Report(spec.name, cfg.echo(), suites, timing)


def tables_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def write_report(report: Report, out: str | Path) -> list[Path]:
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create {out}: {exc.strerror}") from None
    written = [out / "report.json", out / "summary.txt", out / "checks.csv"]
    written[0].write_text(report.as_json() + "\n", encoding="utf-8")
    written[1].write_text(report.summary() + "\n", encoding="utf-8")
    checks = [dict(suite=s, **{k: v for k, v in r.as_dict().items() if k != "params"})
              for s, res in report.suites.items() for r in res.records]
    written[2].write_text(tables_csv(checks), encoding="utf-8")
    for s, res in report.suites.items():
        for tname, rows in res.tables.items():
            p = out / f"{tname}.csv"
            p.write_text(tables_csv(rows), encoding="utf-8")
            written.append(p)
    return written


def list_fixtures() -> list[dict]:
    out = []
    for n in FIXTURE_NAMES:
        spec = load_fixture(n)
        out.append({"name": n, "description": spec.description, "pressure": round(flow_pressure(spec.system), 12) + 0.0})
    return out
