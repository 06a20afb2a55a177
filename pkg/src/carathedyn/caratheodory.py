"""Carathéodory cover infima on leaves, pressure as a critical value, leaf measures.

A leaf is the set of sequences agreeing with a reference point on coordinates
``<= 0`` (unstable) or ``>= 0`` (stable), at a fixed fiber height ``h``.  Cover
elements are cylinders extending the fixed half by coordinates ``1..D``; a node
at depth ``D`` is the Bowen ball whose crossing count is ``n = D - k_eff``.
Its order is the time ``S_n roof - h`` (unstable) or ``S_n roof + h`` (stable
side, run on the reflected system) and its weight is ``exp(Phi - alpha * order)``.

The infimum over rooted antichains is a tree recursion:

    G(node) = min(1 if eligible, sum_children exp(step) * G(child))

where ``G`` is the best cover cost relative to the node's own weight.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .system import (CylinderSet, LocallyConstantFunction, SuspensionSystem, SymbolicPoint,
                     point_from_word, reflect)

INFINITY = 1e12
TIE = 1e-12
MAX_MATERIALIZED = 200_000


class CoverError(ValueError):
    pass


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class CoverElement:
    lo: int
    word: tuple[int, ...]
    order: float
    crossings: int
    log_weight: float

    @property
    def weight(self) -> float:
        return _exp(self.log_weight)

    def contains(self, other: "CoverElement") -> bool:
        if other.lo < self.lo or other.lo + len(other.word) < self.lo + len(self.word):
            return False
        off = self.lo - other.lo
        return other.word[off:off + len(self.word)] == self.word


@dataclass
class CoverDPResult:
    value: float
    cutoff_T: float
    depth_cap: int
    alpha: float
    optimal_cover: list[CoverElement] | None = None
    cover_size: int = 0


@dataclass(frozen=True)
class LeafProblem:
    """A leaf of ``system`` through the past of ``point`` (coordinates ``<= 0``).

    ``sign = -1`` is an unstable leaf of ``system`` at height ``point.fiber``;
    ``sign = +1`` is used for stable leaves after reflection, where the time
    origin sits ``h`` above the first backward crossing.
    """

    system: SuspensionSystem
    point: SymbolicPoint
    sign: int = -1
    height: float | None = None

    @property
    def h(self) -> float:
        return self.point.fiber if self.height is None else self.height


class LeafDP:
    """Memoized cover recursion for one system, fixed ``alpha``, cutoff and cap.

    Leaves with the same boundary state share the memo table.
    """

    def __init__(self, system: SuspensionSystem, alpha: float, cutoff_T: float, depth_cap: int,
                 sign: int = -1, h: float = 0.0, constraints: Mapping[int, int] | None = None):
        self.system = system
        self.alpha = float(alpha)
        self.T = float(cutoff_T)
        self.cap = int(depth_cap)
        self.sign = sign
        self.h = float(h)
        self.constraints = dict(constraints or {})
        lo, hi = system.window
        self.k_eff = system.depth_offset
        self.psi = system.step_psi
        self.roof = system.step_roof
        phi = system.potential
        # unstable: correct by -h*phi(x); stable (reflected): +h*phi at step -1
        self.corr_step = 0 if sign < 0 else -1
        self.corr = phi.lift(min(phi.lo, lo), max(phi.hi, hi), system.sft)
        first = min(lo, self.corr.lo + self.corr_step)
        self.L = max(1, self.k_eff + 2 - first)
        n_max = self.cap - self.k_eff
        if n_max < 1 or n_max * system.min_roof + sign * self.h < self.T - 1e-12:
            raise CoverError(f"depth_cap {self.cap} cannot reach cutoff T={self.T}")
        self.memo: dict = {}
        self.choice: dict = {}
        self.max_constraint = max(self.constraints) if self.constraints else 0
        if self.max_constraint > self.cap:
            raise CoverError("target is deeper than depth_cap")
        self._step_cache: dict = {}

    # the sequence is known on [D - L + 1, D]; ``state`` holds it
    def _read(self, state, D, f: LocallyConstantFunction, j: int) -> float:
        a = j + f.lo - (D - self.L + 1)
        return f.values[state[a:a + f.width]]

    def _step(self, state, D):
        """Log-weight and time increments for moving to depth ``D`` (``state`` already extended)."""
        j = D - 1 - self.k_eff
        if j < 0:
            return 0.0, 0.0
        # depends on D only through whether this is step 0
        ck = (state, j == 0)
        hit = self._step_cache.get(ck)
        if hit is not None:
            return hit
        dw = self._read(state, D, self.psi, j) - self.alpha * self._read(state, D, self.roof, j)
        dt = self._read(state, D, self.roof, j)
        if j == 0:
            c = self._read(state, D, self.corr, self.corr_step)
            dw += self.sign * self.h * c - self.alpha * self.sign * self.h
            dt += self.sign * self.h
        out = (dw, dt)
        self._step_cache[ck] = out
        return out

    def children(self, state, D):
        sft = self.system.sft
        want = self.constraints.get(D + 1)
        for s in sft.successors(state[-1]):
            if want is not None and s != want:
                continue
            yield state[1:] + (s,), s

    def _eligible(self, D: int, time: float) -> bool:
        return D - self.k_eff >= 1 and time >= self.T - 1e-12 and D >= self.max_constraint

    def _key(self, state, D: int, time: float):
        # past the cutoff the exact time no longer matters
        return (state, D, None if self._eligible(D, time) else round(time, 9))

    def G(self, state, D: int, time: float) -> float:
        eligible = self._eligible(D, time)
        key = self._key(state, D, time)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if D >= self.cap:
            val = 1.0 if eligible else math.inf
            self.memo[key] = val
            self.choice[key] = "take"
            return val
        refine = 0.0
        for child, _ in self.children(state, D):
            dw, dt = self._step(child, D + 1)
            g = self.G(child, D + 1, time + dt)
            e = _exp(dw)
            if g == 0.0 or e == 0.0:
                continue
            refine += e * g
        if eligible and 1.0 < refine * (1 - TIE):
            val, how = 1.0, "take"
        else:
            val, how = refine, "refine"
        self.memo[key] = val
        self.choice[key] = how
        return val

    def root_value(self, state) -> float:
        return self.G(tuple(state), 0, 0.0)

    def materialize(self, state, limit: int = MAX_MATERIALIZED) -> list[CoverElement]:
        out: list[CoverElement] = []
        root = tuple(state)

        def walk(st, D, time, logw, word):
            if self.choice[self._key(st, D, time)] == "take":
                if len(out) >= limit:
                    raise CoverError("optimal cover too large to materialize")
                out.append(CoverElement(1, tuple(word), time, D - self.k_eff, logw))
                return
            for child, s in self.children(st, D):
                dw, dt = self._step(child, D + 1)
                if self.memo.get(self._key(child, D + 1, time + dt), 1.0) == 0.0:
                    continue
                walk(child, D + 1, time + dt, logw + dw, word + [s])

        walk(root, 0, 0.0, 0.0, [])
        return out


def _ensure_recursion(cap: int) -> None:
    need = 4 * cap + 200
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def _leaf_setup(problem: LeafProblem, target):
    system = problem.system
    if isinstance(target, CylinderSet):
        constraints = target.constraints()
    else:
        constraints = dict(target or {})
    p = problem.point
    empty = False
    for c in [c for c in constraints if c <= 0]:
        if constraints.pop(c) != p.symbol(c):
            empty = True
    return system, constraints, empty


def leaf_state(system: SuspensionSystem, point: SymbolicPoint, L: int) -> tuple[int, ...]:
    return point.word(1 - L, 0)


def cover_value(problem: LeafProblem, target: CylinderSet | Mapping[int, int] | None, alpha: float,
                cutoff_T: float, depth_cap: int, *, materialize: bool = False) -> CoverDPResult:
    """Restricted-class Carathéodory infimum of the target on the leaf.

    ``target`` is a cylinder (or a constraint map ``coordinate -> symbol``) on
    coordinates ``>= 1`` of the leaf; ``None`` means the whole leaf.
    """
    system, constraints, empty = _leaf_setup(problem, target)
    _ensure_recursion(depth_cap)
    dp = LeafDP(system, alpha, cutoff_T, depth_cap, problem.sign, problem.h, constraints)
    if empty:
        return CoverDPResult(0.0, cutoff_T, depth_cap, alpha, [] if materialize else None, 0)
    state = leaf_state(system, problem.point, dp.L)
    val = dp.root_value(state)
    cover = dp.materialize(state) if materialize else None
    return CoverDPResult(val, cutoff_T, depth_cap, alpha, cover, len(cover) if cover is not None else 0)


def reference_points(system: SuspensionSystem, L: int | None = None) -> list[SymbolicPoint]:
    """One point per admissible past boundary word: these exhaust the distinct leaves."""
    if L is None:
        L = LeafDP(system, 0.0, 0.0, system.depth_offset + 1).L
    return [point_from_word(system.sft, w, 1 - L) for w in system.sft.words(L)]


def whole_space_value(system: SuspensionSystem, alpha: float, cutoff_T: float, depth_cap: int) -> float:
    """Largest whole-leaf cover value over the reference leaves (one shared DP)."""
    _ensure_recursion(depth_cap)
    dp = LeafDP(system, alpha, cutoff_T, depth_cap)
    return max(dp.root_value(w) for w in system.sft.words(dp.L))


@dataclass
class CriticalValueEstimate:
    alpha_star: float
    per_cutoff_values: list[tuple[float, float, float]]
    tolerance: float
    flagged: bool = False


def critical_value(system: SuspensionSystem, T_schedule: Sequence[float], depth_cap: int = 40,
                   alpha_tol: float = 1e-7) -> CriticalValueEstimate:
    """Bisect ``alpha`` until the whole-space cover value crosses 1, for each cutoff."""
    if list(T_schedule) != sorted(T_schedule) or not T_schedule:
        raise CoverError("T_schedule must be a nonempty increasing list")
    rows = []
    bound = system.potential.sup_norm() + math.log(system.sft.alphabet_size) / system.min_roof + 1.0
    for T in T_schedule:
        lo_a, hi_a = -bound, bound
        seen: list[tuple[float, float]] = []

        def f(a):
            v = whole_space_value(system, a, T, depth_cap)
            v = math.inf if v > INFINITY else v
            seen.append((a, v))
            ordered = sorted(seen)
            for (a1, v1), (a2, v2) in zip(ordered, ordered[1:]):
                if v2 > v1 * (1 + 1e-9) + 1e-300:
                    raise CoverError("cover value is not monotone in alpha")
            return v

        if not (f(lo_a) > 1 > f(hi_a)):
            raise CoverError("critical value bisection failed to bracket")
        while hi_a - lo_a > alpha_tol:
            mid = 0.5 * (lo_a + hi_a)
            if f(mid) > 1:
                lo_a = mid
            else:
                hi_a = mid
        a_star = 0.5 * (lo_a + hi_a)
        rows.append((float(T), a_star, whole_space_value(system, a_star, T, depth_cap)))
    if len(rows) >= 3:
        ext = extrapolate_limit([(T, a) for T, a, _ in rows], atol=alpha_tol)
        return CriticalValueEstimate(ext.value, rows, alpha_tol, ext.flagged)
    return CriticalValueEstimate(rows[-1][1], rows, alpha_tol)


@dataclass
class Extrapolation:
    value: float
    raw_tail: float
    accelerated: float | None
    flagged: bool


def extrapolate_limit(values: Sequence[tuple[float, float]], rtol: float = 1e-3,
                      atol: float = 0.0) -> Extrapolation:
    """Tail value when the sequence has settled, Aitken's delta-squared otherwise."""
    if len(values) < 3:
        raise CoverError("need at least three (T, value) entries")
    v = [float(x) for _, x in values]
    a, b, c = v[-3:]
    flagged = any(max(p, q) > 2 * min(p, q) or (p > 0) != (q > 0) for p, q in zip(v, v[1:]) if p or q)
    settled = all(abs(q - p) <= atol or (p != 0 and abs(q / p - 1) <= rtol) for p, q in zip(v[-3:], v[-2:]))
    denom = c - 2 * b + a
    acc = None if denom == 0 else c - (c - b) ** 2 / denom
    if settled or acc is None or not math.isfinite(acc):
        return Extrapolation(c, c, acc, flagged)
    return Extrapolation(acc, c, acc, flagged)


@dataclass
class MeasureEntry:
    """One entry of a measure table with its per-cutoff history."""

    target: dict
    value: float
    per_cutoff: list[tuple[float, float]] = field(default_factory=list)
    unstable: bool = False
    source: str = "caratheodory"


def _leaf_entry(problem: LeafProblem, P: float, constraints: dict, cutoffs: Sequence[float],
                depth_cap: int, label: dict) -> MeasureEntry:
    rows = [(float(T), cover_value(problem, constraints, P, T, depth_cap).value) for T in cutoffs]
    vals = [v for _, v in rows]
    if len(rows) >= 3:
        ext = extrapolate_limit(rows)
        value, unstable = ext.value, ext.flagged
    else:
        value, unstable = vals[-1], False
    if min(vals) > 0 and max(vals) > 10 * min(vals):
        unstable = True
    return MeasureEntry(label, value, rows, unstable)


def leaf_measure_u(system: SuspensionSystem, P: float, target: CylinderSet | Mapping[int, int] | None,
                   cutoffs: Sequence[float], depth_cap: int = 30,
                   point: SymbolicPoint | None = None) -> MeasureEntry:
    """``m^u`` of a forward cylinder on the unstable leaf through ``point``."""
    point = point if point is not None else reference_points(system)[0]
    cons = target.constraints() if isinstance(target, CylinderSet) else dict(target or {})
    return _leaf_entry(LeafProblem(system, point, -1), P, cons, cutoffs, depth_cap, cons)


def leaf_measure_s(system: SuspensionSystem, P: float, target: CylinderSet | Mapping[int, int] | None,
                   cutoffs: Sequence[float], depth_cap: int = 30,
                   point: SymbolicPoint | None = None) -> MeasureEntry:
    """``m^s`` of a backward cylinder (coordinates ``<= -1``) on the stable leaf through ``point``."""
    rev = system.reversed()
    if point is None:
        y = reference_points(rev)[0]
    else:
        y = reflect(point)
    cons = target.constraints() if isinstance(target, CylinderSet) else dict(target or {})
    ycons = {-c: s for c, s in cons.items()}
    return _leaf_entry(LeafProblem(rev, y, +1), P, ycons, cutoffs, depth_cap, cons)
