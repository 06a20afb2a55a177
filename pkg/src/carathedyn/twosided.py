"""Direct two-sided construction of the equilibrium measure.

Covering elements are two-sided balls ``B*_{s,t}(x)``: a word on
``[-m-k_r, n+k_r]`` plus a fiber window of half-width ``r_unit/(s+t)``.  With
roof and potential read on coordinate 0, a node of the cover recursion is a
two-sided word; its weight factors as ``exp(sum of w_i over -m..n)`` times a
function of the boundary symbols and the accumulated side times, which is what
the memo table stores.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

from .caratheodory import INFINITY, TIE, CoverError
from .holonomy import bracket
from .oracle import flow_equilibrium, flow_pressure, gibbs_cylinder
from .report import CheckRecord, bound_record, ratio_record, spread_record
from .system import CylinderSet, SuspensionSystem, SymbolicPoint, completions

ROUND = 9


class TwoSidedError(ValueError):
    pass


def _require_pointwise(system: SuspensionSystem) -> None:
    for f in (system.roof, system.potential):
        if f.lo != 0 or f.hi != 0:
            raise TwoSidedError("two-sided covers need roof and potential read on coordinate 0 only")


@dataclass(frozen=True)
class TwoSidedBall:
    center: SymbolicPoint
    s: float
    t: float
    lo: int
    word: tuple
    beta_halfwidth: float
    m: int
    n: int

    @property
    def hi(self) -> int:
        return self.lo + len(self.word) - 1

    def contains(self, system: SuspensionSystem, z: SymbolicPoint) -> bool:
        if z.epoch != self.center.epoch:
            return False
        if z.word(self.lo, self.hi) != self.word:
            return False
        return abs(beta(system, self.center, z)) < self.beta_halfwidth

    def as_cylinder(self) -> CylinderSet:
        f = self.center.fiber
        return CylinderSet(self.lo, self.word, (f - self.beta_halfwidth, f + self.beta_halfwidth))


def beta(system: SuspensionSystem, x: SymbolicPoint, z: SymbolicPoint) -> float:
    """Flow-direction displacement of ``z`` from ``x`` in the local product structure."""
    return -bracket(system, x, z).beta


def side_depths(system: SuspensionSystem, x: SymbolicPoint, s: float, t: float) -> tuple[int, int]:
    """Coordinates ``-m`` and ``n`` whose (half-open) fibers hold the orbit at times ``-s`` and ``t``."""
    f = x.fiber
    n, acc = 0, system.roof.at(x, 0) - f
    while acc <= t + TIE:
        n += 1
        acc += system.roof.at(x, n)
    m, acc = 0, f
    while acc < s - TIE:
        m += 1
        acc += system.roof.at(x, -m)
    return m, n


def bstar(system: SuspensionSystem, x: SymbolicPoint, s: float, t: float) -> TwoSidedBall:
    if s < 1 or t < 1:
        raise TwoSidedError("two-sided balls need s, t >= 1")
    m, n = side_depths(system, x, s, t)
    k = system.k_r
    lo, hi = -m - k, n + k
    r = system.r_unit if system.r_unit is not None else system.min_roof / 4
    return TwoSidedBall(x, s, t, lo, x.word(lo, hi), r / (s + t), m, n)


@dataclass
class TwoSidedCoverResult:
    value: float
    cutoff_T: float
    depth_cap: int
    alpha: float
    cover: list | None = None


class TwoSidedDP:
    """Memoized minimum over covers by two-sided words.

    A node visits coordinates ``-m..n`` with word on ``[-m-k, n+k]``;
    ``s_time`` and ``t_time`` are the roof sums over ``-m..-1`` and ``0..n``.
    ``g(left, right, m, n, s_time, t_time)`` is the node value divided by the
    exponential weight already accumulated; ``left`` holds symbols on
    ``[-m-k, -m]`` and ``right`` those on ``[n, n+k]``.
    """

    def __init__(self, system: SuspensionSystem, alpha: float, cutoff_T: float, depth_cap: int,
                 symmetric: bool = False):
        _require_pointwise(system)
        self.system = system
        self.sft = system.sft
        self.alpha = float(alpha)
        self.T = float(cutoff_T)
        self.cap = int(depth_cap)
        self.symmetric = symmetric
        self.k = system.k_r
        self.r_unit = system.r_unit if system.r_unit is not None else system.min_roof / 4
        if self.cap * system.min_roof - system.max_roof < self.T - TIE:
            raise CoverError(f"depth_cap {self.cap} cannot reach cutoff T={self.T} on both sides")
        self.roof = {s: system.roof.values[(s,)] for s in range(self.sft.alphabet_size)}
        self.w = {s: system.step_psi.values[(s,)] - self.alpha * self.roof[s] for s in self.roof}
        self.memo: dict = {}
        self.choice: dict = {}
        self.fiber_length = 0.0
        self.r0 = 0.0
        if sys.getrecursionlimit() < 8 * self.cap + 200:
            sys.setrecursionlimit(8 * self.cap + 200)

    def count(self, S: float) -> int:
        return math.ceil(self.fiber_length * S / self.r_unit - 1e-9)

    def eligible(self, m: int, n: int, s_time: float, t_time: float) -> bool:
        return m >= 1 and n >= 1 and s_time >= self.T - TIE and t_time - self.r0 >= self.T - TIE

    def take(self, s_time: float, t_time: float) -> float:
        S = s_time + t_time
        return self.count(S) / S

    def _options(self, m, n, s_time, t_time):
        short_s = s_time < self.T - TIE or m < 1
        short_t = t_time - self.r0 < self.T - TIE or n < 1
        can_s, can_t = m < self.cap, n < self.cap
        if self.symmetric:
            side = "future" if t_time - self.r0 <= s_time else "past"
            opts = [side] if (can_t if side == "future" else can_s) else []
            return opts
        opts = []
        # refine-future first so ties prefer it
        if can_t and (short_t or not short_s):
            opts.append("future")
        if can_s and (short_s or not short_t):
            opts.append("past")
        return opts

    def _children(self, side, left, right, m, n, s_time, t_time):
        k = self.k
        if side == "past":
            for c in range(self.sft.alphabet_size):
                if not self.sft.allowed(c, left[0]):
                    continue
                nl = (c,) + left[:-1]
                sym = ((c,) + left)[k]  # coordinate -m-1 enters the weight
                yield c, self.w[sym], (nl, right, m + 1, n, s_time + self.roof[sym], t_time)
        else:
            for c in self.sft.successors(right[-1]):
                nr = right[1:] + (c,)
                sym = (right + (c,))[1]  # coordinate n+1 enters the weight
                yield c, self.w[sym], (left, nr, m, n + 1, s_time, t_time + self.roof[sym])

    def g(self, left, right, m, n, s_time, t_time) -> float:
        key = (left, right, m, n, round(s_time, ROUND), round(t_time, ROUND))
        if key in self.memo:
            return self.memo[key]
        best, how = INFINITY * 10, None
        if self.eligible(m, n, s_time, t_time):
            best, how = self.take(s_time, t_time), "take"
        for side in self._options(m, n, s_time, t_time):
            total = 0.0
            for _, lw, child in self._children(side, left, right, m, n, s_time, t_time):
                v = self.g(*child)
                if v >= INFINITY:
                    total = INFINITY * 10
                    break
                total += math.exp(lw) * v
            if total < best * (1 - TIE) or (how == "take" and total <= best * (1 + TIE) and side == "future"):
                best, how = total, side
        if how is None:
            best = math.inf
        self.memo[key] = best
        self.choice[key] = how
        return best

    def root_terms(self, Z: CylinderSet):
        """Completions of ``Z`` to the smallest node word, with their weights and states."""
        k = self.k
        cons = Z.constraints()
        if 0 not in cons:
            raise TwoSidedError("two-sided targets must fix coordinate 0")
        m0 = max(0, -Z.lo - k)
        n0 = max(0, Z.hi - k)
        lo, hi = -m0 - k, n0 + k
        out = []
        for w in completions(self.sft, cons, lo, hi):
            sym = lambda c: w[c - lo]
            logw = sum(self.w[sym(i)] for i in range(-m0, n0 + 1))
            s_time = sum(self.roof[sym(i)] for i in range(-m0, 0))
            t_time = sum(self.roof[sym(i)] for i in range(0, n0 + 1))
            left = tuple(sym(c) for c in range(lo, -m0 + 1))
            right = tuple(sym(c) for c in range(n0, hi + 1))
            out.append((w, lo, logw, (left, right, m0, n0, s_time, t_time)))
        return out

    def value(self, Z: CylinderSet) -> float:
        cons = Z.constraints()
        r0 = self.roof.get(cons.get(0), None)
        if r0 is None:
            raise TwoSidedError("two-sided targets must fix coordinate 0")
        a, b = Z.fiber if Z.fiber is not None else (0.0, r0)
        a, b = max(a, 0.0), min(b, r0)
        if b <= a or not self.sft.admissible(Z.word):
            return 0.0
        self._set_fiber(b - a, r0)
        return sum(math.exp(lw) * self.g(*st) for _, _, lw, st in self.root_terms(Z))

    def _set_fiber(self, length: float, r0: float) -> None:
        if (length, r0) != (self.fiber_length, self.r0):
            self.memo.clear()
            self.choice.clear()
            self.fiber_length, self.r0 = length, r0

    def materialize(self, Z: CylinderSet, limit: int = 200_000) -> list[tuple]:
        """Cover entries ``(lo, word, s_time, t_time, count, log_weight)``."""
        self.value(Z)
        out = []

        def walk(lo, word, logw, st):
            key = (st[0], st[1], st[2], st[3], round(st[4], ROUND), round(st[5], ROUND))
            how = self.choice[key]
            if len(out) > limit:
                raise TwoSidedError("cover too large to materialize")
            if how == "take":
                out.append((lo, word, st[4], st[5], self.count(st[4] + st[5]), logw))
                return
            for c, lw, child in self._children(how, *st):
                if how == "past":
                    walk(lo - 1, (c,) + word, logw + lw, child)
                else:
                    walk(lo, word + (c,), logw + lw, child)

        for w, lo, lw, st in self.root_terms(Z):
            walk(lo, w, lw, st)
        return out


def m_value(system: SuspensionSystem, P: float, Z: CylinderSet, cutoff_T: float, depth_cap: int | None = None,
            symmetric: bool = False, materialize: bool = False, dp: TwoSidedDP | None = None) -> TwoSidedCoverResult:
    if cutoff_T < 1:
        raise TwoSidedError("cutoff_T must be at least 1")
    if depth_cap is None:
        depth_cap = default_cap(system, cutoff_T)
    dp = dp or TwoSidedDP(system, P, cutoff_T, depth_cap, symmetric)
    val = dp.value(Z)
    cover = dp.materialize(Z) if materialize and val > 0 else ([] if materialize else None)
    return TwoSidedCoverResult(val, cutoff_T, depth_cap, P, cover)


def default_cap(system: SuspensionSystem, cutoff_T: float) -> int:
    return math.ceil((cutoff_T + system.max_roof) / system.min_roof) + 3


class MeasureM:
    """``m`` at fixed pressure, cutoff and cap, reusing one DP across targets."""

    def __init__(self, system: SuspensionSystem, P: float, cutoff_T: float, depth_cap: int | None = None,
                 symmetric: bool = False):
        cap = default_cap(system, cutoff_T) if depth_cap is None else depth_cap
        self.system = system
        self.dp = TwoSidedDP(system, P, cutoff_T, cap, symmetric)

    def __call__(self, Z: CylinderSet) -> float:
        """Targets may leave coordinate 0 free or span several words; pieces are summed."""
        cons = Z.constraints()
        if 0 in cons and all(c in cons for c in range(min(cons), max(cons) + 1)):
            return self.dp.value(Z)
        lo, hi = min(list(cons) + [0]), max(list(cons) + [0])
        total = 0.0
        for w in completions(self.system.sft, cons, lo, hi):
            total += self.dp.value(CylinderSet(lo, w, Z.fiber))
        return total


# -- flowing cylinder sets ---------------------------------------------------

def flow_cylinder(system: SuspensionSystem, Z: CylinderSet, tau: float) -> list[CylinderSet]:
    """``f_tau Z`` as a disjoint union of cylinders times fiber intervals."""
    _require_pointwise(system)
    sft = system.sft
    cons = Z.constraints()
    if 0 not in cons:
        raise TwoSidedError("flowed sets must fix coordinate 0")
    r0 = system.roof.values[(cons[0],)]
    a, b = Z.fiber if Z.fiber is not None else (0.0, r0)
    a, b = a + tau, b + tau
    out = []
    if a < r0 and b > 0:
        out.append(CylinderSet(Z.lo, Z.word, (max(a, 0.0), min(b, r0))))
    if b > r0:
        for w, lo in _extend(sft, cons, 1):
            nxt = CylinderSet(lo - 1, w, (max(a, r0) - r0 - tau, b - r0 - tau))
            out.extend(flow_cylinder(system, nxt, tau))
    if a < 0:
        for w, lo in _extend(sft, cons, -1):
            prev = CylinderSet(lo + 1, w, None)
            rp = system.roof.values[(prev.constraints()[0],)]
            nxt = CylinderSet(lo + 1, w, (a + rp - tau, min(b, 0.0) + rp - tau))
            out.extend(flow_cylinder(system, nxt, tau))
    return [c for c in out if c.fiber[1] - c.fiber[0] > 1e-15]


def _extend(sft, cons, c):
    """Words on ``cons``'s span enlarged to include coordinate ``c``."""
    lo, hi = min(min(cons), c), max(max(cons), c)
    for w in completions(sft, cons, lo, hi):
        yield w, lo


def flow_invariance_check(mm: MeasureM, Z: CylinderSet, tau: float, tol: float = 0.10,
                          fixture: str = "") -> CheckRecord:
    moved = flow_cylinder(mm.system, Z, tau)
    lhs = sum(mm(c) for c in moved)
    return ratio_record("two_sided_flow_invariance", fixture, lhs, mm(Z), tol, tau=tau,
                        symmetric=mm.dp.symmetric)


def gibbs_star_ratio(mm: MeasureM, x: SymbolicPoint, s: float, t: float) -> float:
    """``m(B*) (s+t) exp((s+t) P - Phi(f_{-s} x, s+t))``."""
    system, P = mm.system, mm.dp.alpha
    ball = bstar(system, x, s, t)
    mass = mm(ball.as_cylinder())
    start = system.flow(x, -s)
    log_w = system.birkhoff(start, s + t) - (s + t) * P
    return mass * (s + t) * math.exp(-log_w)


def gibbs_star_check(mm: MeasureM, samples: Sequence[tuple[SymbolicPoint, float, float]], bound: float = 4.0,
                     fixture: str = "", adaptive: bool = False) -> tuple[CheckRecord, list]:
    """Worst ``max(rho, 1/rho)`` over the samples.

    With a fixed cap, samples whose ball is deeper than the cap are excluded and
    returned.  ``adaptive`` instead evaluates each ball with the cap raised to
    its depth plus a margin of 3.
    """
    worst, flagged = 1.0, []
    for x, s, t in samples:
        if s < 2 or t < 2:
            raise TwoSidedError("gibbs samples need s, t >= 2")
        m, n = side_depths(mm.system, x, s, t)
        depth = max(m, n) + mm.system.k_r
        measure = mm
        if depth > mm.dp.cap:
            if not adaptive:
                flagged.append((x, s, t))
                continue
            measure = MeasureM(mm.system, mm.dp.alpha, mm.dp.T, depth + 3, mm.dp.symmetric)
        rho = gibbs_star_ratio(measure, x, s, t)
        worst = max(worst, rho, 1 / rho)
    return bound_record("gibbs_star", fixture, worst, bound, samples=len(samples), flagged=len(flagged)), flagged


def proportionality(mm: MeasureM, oracle_mass, sets: Sequence[CylinderSet], tol: float = 0.05,
                    fixture: str = "", check: str = "two_sided_proportionality") -> CheckRecord:
    """Ratios ``m(Z) / oracle(Z)`` over ``sets``; passes when their spread is within ``tol``."""
    return spread_record(check, fixture, [mm(Z) / oracle_mass(Z) for Z in sets], tol)


def srb_main_check(system: SuspensionSystem, expansion: Sequence[float], sets: Sequence[CylinderSet],
                   cutoff_T: float = 10.0, depth_cap: int | None = None, tol: float = 0.05,
                   fixture: str = "", pressure_tol: float = 1e-6) -> CheckRecord:
    """``m`` at pressure 0 with weights ``prod lambda^{-1}`` against Bernoulli times Lebesgue."""
    P = flow_pressure(system)
    if abs(P) > pressure_tol:
        raise TwoSidedError(f"pressure {P:.3g} is not zero: not an attractor model")
    for s, lam in enumerate(expansion):
        if abs(system.step_psi.values[(s,)] + system.roof.values[(s,)] * math.log(lam)) > 1e-9:
            raise TwoSidedError("weights are not inverse expansion products")
    mm = MeasureM(system, 0.0, cutoff_T, depth_cap)
    om = flow_equilibrium(system)
    return proportionality(mm, lambda Z: gibbs_cylinder(om, Z), sets, tol, fixture, "srb_main")
