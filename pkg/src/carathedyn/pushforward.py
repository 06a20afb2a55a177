"""Time-averaged pushforwards of an unstable leaf measure.

``nu_t(Z) = (1/t) int_0^t m^u_x(f_{-s} Z) ds`` for a plaque through ``x``.
With a constant roof, ``f_{-s} Z`` meets the plaque in a forward cylinder (or
the whole plaque, or nothing) that only changes when the flowed height
crosses a fiber endpoint of ``Z`` or the roof.  The integrand is therefore
piecewise constant, and each piece is integrated exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .caratheodory import LeafProblem, cover_value
from .oracle import flow_equilibrium, gibbs_cylinder
from .report import CheckRecord, bound_record, ratio_record
from .system import CylinderSet, SuspensionSystem, SymbolicPoint

EDGE = 1e-12


class PushforwardError(ValueError):
    pass


@dataclass
class AveragedPushforward:
    base_leaf_mass: float
    t: float
    quadrature_step: float
    values: dict = field(default_factory=dict)


class LeafPushforward:
    """Averaged pushforwards of ``m^u`` on the plaque through ``point`` at its own height."""

    def __init__(self, system: SuspensionSystem, P: float, point: SymbolicPoint, cutoff_T: float = 18.0,
                 depth_margin: int = 24, quadrature_step: float | None = None):
        if not system.constant_roof:
            raise PushforwardError("pushforward averaging needs a constant roof")
        self.system = system
        self.P = P
        self.point = point
        self.r = system.min_roof
        self.cutoff_T = cutoff_T
        self.depth_margin = depth_margin
        self.quadrature_step = quadrature_step if quadrature_step is not None else 0.05 * system.min_roof
        self.problem = LeafProblem(system, point, -1)
        self._cache: dict = {}

    def leaf_mass(self, constraints: dict[int, int]) -> float:
        key = tuple(sorted(constraints.items()))
        if key not in self._cache:
            deepest = max([0] + list(constraints))
            cap = max(deepest, 0) + self.depth_margin
            self._cache[key] = cover_value(self.problem, constraints, self.P, self.cutoff_T, cap).value
        return self._cache[key]

    @property
    def plaque_mass(self) -> float:
        return self.leaf_mass({})

    def _fiber(self, Z: CylinderSet) -> tuple[float, float]:
        a, b = Z.fiber if Z.fiber is not None else (0.0, self.r)
        return max(a, 0.0), min(b, self.r)

    def integrand(self, Z: CylinderSet, s: float) -> float:
        """``m^u_x(f_{-s} Z)``."""
        total = self.point.fiber + s
        j = math.floor(total / self.r + EDGE)
        height = total - j * self.r
        a, b = self._fiber(Z)
        if not (a - EDGE <= height < b - EDGE):
            return 0.0
        cons = {}
        for c, sym in Z.constraints().items():
            c += j
            if c <= 0:
                if self.point.symbol(c) != sym:
                    return 0.0
            else:
                cons[c] = sym
        return self.leaf_mass(cons)

    def breakpoints(self, Z: CylinderSet, t: float) -> list[float]:
        """Times in ``[0, t]`` where the integrand may jump."""
        h = self.point.fiber
        a, b = self._fiber(Z)
        pts = {0.0, t}
        j = math.floor(h / self.r)
        while j * self.r - h <= t:
            for e in (0.0, a, b):
                s = j * self.r + e - h
                if 0.0 < s < t:
                    pts.add(s)
            j += 1
        return sorted(pts)

    def nu_t(self, Z: CylinderSet, t: float) -> float:
        if t <= 0:
            raise PushforwardError("t must be positive")
        pts = self.breakpoints(Z, t)
        total = 0.0
        for s0, s1 in zip(pts, pts[1:]):
            if s1 - s0 > 1e-14:
                total += (s1 - s0) * self.integrand(Z, 0.5 * (s0 + s1))
        return total / t

    def averaged(self, sets: Sequence[CylinderSet], t: float) -> AveragedPushforward:
        out = AveragedPushforward(self.plaque_mass, t, self.quadrature_step)
        for Z in sets:
            out.values[(Z.lo, Z.word, Z.fiber)] = self.nu_t(Z, t)
        return out


def cylinder_algebra(system: SuspensionSystem, depth: int) -> list[CylinderSet]:
    """Two-sided words on ``[-floor(d/2), ceil(d/2)-1]`` times the two fiber halves."""
    if not 1 <= depth <= 3:
        raise PushforwardError("algebra depth must be 1, 2 or 3")
    r = system.min_roof
    lo = -(depth // 2)
    halves = [(0.0, r / 2), (r / 2, r)]
    return [CylinderSet(lo, w, f) for w in system.sft.words(depth) for f in halves]


def tv_to_oracle(lp: LeafPushforward, t: float, depth: int, oracle=None) -> float:
    sets = cylinder_algebra(lp.system, depth)
    om = oracle or flow_equilibrium(lp.system, lp.P)
    nu = [lp.nu_t(Z, t) for Z in sets]
    mu = [gibbs_cylinder(om, Z) for Z in sets]
    sn, sm = sum(nu), sum(mu)
    return 0.5 * sum(abs(a / sn - b / sm) for a, b in zip(nu, mu))


def mass_conservation(lp: LeafPushforward, t: float, tol: float = 0.01, fixture: str = "") -> CheckRecord:
    whole = CylinderSet(0, ())
    return ratio_record("pushforward_mass", fixture, lp.nu_t(whole, t), lp.plaque_mass, tol, t=t)


def cesaro_check(lp: LeafPushforward, Z: CylinderSet, t: float, eta: float, fixture: str = "") -> CheckRecord:
    """``|nu_{t+eta}(Z) - nu_t(Z)| <= 2 eta m^u(plaque) / (t + eta)``."""
    gap = abs(lp.nu_t(Z, t + eta) - lp.nu_t(Z, t))
    bound = 2 * eta * lp.plaque_mass / (t + eta)
    return bound_record("cesaro_stability", fixture, gap, bound * (1 + 1e-9), t=t, eta=eta)


def convergence_table(lp: LeafPushforward, ts: Sequence[float], depth: int) -> list[dict]:
    om = flow_equilibrium(lp.system, lp.P)
    return [{"t": t, "depth": depth, "tv_distance": tv_to_oracle(lp, t, depth, om)} for t in ts]


def nonincreasing(values: Sequence[float], slack: float = 0.10) -> bool:
    return all(b <= a * (1 + slack) for a, b in zip(values, values[1:]))
