"""Product construction of the equilibrium measure on rectangles.

A rectangle around ``q`` (roof read on coordinate 0 only) is

    R_q = {z : z_0 = q_0, fiber(z) in [q.fiber - delta, q.fiber + delta]},

with ``R^u_q`` the futures on ``q``'s past at height ``q.fiber`` and
``R^cs_q`` the pasts on ``q``'s future across the fiber band.  All integrals
are finite sums over cylinder cells on which every density is constant in
the symbols.  In the fiber direction each log-density is affine, so the
fiber integrals are done in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .caratheodory import LeafDP, LeafProblem, cover_value
from .holonomy import bracket, omega_minus, omega_plus
from .oracle import flow_pressure
from .report import CheckRecord, ratio_record
from .system import (CylinderSet, SuspensionSystem, SymbolicPoint, completions, point_from_word, reflect,
                     with_future, with_past)


class ProductError(ValueError):
    pass


class ConsistencyError(ProductError):
    def __init__(self, message: str, records: list):
        super().__init__(message)
        self.records = records


def integrate_exp_affine(log_at, a: float, b: float) -> float:
    """``int_a^b exp(L(f)) df`` for a log-density ``L`` that is affine in ``f``."""
    if b <= a:
        return 0.0
    la, lb = log_at(a), log_at(b)
    mid = log_at(0.5 * (a + b))
    if abs(mid - 0.5 * (la + lb)) > 1e-8 * max(1.0, abs(mid)):
        raise ProductError("log-density is not affine along the fiber")
    d = lb - la
    if abs(d) < 1e-12:
        return (b - a) * math.exp(0.5 * (la + lb))
    # (e^lb - e^la) / d * (b - a), written to avoid cancellation
    return (b - a) * math.exp(la) * math.expm1(d) / d


@dataclass
class LeafMeasures:
    """Cached Carathéodory leaf measures at a fixed pressure, cutoff and cap.

    ``u`` and ``s`` return masses on unstable / stable leaves at an arbitrary
    height by rescaling the height-0 value with the exact conformal factor.
    """

    system: SuspensionSystem
    P: float
    cutoff_T: float = 18.0
    depth_cap: int = 40
    _cache: dict = field(default_factory=dict, repr=False)

    @cached_property
    def reversed_system(self) -> SuspensionSystem:
        return self.system.reversed()

    @cached_property
    def L_u(self) -> int:
        return LeafDP(self.system, self.P, 0.0, self.system.depth_offset + 1).L

    @cached_property
    def L_s(self) -> int:
        return LeafDP(self.reversed_system, self.P, 0.0, self.reversed_system.depth_offset + 1, sign=+1).L

    def u0(self, point: SymbolicPoint, constraints: dict[int, int]) -> float:
        """``m^u`` at height 0 on the leaf through ``point`` (coordinates ``<= 0``)."""
        state = point.word(1 - self.L_u, 0)
        key = ("u", state, tuple(sorted(constraints.items())))
        if key not in self._cache:
            prob = LeafProblem(self.system, point.with_fiber(0.0), -1)
            self._cache[key] = cover_value(prob, constraints, self.P, self.cutoff_T, self.depth_cap).value
        return self._cache[key]

    def s0(self, point: SymbolicPoint, constraints: dict[int, int]) -> float:
        """``m^s`` at height 0 on the stable leaf through ``point`` (coordinates ``>= 0``)."""
        state = point.word(0, self.L_s - 1)
        key = ("s", state, tuple(sorted(constraints.items())))
        if key not in self._cache:
            y = reflect(point.with_fiber(0.0))
            prob = LeafProblem(self.reversed_system, y, +1)
            ycons = {-c: s for c, s in constraints.items()}
            self._cache[key] = cover_value(prob, ycons, self.P, self.cutoff_T, self.depth_cap).value
        return self._cache[key]

    def phi(self, z: SymbolicPoint) -> float:
        return self.system.potential.at(z)

    def log_u(self, z: SymbolicPoint, constraints: dict[int, int], h: float) -> float:
        """Log ``m^u`` at height ``h`` of the cell through ``z``; ``z`` carries the cell's symbols."""
        return -h * (self.phi(z) - self.P) + math.log(self.u0(z, constraints))

    def log_s(self, z: SymbolicPoint, constraints: dict[int, int], h: float) -> float:
        return h * (self.phi(z) - self.P) + math.log(self.s0(z, constraints))


def _words(sft, first: int | None, length: int, fixed: dict[int, int], start: int, forward: bool):
    """Admissible words on ``start..start+length-1`` next to symbol ``first`` matching ``fixed``."""
    out = [()]
    coords = range(start, start + length)
    if forward:
        for c in coords:
            nxt = []
            for w in out:
                prev = w[-1] if w else first
                for s in (sft.successors(prev) if prev is not None else range(sft.alphabet_size)):
                    if fixed.get(c, s) == s:
                        nxt.append(w + (s,))
            out = nxt
        return out
    for c in reversed(coords):
        nxt = []
        for w in out:
            after = w[0] if w else first
            for s in range(sft.alphabet_size):
                if (after is None or sft.allowed(s, after)) and fixed.get(c, s) == s:
                    nxt.append((s,) + w)
        out = nxt
    return out


@dataclass(frozen=True)
class Rectangle:
    system: SuspensionSystem
    q: SymbolicPoint
    delta: float

    def __post_init__(self):
        roof = self.system.roof
        if roof.lo != 0 or roof.hi != 0:
            raise ProductError("rectangles need a roof read on coordinate 0 only")
        r = roof.at(self.q)
        if self.q.fiber - self.delta < -1e-12 or self.q.fiber + self.delta > r + 1e-12:
            raise ProductError("fiber band leaves the fiber over q_0")
        if self.q.epoch != 0:
            raise ProductError("rectangle centers use epoch 0")
        if self.delta > self.system.min_roof / 4 + 1e-12:
            raise ProductError("delta must not exceed min roof / 4")

    @property
    def band(self) -> tuple[float, float]:
        return self.q.fiber - self.delta, self.q.fiber + self.delta

    @property
    def symbol(self) -> int:
        return self.q.symbol(0)

    def contains(self, Z: CylinderSet) -> bool:
        cons = Z.constraints()
        if cons.get(0) != self.symbol:
            return False
        a, b = Z.fiber if Z.fiber is not None else (0.0, self.system.roof.at(self.q))
        lo, hi = self.band
        return lo - 1e-12 <= a and b <= hi + 1e-12

    def psi(self, x: SymbolicPoint, y: SymbolicPoint) -> SymbolicPoint:
        return bracket(self.system, x, y).point


def make_rectangle(system: SuspensionSystem, symbol: int, center: float | None = None,
                   past: Sequence[int] = (), future: Sequence[int] = ()) -> Rectangle:
    """Rectangle around a point with ``q_0 = symbol`` and optional past/future words."""
    delta = system.min_roof / 4
    sft = system.sft
    q = point_from_word(sft, (symbol,), 0, fiber=system.min_roof / 2 if center is None else center)
    if past:
        q = with_past(sft, q, past)
    if future:
        q = with_future(sft, q, future)
    return Rectangle(system, q, delta)


@dataclass
class ProductMeasure:
    """``mu_q`` on one rectangle, with all four formulas available."""

    rect: Rectangle
    leaves: LeafMeasures

    @property
    def system(self) -> SuspensionSystem:
        return self.rect.system

    @property
    def P(self) -> float:
        return self.leaves.P

    def _depths(self, Z: CylinderSet) -> tuple[int, int]:
        lo, hi = self.system.window
        w = hi - lo + 1
        dx = max(Z.hi if Z.word else 0, w, self.leaves.L_s - 1, 1)
        dy = max(-Z.lo if Z.word else 0, w, self.leaves.L_u - 1, 1)
        return dx, dy

    def _cells(self, Z: CylinderSet):
        if not self.rect.contains(Z):
            raise ProductError("Z is not contained in the rectangle")
        cons = Z.constraints()
        dx, dy = self._depths(Z)
        sft = self.system.sft
        q0 = self.rect.symbol
        futures = _words(sft, q0, dx, cons, 1, True)
        pasts = _words(sft, q0, dy, cons, -dy, False)
        a, b = Z.fiber if Z.fiber is not None else self.rect.band
        return futures, pasts, (a, b), dx, dy

    def _x(self, w):
        return with_future(self.system.sft, self.rect.q, w)

    def _y(self, v, f):
        return with_past(self.system.sft, self.rect.q, v).with_fiber(f)

    @staticmethod
    def _fcons(w):
        return dict(enumerate(w, 1))

    @staticmethod
    def _pcons(v):
        return dict(zip(range(-len(v), 0), v))

    def value(self, Z: CylinderSet, formula: int = 1) -> float:
        return {1: self.formula1, 2: self.formula2, 3: self.formula3, 4: self.formula4}[formula](Z)

    def formula2(self, Z: CylinderSet) -> float:
        """Double integral of ``h_q(x, y)`` over ``R^u_q x R^cs_q``."""
        futures, pasts, (a, b), _, _ = self._cells(Z)
        lm, P, sys_ = self.leaves, self.P, self.system
        c = self.rect.q.fiber
        total = 0.0
        for w in futures:
            x = self._x(w)
            lu = lm.log_u(x, self._fcons(w), c)
            for v in pasts:
                ls0 = math.log(lm.s0(self.rect.q, self._pcons(v)))

                def L(f, x=x, v=v, lu=lu, ls0=ls0):
                    y = self._y(v, f)
                    z = bracket(sys_, x, y).point
                    dens = omega_plus(sys_, z, x, P).value + omega_minus(sys_, z, y, P).value
                    return dens + lu + ls0 + f * (lm.phi(y) - P)

                total += integrate_exp_affine(L, a, b)
        return total

    def formula1(self, Z: CylinderSet) -> float:
        """Integral over ``Z`` of ``exp(omega+(z,[z,q]) + omega-(z,[q,z]))`` against the pushed product."""
        futures, pasts, (a, b), _, _ = self._cells(Z)
        lm, P, sys_, q = self.leaves, self.P, self.system, self.rect.q
        c = q.fiber
        total = 0.0
        for v in pasts:
            for w in futures:
                cell = with_future(sys_.sft, with_past(sys_.sft, q, v), w)

                def L(f, cell=cell, v=v, w=w):
                    z = cell.with_fiber(f)
                    x = bracket(sys_, z, q).point      # [z, q]
                    y = bracket(sys_, q, z).point      # [q, z]
                    dens = omega_plus(sys_, z, x, P).value + omega_minus(sys_, z, y, P).value
                    return (dens + lm.log_u(x, self._fcons(w), c)
                            + math.log(lm.s0(q, self._pcons(v))) + f * (lm.phi(y) - P))

                total += integrate_exp_affine(L, a, b)
        return total

    def formula3(self, Z: CylinderSet) -> float:
        """Unstable conditionals: ``int int exp(omega-(z, y)) dm^u_y(z) dm^cs_q(y)``."""
        futures, pasts, (a, b), _, _ = self._cells(Z)
        lm, P, sys_ = self.leaves, self.P, self.system
        total = 0.0
        for v in pasts:
            ls0 = math.log(lm.s0(self.rect.q, self._pcons(v)))
            for w in futures:

                def L(f, v=v, w=w, ls0=ls0):
                    y = self._y(v, f)
                    z = with_future(sys_.sft, y, w)
                    return (omega_minus(sys_, z, y, P).value + lm.log_u(z, self._fcons(w), f)
                            + ls0 + f * (lm.phi(y) - P))

                total += integrate_exp_affine(L, a, b)
        return total

    def formula4(self, Z: CylinderSet) -> float:
        """Weak-stable conditionals: ``int int exp(omega+(z, x)) dm^cs_x(z) dm^u_q(x)``."""
        futures, pasts, (a, b), _, _ = self._cells(Z)
        lm, P, sys_ = self.leaves, self.P, self.system
        c = self.rect.q.fiber
        total = 0.0
        for w in futures:
            x = self._x(w)
            lu = lm.log_u(x, self._fcons(w), c)
            for v in pasts:
                ls0 = math.log(lm.s0(x, self._pcons(v)))

                def L(f, x=x, v=v, lu=lu, ls0=ls0):
                    z = with_past(sys_.sft, x, v).with_fiber(f)
                    return omega_plus(sys_, z, x, P).value + lu + ls0 + f * (lm.phi(z) - P)

                total += integrate_exp_affine(L, a, b)
        return total

    # -- conditionals ----------------------------------------------------

    def h_holonomy(self, v: Sequence[int], f: float, depth: int | None = None) -> float:
        """``h(y) = int exp(omega+([x, y], x)) dm^u_q(x)`` for ``y`` on the past cell ``v`` at height ``f``."""
        sys_, lm, P = self.system, self.leaves, self.P
        dx = depth or self._depths(CylinderSet(0, (self.rect.symbol,)))[0]
        y = self._y(v, f)
        c = self.rect.q.fiber
        total = 0.0
        for w in _words(sys_.sft, self.rect.symbol, dx, {}, 1, True):
            x = self._x(w)
            z = bracket(sys_, x, y).point
            total += math.exp(omega_plus(sys_, z, x, P).value + lm.log_u(x, self._fcons(w), c))
        return total

    def h_leaf(self, v: Sequence[int], f: float, depth: int | None = None) -> float:
        """``h(y) = m^u_y(R^u_q(y))``: the whole local unstable leaf through ``y``."""
        sys_, lm = self.system, self.leaves
        dx = depth or self._depths(CylinderSet(0, (self.rect.symbol,)))[0]
        y = self._y(v, f)
        total = 0.0
        for w in _words(sys_.sft, self.rect.symbol, dx, {}, 1, True):
            z = with_future(sys_.sft, y, w)
            total += math.exp(lm.log_u(z, self._fcons(w), f))
        return total

    def reconstruct_from_conditionals(self, Z: CylinderSet, nodes: int = 24) -> float:
        """Rebuild ``mu_q(Z)`` from ``d mu_hat = h dm^cs`` and ``d mu^u_y = exp(omega-) / h dm^u_y``.

        The fiber integral is done by Gauss-Legendre quadrature since ``h`` is a
        sum of exponentials in the height.
        """
        futures, pasts, (a, b), _, _ = self._cells(Z)
        lm, P, sys_ = self.leaves, self.P, self.system
        xs, ws = np.polynomial.legendre.leggauss(nodes)
        fs = 0.5 * (b - a) * xs + 0.5 * (a + b)
        total = 0.0
        for v in pasts:
            s0 = lm.s0(self.rect.q, self._pcons(v))
            for f, wt in zip(fs, ws):
                y = self._y(v, float(f))
                h = self.h_holonomy(v, float(f))
                cond = 0.0
                for w in futures:
                    z = with_future(sys_.sft, y, w)
                    cond += math.exp(omega_minus(sys_, z, y, P).value
                                     + lm.log_u(z, self._fcons(w), float(f))) / h
                mu_hat = h * s0 * math.exp(float(f) * (lm.phi(y) - P))
                total += 0.5 * (b - a) * wt * cond * mu_hat
        return total


def weak_leaf_measure(leaves: LeafMeasures, point: SymbolicPoint, Z: CylinderSet) -> float:
    """``m^cs`` of a backward cylinder times a fiber interval on the weak-stable leaf of ``point``.

    ``m^cs(C x [a, b)) = int_a^b m^s_{height f}(C) df`` with the stable measure at
    height ``f`` obtained from height 0 by the factor ``exp(f (phi - P))``.
    """
    sys_ = leaves.system
    cons = Z.constraints()
    if any(c >= 0 and s != point.symbol(c) for c, s in cons.items()):
        return 0.0
    past = {c: s for c, s in cons.items() if c < 0}
    a, b = Z.fiber if Z.fiber is not None else (0.0, sys_.roof.at(point))
    if b <= a:
        return 0.0
    lo, _ = sys_.window
    depth = max([-c for c in past] + [-lo, leaves.L_s - 1, 0])
    total = 0.0
    for v in _words(sys_.sft, point.symbol(0), depth, past, -depth, False) if depth else [()]:
        z = with_past(sys_.sft, point, v) if v else point
        vc = dict(zip(range(-len(v), 0), v))
        total += integrate_exp_affine(lambda f, z=z, vc=vc: leaves.log_s(z, vc, f), a, b)
    return total


# -- global patching ---------------------------------------------------------

def fiber_bands(system: SuspensionSystem, symbol: int, roof_value: float) -> list[tuple[float, float, float]]:
    """Tiling of ``[0, roof)`` into bands of width ``2 delta``; each entry is ``(a, b, center)``."""
    delta = system.min_roof / 4
    out, a = [], 0.0
    while a < roof_value - 1e-12:
        b = min(a + 2 * delta, roof_value)
        out.append((a, b, min(a + delta, roof_value - delta)))
        a = b
    return out


@dataclass
class MeasureTable:
    entries: dict = field(default_factory=dict)
    source: str = ""
    normalized: dict | None = None


@dataclass
class GlobalProductMeasure:
    """Patches ``mu_q`` over rectangles tiling each fiber into bands."""

    system: SuspensionSystem
    leaves: LeafMeasures
    formula: int = 3
    _rects: dict = field(default_factory=dict, repr=False)
    _total: float | None = field(default=None, repr=False)

    def rectangle(self, symbol: int, center: float) -> ProductMeasure:
        key = (symbol, round(center, 12))
        if key not in self._rects:
            self._rects[key] = ProductMeasure(make_rectangle(self.system, symbol, center), self.leaves)
        return self._rects[key]

    def measure(self, Z: CylinderSet) -> float:
        """Unnormalized ``mu(Z)``; ``Z`` may span several bands or leave coordinate 0 free."""
        sys_ = self.system
        cons = Z.constraints()
        symbols = [cons[0]] if 0 in cons else list(range(sys_.sft.alphabet_size))
        total = 0.0
        for s in symbols:
            full = dict(cons)
            full[0] = s
            lo, hi = min(full), max(full)
            word = tuple(full.get(c) for c in range(lo, hi + 1))
            if any(v is None for v in word):
                # fill gaps by summing over admissible words
                total += sum(self.measure(CylinderSet(lo, w, Z.fiber))
                             for w in completions(sys_.sft, full, lo, hi))
                continue
            if not sys_.sft.admissible(word):
                continue
            r = sys_.roof.values[(s,)]
            a, b = Z.fiber if Z.fiber is not None else (0.0, r)
            for ba, bb, center in fiber_bands(sys_, s, r):
                lo_f, hi_f = max(a, ba), min(b, bb)
                if hi_f > lo_f:
                    pm = self.rectangle(s, center)
                    total += pm.value(CylinderSet(lo, word, (lo_f, hi_f)), self.formula)
        return total

    @property
    def total_mass(self) -> float:
        if self._total is None:
            self._total = self.measure(CylinderSet(0, ()))
        return self._total

    def normalized(self, Z: CylinderSet) -> float:
        return self.measure(Z) / self.total_mass


def patch_global(measures: Sequence[ProductMeasure], Z_list: Iterable[CylinderSet], tol: float = 1e-6,
                 formula: int = 1) -> MeasureTable:
    """Value of each ``Z`` from every rectangle containing it; overlaps must agree."""
    table = MeasureTable(source="product")
    bad = []
    for Z in Z_list:
        vals = [pm.value(Z, formula) for pm in measures if pm.rect.contains(Z)]
        if not vals:
            raise ProductError(f"no rectangle contains {Z}")
        lo, hi = min(vals), max(vals)
        if hi - lo > tol * max(abs(hi), 1e-300):
            bad.append((Z, vals))
        table.entries[(Z.lo, Z.word, Z.fiber)] = vals[0]
    if bad:
        raise ConsistencyError(f"{len(bad)} sets disagree across rectangles", bad)
    return table


def product_gibbs_ratio(gpm: GlobalProductMeasure, samples, fixture: str = "") -> float:
    """Largest ``max(rho, 1/rho)`` over ``(x, t)``, ``rho = mu(ball) / exp(S_n(Psi - P roof))``.

    The ball is the cylinder on ``0..n-1`` over the fiber band holding ``x``.
    """
    sys_ = gpm.system
    P = gpm.leaves.P
    worst = 1.0
    for x, t in samples:
        n = sys_.crossings_forward(x.with_fiber(0.0), t)
        word = x.word(0, n - 1)
        r = sys_.roof.at(x)
        band = next((a, b) for a, b, _ in fiber_bands(sys_, x.symbol(0), r) if a <= x.fiber < b)
        mass = gpm.normalized(CylinderSet(0, word, band))
        logw = sum(sys_.step_psi.at(x, i) - P * sys_.step_roof.at(x, i) for i in range(n))
        rho = mass / math.exp(logw)
        worst = max(worst, rho, 1 / rho)
    return worst


def flow_invariance_product(pm: ProductMeasure, Z: CylinderSet, tau: float, formula: int = 1,
                            tol: float = 0.01, fixture: str = "") -> CheckRecord:
    a, b = Z.fiber
    moved = CylinderSet(Z.lo, Z.word, (a + tau, b + tau))
    return ratio_record("product_flow_invariance", fixture, pm.value(moved, formula), pm.value(Z, formula),
                        tol, tau=tau)


def conditional_density(pm: ProductMeasure, v: Sequence[int], f: float, tol: float = 0.01,
                        fixture: str = "") -> CheckRecord:
    """Both expressions for ``h(y)``: holonomy integral versus leaf mass."""
    return ratio_record("conditional_density", fixture, pm.h_holonomy(v, f), pm.h_leaf(v, f), tol,
                        past="".join(map(str, v)), height=f)


# -- SRB product -------------------------------------------------------------

def srb_product(system: SuspensionSystem, expansion: Sequence[float], rect: Rectangle, Z: CylinderSet,
                leaves: LeafMeasures | None = None, pressure_tol: float = 1e-6) -> float:
    """``int nu^u_y(Z cap R^u_q(y)) d nu^cs_q(y)`` with leaf volume and unstable Jacobians.

    ``leaves`` must be built at pressure 0; the stable part then carries the
    weights ``det(Df_{-t}|E^u)`` of the backward covers.
    """
    P = flow_pressure(system)
    if abs(P) > pressure_tol:
        raise ProductError(f"geometric pressure {P:.3g} is not zero: not an attractor model")
    lam = list(expansion)
    for s in range(system.sft.alphabet_size):
        if abs(system.potential.values.get((s,), math.nan) + math.log(lam[s])) > 1e-9:
            raise ProductError("potential is not the geometric potential of the given expansion rates")
    leaves = leaves or LeafMeasures(system, 0.0)
    pm = ProductMeasure(rect, leaves)
    futures, pasts, (a, b), _, _ = pm._cells(Z)
    q0 = rect.symbol
    total = 0.0
    for v in pasts:
        s0 = leaves.s0(rect.q, pm._pcons(v))
        for w in futures:
            # base interval length of the cell: the factor for z_0 fixes the relative
            # weight of rectangles over different symbols
            vol0 = math.prod(1.0 / lam[s] for s in (q0,) + tuple(w))

            def L(f, v=v, w=w):
                y = pm._y(v, f)
                z = with_future(system.sft, y, w)
                # leaf volume at height f grows by lambda(q_0)^f; nu^cs density shrinks by the same
                return (omega_minus(system, z, y, 0.0).value + math.log(vol0) + f * math.log(lam[q0])
                        + math.log(s0) + f * leaves.phi(y))

            total += integrate_exp_affine(L, a, b)
    return total


def srb_product_global(system: SuspensionSystem, expansion: Sequence[float], Z: CylinderSet,
                       leaves: LeafMeasures | None = None) -> float:
    """Sum of ``srb_product`` over the band rectangles covering ``Z``."""
    leaves = leaves or LeafMeasures(system, 0.0)
    cons = Z.constraints()
    symbols = [cons[0]] if 0 in cons else list(range(system.sft.alphabet_size))
    total = 0.0
    for s in symbols:
        full = dict(cons)
        full[0] = s
        lo, hi = min(full), max(full)
        for w in completions(system.sft, full, lo, hi):
            r = system.roof.values[(s,)]
            a, b = Z.fiber if Z.fiber is not None else (0.0, r)
            for ba, bb, center in fiber_bands(system, s, r):
                lo_f, hi_f = max(a, ba), min(b, bb)
                if hi_f > lo_f:
                    rect = make_rectangle(system, s, center)
                    total += srb_product(system, expansion, rect, CylinderSet(lo, w, (lo_f, hi_f)), leaves)
    return total
