"""Bracket, flow displacements and the cocycles omega+ / omega-.

For locally constant data the improper orbit integrals collapse to finite
sums: once the potential window clears the last coordinate where two aligned
sequences disagree, the integrand vanishes.  Two points are aligned by their
epochs: ``y_i`` is compared with ``x_{i+s}`` where ``s = y.epoch - x.epoch``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .caratheodory import LeafProblem, cover_value
from .report import CheckRecord, ratio_record
from .system import CylinderSet, SuspensionSystem, SymbolicPoint, random_cycle, splice, with_future


class NotRelated(ValueError):
    """Points are not on a common weak-stable / weak-unstable set, or not bracketable."""


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def future_disagreement(x: SymbolicPoint, y: SymbolicPoint, s: int) -> int:
    """Last index ``i`` (y-coordinates) with ``y_i != x_{i+s}``; raises if tails never agree."""
    top = max(x.hi - s, y.hi) + 1
    period = _lcm(len(x.right_cycle), len(y.right_cycle))
    if any(y.symbol(i) != x.symbol(i + s) for i in range(top, top + period)):
        raise NotRelated("futures never agree")
    bottom = min(x.lo - s, y.lo) - _lcm(len(x.left_cycle), len(y.left_cycle))
    for i in range(top - 1, bottom - 1, -1):
        if y.symbol(i) != x.symbol(i + s):
            return i
    return bottom - 1


def past_disagreement(x: SymbolicPoint, y: SymbolicPoint, s: int) -> int:
    """First index ``i`` (y-coordinates) with ``y_i != x_{i+s}``; raises if pasts never agree."""
    bottom = min(x.lo - s, y.lo) - 1
    period = _lcm(len(x.left_cycle), len(y.left_cycle))
    if any(y.symbol(i) != x.symbol(i + s) for i in range(bottom - period + 1, bottom + 1)):
        raise NotRelated("pasts never agree")
    top = max(x.hi - s, y.hi) + _lcm(len(x.right_cycle), len(y.right_cycle))
    for i in range(bottom + 1, top + 1):
        if y.symbol(i) != x.symbol(i + s):
            return i
    return top + 1


def _forward_time(system: SuspensionSystem, p: SymbolicPoint, m: int) -> float:
    """Time from ``p`` to the bottom of the fiber over coordinate ``m >= 0``."""
    return sum(system.step_roof.at(p, i) for i in range(m)) - p.fiber


def _forward_phi(system: SuspensionSystem, p: SymbolicPoint, m: int) -> float:
    return sum(system.step_psi.at(p, i) for i in range(m)) - p.fiber * system.potential.at(p)


def _backward_time(system: SuspensionSystem, p: SymbolicPoint, m: int) -> float:
    """Time from the bottom of the fiber over coordinate ``-m`` up to ``p``."""
    return p.fiber + sum(system.step_roof.at(p, -i) for i in range(1, m + 1))


def _backward_phi(system: SuspensionSystem, p: SymbolicPoint, m: int) -> float:
    return p.fiber * system.potential.at(p) + sum(system.step_psi.at(p, -i) for i in range(1, m + 1))


@dataclass(frozen=True)
class CocycleValue:
    value: float
    truncation_depth: int
    exact: bool
    t: float


def _alignment(x: SymbolicPoint, y: SymbolicPoint, shift: int | None) -> int:
    return y.epoch - x.epoch if shift is None else shift


def stable_displacement(system: SuspensionSystem, x: SymbolicPoint, y: SymbolicPoint,
                        shift: int | None = None) -> tuple[float, int]:
    """``t(x, y)`` with ``f_t x`` strongly stable to ``y``, and the stabilization index."""
    s = _alignment(x, y, shift)
    d = future_disagreement(x, y, s)
    lo, _ = system.window
    n = max(d - lo + 1, 0, -s)
    return _forward_time(system, x, n + s) - _forward_time(system, y, n), n


def omega_plus(system: SuspensionSystem, x: SymbolicPoint, y: SymbolicPoint, P: float,
               shift: int | None = None) -> CocycleValue:
    s = _alignment(x, y, shift)
    d = future_disagreement(x, y, s)
    lo, hi = system.window
    n = max(d - lo + 1, 0, -s)

    def at(m):
        t = _forward_time(system, x, m + s) - _forward_time(system, y, m)
        return _forward_phi(system, x, m + s) - _forward_phi(system, y, m) - t * P, t

    v, t = at(n)
    v2, _ = at(n + hi - lo + 1)
    exact = abs(v - v2) <= 1e-9 * max(1.0, abs(v))
    return CocycleValue(v, n, exact, t)


def unstable_displacement(system: SuspensionSystem, x: SymbolicPoint, y: SymbolicPoint,
                          shift: int | None = None) -> float:
    """``t`` with ``f_t x`` strongly unstable to ``y``."""
    s = _alignment(x, y, shift)
    d = past_disagreement(x, y, s)
    _, hi = system.window
    n = max(hi - d + 1, s, 0)
    return _backward_time(system, y, n) - _backward_time(system, x, n - s)


def omega_minus(system: SuspensionSystem, x: SymbolicPoint, y: SymbolicPoint, P: float,
                shift: int | None = None) -> CocycleValue:
    s = _alignment(x, y, shift)
    d = past_disagreement(x, y, s)
    lo, hi = system.window
    n = max(hi - d + 1, s, 0)

    def at(m):
        t = _backward_time(system, y, m) - _backward_time(system, x, m - s)
        return _backward_phi(system, x, m - s) - _backward_phi(system, y, m) + t * P, t

    v, t = at(n)
    v2, _ = at(n + hi - lo + 1)
    exact = abs(v - v2) <= 1e-9 * max(1.0, abs(v))
    return CocycleValue(v, n, exact, t)


@dataclass(frozen=True)
class BracketResult:
    point: SymbolicPoint
    beta: float
    t_displacement: float


def bracket(system: SuspensionSystem, x: SymbolicPoint, y: SymbolicPoint) -> BracketResult:
    """``[x, y]``: the past of ``y`` (coordinates ``<= 0``) joined to the future of ``x``.

    The bracket sits at ``y``'s fiber height on ``y``'s unstable leaf.
    ``t_displacement`` is ``t(x, [x, y])`` and ``beta`` is ``t([x, y], x)``,
    the flow time carrying the bracket onto the strong-stable leaf of ``x``.
    """
    if x.symbol(0) != y.symbol(0) or x.epoch != y.epoch:
        raise NotRelated("not in same rectangle")
    if abs(x.fiber - y.fiber) >= system.min_roof / 2:
        raise NotRelated("not in same rectangle: fibers too far apart")
    z = splice(y, x, 0, fiber=y.fiber, epoch=y.epoch)
    if not system.sft.allowed(z.symbol(0), z.symbol(1)):
        raise NotRelated("not in same rectangle")
    t_xz, _ = stable_displacement(system, x, z)
    beta, _ = stable_displacement(system, z, x)
    return BracketResult(z, beta, t_xz)


def same_point(p: SymbolicPoint, q: SymbolicPoint, radius: int = 12, tol: float = 1e-12) -> bool:
    return p.word(-radius, radius) == q.word(-radius, radius) and abs(p.fiber - q.fiber) <= tol


def omega_minus_geometric(expansion: Sequence[float], z: SymbolicPoint, y: SymbolicPoint,
                          max_depth: int = 10_000) -> float:
    """Limit of ``prod det(Df_{-tau}|E^u(z)) / det(Df_{-tau}|E^u(y))`` for one-symbol rates.

    Along the past the unstable Jacobian at each backward crossing is the
    expansion rate of the symbol crossed; the product stops changing once
    the pasts agree.
    """
    s = y.epoch - z.epoch
    d = past_disagreement(z, y, s)
    ratio = 1.0
    for i in range(1, max_depth):
        if -i < d:
            break
        ratio *= expansion[y.symbol(-i)] / expansion[z.symbol(-i + s)]
    # once the pasts agree every later factor equals one
    return ratio


# -- measure-level checks -------------------------------------------------

def _future_words(system: SuspensionSystem, p: SymbolicPoint, base: dict[int, int], depth: int):
    """Admissible fillings of coordinates ``1..depth`` on the leaf of ``p`` extending ``base``."""
    words = [()]
    last = p.symbol(0)
    for c in range(1, depth + 1):
        nxt = []
        for w in words:
            prev = w[-1] if w else last
            for s in system.sft.successors(prev):
                if base.get(c, s) == s:
                    nxt.append(w + (s,))
        words = nxt
    return words


def _leaf_mass(system, P, point, constraints, cutoffs, depth_cap, height=None) -> float:
    prob = LeafProblem(system, point, -1, height)
    vals = [cover_value(prob, constraints, P, T, depth_cap).value for T in cutoffs]
    return vals[-1]


def check_conformality(system: SuspensionSystem, P: float, t: float, Z: CylinderSet,
                       point: SymbolicPoint, cutoffs: Sequence[float] = (18,), depth_cap: int = 40,
                       tol: float = 0.01, fixture: str = "") -> CheckRecord:
    """Compare ``m_{f_t W}(f_t Z)`` with ``int_Z exp(tP - Phi(z, t)) dm_W`` on the unstable leaf of ``point``."""
    if t < 0:
        raise ValueError("conformality check uses t >= 0")
    if system.roof.hi > 0:
        raise ValueError("conformality check needs a roof read on coordinates <= 0")
    base = {c: s for c, s in Z.constraints().items()}
    if any(c < 1 for c in base):
        raise ValueError("Z must be a forward cylinder on coordinates >= 1")
    lo, hi = system.window
    depth_Z = max(base) if base else 0
    depth = max(depth_Z, int(math.ceil((t + point.fiber) / system.min_roof)) + 1 + max(hi, 0))
    lhs = rhs = 0.0
    for w in _future_words(system, point, base, depth):
        z = with_future(system.sft, point, w)
        fz = system.flow(z, t)
        k = fz.epoch - z.epoch
        if k + max(hi, 0) > depth:
            raise ValueError("refinement depth too shallow for t")
        m_piece = _leaf_mass(system, P, z, dict(enumerate(w, 1)), cutoffs, depth_cap)
        rhs += math.exp(t * P - system.birkhoff(z, t)) * m_piece
        # the image of the piece is the cylinder on coordinates 1..depth-k of the leaf through f_t z
        image = {c - k: z.symbol(c) for c in range(k + 1, depth + 1)}
        lhs += _leaf_mass(system, P, fz, image, cutoffs, depth_cap)
    return ratio_record("conformality", fixture, lhs, rhs, tol, t=t, Z=_label(Z))


def _label(Z: CylinderSet) -> str:
    return f"{Z.lo}:{''.join(map(str, Z.word))}"


@dataclass(frozen=True)
class PastReplacement:
    """Weak-stable holonomy between unstable leaves: swap the past, keep the future.

    ``source`` and ``target`` fix the two leaves (coordinates ``<= 0`` and the
    fiber height of each).
    """

    source: SymbolicPoint
    target: SymbolicPoint

    def __call__(self, z: SymbolicPoint) -> SymbolicPoint:
        return splice(self.target, z, 0, fiber=self.target.fiber, epoch=self.target.epoch)


def holonomy_rn_check(system: SuspensionSystem, P: float, pi: PastReplacement, Z: CylinderSet,
                      cutoffs: Sequence[float] = (18,), depth_cap: int = 40, tol: float = 0.02,
                      fixture: str = "") -> CheckRecord:
    """Compare ``m_{W2}(pi Z)`` with ``int_Z exp(omega+(pi z, z)) dm_{W1}(z)``."""
    base = Z.constraints()
    if any(c < 1 for c in base):
        raise ValueError("Z must be a forward cylinder on coordinates >= 1")
    if system.roof.hi > 0:
        raise ValueError("holonomy check needs a roof read on coordinates <= 0")
    lo, hi = system.window
    depth = max(max(base) if base else 0, hi - lo, 1)
    x1, x2 = pi.source, pi.target
    lhs = rhs = 0.0
    for w in _future_words(system, x1, base, depth):
        if not system.sft.allowed(x2.symbol(0), w[0]):
            raise ValueError("past replacement does not map the leaves onto each other")
        z = with_future(system.sft, x1, w)
        pz = pi(z)
        cons = dict(enumerate(w, 1))
        om = omega_plus(system, pz, z, P, shift=0)
        rhs += math.exp(om.value) * _leaf_mass(system, P, z, cons, cutoffs, depth_cap)
        lhs += _leaf_mass(system, P, pz, cons, cutoffs, depth_cap)
    return ratio_record("holonomy_rn", fixture, lhs, rhs, tol, Z=_label(Z))


def random_weak_stable(system: SuspensionSystem, x: SymbolicPoint, rng, past_len: int = 4,
                       fiber_jitter: float | None = None) -> SymbolicPoint:
    """A point sharing ``x``'s future from coordinate 1 with a random past of the given length."""
    sft = system.sft
    jitter = system.min_roof / 4 if fiber_jitter is None else fiber_jitter
    for _ in range(1000):
        left = random_cycle(sft, rng, 3)
        w = [left[-1]]
        for _ in range(past_len):
            w.append(int(rng.choice(sft.successors(w[-1]))))
        if not sft.allowed(w[-1], x.symbol(1)):
            continue
        past = SymbolicPoint(tuple(w[1:]), 1 - past_len, left, (x.symbol(1),))
        f = float(rng.uniform(0, jitter))
        cand = splice(past, x, 0, fiber=f, epoch=x.epoch)
        if f < system.roof.at(cand):
            return cand
    raise RuntimeError("could not sample a weak-stable neighbor")


def random_weak_unstable(system: SuspensionSystem, x: SymbolicPoint, rng, future_len: int = 4,
                         fiber_jitter: float | None = None) -> SymbolicPoint:
    sft = system.sft
    jitter = system.min_roof / 4 if fiber_jitter is None else fiber_jitter
    for _ in range(1000):
        right = random_cycle(sft, rng, 3)
        w = [x.symbol(0)]
        for _ in range(future_len):
            w.append(int(rng.choice(sft.successors(w[-1]))))
        if not sft.allowed(w[-1], right[0]):
            continue
        fut = SymbolicPoint(tuple(w[1:]), 1, (w[0],), right)
        f = float(rng.uniform(0, jitter))
        cand = splice(x, fut, 0, fiber=f, epoch=x.epoch)
        if f < system.roof.at(cand):
            return cand
    raise RuntimeError("could not sample a weak-unstable neighbor")


Holonomy = Callable[[SymbolicPoint], SymbolicPoint]
