"""Perron-Frobenius ground truth for pressures and Gibbs masses.

Everything here is independent of the cover machinery: pressures come from
spectral radii of weighted transition matrices on lifted words, and masses
from the associated Markov (Gibbs) measures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .system import (CylinderSet, LocallyConstantFunction, Sft, SuspensionSystem, SymbolicPoint,
                     reflect)

MAX_CYLINDER_SPAN = 5000


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class WeightedMatrix:
    """Transition matrix on admissible words of the weight window ``[lo, hi]``.

    State ``u`` at position ``i`` is the word on coordinates ``i+lo..i+hi``;
    ``M[u, v] = exp(weight(u))`` whenever ``v`` can follow ``u``.
    """

    sft: Sft
    lo: int
    hi: int
    states: tuple[tuple[int, ...], ...]
    log_weights: np.ndarray
    adjacency: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.exp(self.log_weights)[:, None] * self.adjacency

    @property
    def dimension(self) -> int:
        return len(self.states)


def weighted_matrix(sft: Sft, weight: LocallyConstantFunction) -> WeightedMatrix:
    lo, hi = weight.lo, weight.hi
    states = tuple(sft.words(hi - lo + 1))
    index = {u: j for j, u in enumerate(states)}
    adj = np.zeros((len(states), len(states)))
    for j, u in enumerate(states):
        for s in sft.successors(u[-1]):
            adj[j, index[u[1:] + (s,)]] = 1.0
    logw = np.array([weight.values[u] for u in states], dtype=float)
    return WeightedMatrix(sft, lo, hi, states, logw, adj)


@dataclass(frozen=True)
class PerronData:
    eigenvalue: float
    left: np.ndarray
    right: np.ndarray
    residual: float


def perron(M: np.ndarray, tol: float = 1e-15, max_iter: int = 200_000) -> PerronData:
    """Power iteration for the Perron root and positive eigenvectors of a primitive matrix."""
    n = M.shape[0]
    # scale so the iteration never overflows
    scale = M.max()
    if not scale > 0:
        raise OracleError("weighted matrix is identically zero")
    A = M / scale

    def iterate(B):
        v = np.full(n, 1.0 / n)
        for _ in range(max_iter):
            w = B @ v
            w /= w.sum()
            if np.max(np.abs(w - v)) < tol:
                return w
            v = w
        raise OracleError("power iteration did not converge")

    right = iterate(A)
    left = iterate(A.T)
    lam = float((A @ right).sum() / right.sum()) * scale
    left = left / float(left @ right)
    residual = float(np.max(np.abs(M @ right - lam * right)) / lam)
    residual_left = float(np.max(np.abs(left @ M - lam * left)) / lam / max(left.max(), 1.0))
    residual = max(residual, residual_left)
    if residual > 1e-10 or (right <= 0).any() or (left <= 0).any():
        raise OracleError(f"Perron data failed validation (residual {residual:.2e})")
    return PerronData(lam, left, right, residual)


def shift_pressure(system: SuspensionSystem | Sft, weight: LocallyConstantFunction) -> float:
    sft = system.sft if isinstance(system, SuspensionSystem) else system
    return math.log(perron(weighted_matrix(sft, weight).matrix).eigenvalue)


def _flow_weight(system: SuspensionSystem, c: float) -> LocallyConstantFunction:
    return system.step_psi.combine(system.step_roof, lambda psi, r: psi - c * r, system.sft)


def flow_pressure(system: SuspensionSystem, tol: float = 1e-13) -> float:
    """The unique ``c`` with ``shift_pressure(Psi - c * roof) = 0``."""
    bound = system.potential.sup_norm() + math.log(system.sft.alphabet_size) / system.min_roof
    lo_c, hi_c = -bound - 1.0, bound + 1.0
    f_lo = shift_pressure(system, _flow_weight(system, lo_c))
    f_hi = shift_pressure(system, _flow_weight(system, hi_c))
    if not (f_lo > 0 > f_hi):
        raise OracleError("flow pressure bisection failed to bracket a root")
    while hi_c - lo_c > tol:
        mid = 0.5 * (lo_c + hi_c)
        f_mid = shift_pressure(system, _flow_weight(system, mid))
        if not (f_hi - 1e-12 <= f_mid <= f_lo + 1e-12):
            raise OracleError("shift pressure is not monotone in c")
        if f_mid > 0:
            lo_c, f_lo = mid, f_mid
        else:
            hi_c, f_hi = mid, f_mid
    return 0.5 * (lo_c + hi_c)


@dataclass(frozen=True)
class OracleMeasure:
    system: SuspensionSystem
    wm: WeightedMatrix
    perron: PerronData
    pressure: float
    roof_mean: float
    kind: str
    _roof: LocallyConstantFunction = field(repr=False, default=None)


def shift_gibbs(system: SuspensionSystem, weight: LocallyConstantFunction) -> OracleMeasure:
    lo, hi = min(weight.lo, system.roof.lo, 0), max(weight.hi, system.roof.hi, 0)
    w = weight.lift(lo, hi, system.sft)
    wm = weighted_matrix(system.sft, w)
    pd = perron(wm.matrix)
    om = OracleMeasure(system, wm, pd, math.log(pd.eigenvalue), 1.0, "shift_gibbs",
                       system.roof.lift(lo, hi, system.sft))
    return om


def flow_equilibrium(system: SuspensionSystem, pressure: float | None = None) -> OracleMeasure:
    P = flow_pressure(system) if pressure is None else pressure
    w = _flow_weight(system, P)
    lo, hi = min(w.lo, 0), max(w.hi, 0)
    w = w.lift(lo, hi, system.sft)
    wm = weighted_matrix(system.sft, w)
    pd = perron(wm.matrix)
    roof = system.roof.lift(lo, hi, system.sft)
    base = OracleMeasure(system, wm, pd, P, 1.0, "flow_equilibrium", roof)
    mean = sum(_markov_mass(base, dict(zip(range(lo, hi + 1), u))) * roof.values[u] for u in wm.states)
    return OracleMeasure(system, wm, pd, P, mean, "flow_equilibrium", roof)


def _masks(om: OracleMeasure, constraints: Mapping[int, int], i0: int, i1: int) -> list[np.ndarray]:
    wm = om.wm
    out = []
    for i in range(i0, i1 + 1):
        fixed = [(c - i - wm.lo, s) for c, s in constraints.items() if i + wm.lo <= c <= i + wm.hi]
        out.append(np.array([all(u[j] == s for j, s in fixed) for u in wm.states], dtype=float))
    return out


def _markov_mass(om: OracleMeasure, constraints: Mapping[int, int]) -> float:
    """Mass of the base cylinder ``{x : x_c = s for c, s in constraints}``."""
    if not constraints:
        return 1.0
    a, b = min(constraints), max(constraints)
    if b - a > MAX_CYLINDER_SPAN:
        raise OracleError("cylinder window exceeds supported length")
    wm, pd = om.wm, om.perron
    i0 = a - wm.lo
    i1 = max(i0, b - wm.hi)
    masks = _masks(om, constraints, i0, i1)
    M = wm.matrix / pd.eigenvalue
    v = pd.left * masks[0]
    for m in masks[1:]:
        v = (v @ M) * m
    return float(v @ pd.right)


def _refine_for_roof(om: OracleMeasure, constraints: dict[int, int]) -> list[dict[int, int]]:
    """Split a cylinder until the roof at coordinate 0 is determined."""
    roof = om._roof
    if all(c in constraints for c in range(roof.lo, roof.hi + 1)):
        return [constraints]
    out = []
    for w in om.system.sft.words(roof.width):
        if all(constraints.get(roof.lo + j, s) == s for j, s in enumerate(w)):
            d = dict(constraints)
            d.update({roof.lo + j: s for j, s in enumerate(w)})
            out.append(d)
    return out


def gibbs_cylinder(om: OracleMeasure, c: CylinderSet | Mapping[int, int],
                   fiber: tuple[float, float] | None = None) -> float:
    """Exact equilibrium mass of a base cylinder, optionally crossed with a fiber interval.

    Base cylinders without a fiber interval get their full fiber.  For
    ``shift_gibbs`` oracles the base mass is returned.
    """
    if isinstance(c, CylinderSet):
        constraints, fiber = c.constraints(), c.fiber if fiber is None else fiber
    else:
        constraints = dict(c)
    if om.kind == "shift_gibbs":
        return _markov_mass(om, constraints)
    total = 0.0
    for d in _refine_for_roof(om, dict(constraints)):
        r = om._roof.values[tuple(d[k] for k in range(om._roof.lo, om._roof.hi + 1))]
        if fiber is None:
            length = r
        else:
            a, b = fiber
            length = max(0.0, min(b, r) - max(a, 0.0))
        if length > 0:
            total += _markov_mass(om, d) * length
    return total / om.roof_mean


def gibbs_ratio_bound(om: OracleMeasure, samples: Iterable[tuple[SymbolicPoint, float]]) -> float:
    """Empirical Gibbs constant over ``(x, t)`` samples.

    The ball is the base cylinder on ``0..n+k_r-1`` (``n`` crossings needed to
    reach time ``t``) over the full fiber; its Gibbs weight uses the same
    ``n`` crossings of the base orbit.
    """
    system = om.system
    worst = 1.0
    for x, t in samples:
        if t < 1:
            raise OracleError("gibbs_ratio_bound needs t >= 1")
        n = system.crossings_forward(x.with_fiber(0.0), t)
        word = x.word(0, n + system.k_r - 1)
        mass = gibbs_cylinder(om, dict(enumerate(word)))
        log_weight = sum(system.step_psi.at(x, i) - om.pressure * system.step_roof.at(x, i) for i in range(n))
        rho = mass / math.exp(log_weight)
        worst = max(worst, rho, 1.0 / rho)
    return worst


def leaf_eigenmeasure(om: OracleMeasure, point: SymbolicPoint, constraints: Mapping[int, int]) -> float:
    """Conformal (unstable-leaf) mass of ``{z : z_{<=0} = point_{<=0}, z_c = s}``.

    Equals ``exp(sum of normalized weights over completed steps) * right[state]``
    summed over completions; the right eigenvector supplies the future.
    """
    wm, pd = om.wm, om.perron
    if any(c < 1 for c in constraints):
        raise OracleError("unstable-leaf constraints must sit on coordinates >= 1")
    depth = max([wm.hi, 0] + list(constraints))
    fixed = {c: point.symbol(c) for c in range(wm.lo, 1)}
    fixed.update(constraints)
    masks = _masks(om, fixed, 0, depth - wm.hi)
    M = wm.matrix / pd.eigenvalue
    v = masks[0]
    for m in masks[1:]:
        v = (v @ M) * m
    return float(v @ pd.right)


def reversed_flow_equilibrium(system: SuspensionSystem, pressure: float | None = None) -> OracleMeasure:
    return flow_equilibrium(system.reversed(), pressure)


def stable_leaf_eigenmeasure(om_rev: OracleMeasure, point: SymbolicPoint,
                             constraints: Mapping[int, int]) -> float:
    """Stable-leaf mass of ``{z : z_{>=0} = point_{>=0}, z_c = s}`` for ``c <= -1``.

    ``om_rev`` is the oracle of the reversed system; the stable leaf becomes an
    unstable leaf of the reflected sequence.
    """
    return leaf_eigenmeasure(om_rev, reflect(point), {-c: s for c, s in constraints.items()})

