"""Exhaustive antichain enumeration for leaf cover infima.

Independent of the DP: every antichain of eligible cylinders that covers the
target is listed explicitly, and each element's weight is recomputed from
orbit integrals of the flow rather than from per-step increments.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from carathedyn.system import (LocallyConstantFunction, SuspensionSystem, SymbolicPoint, completions,
                               with_future)

MAX_COVERS = 400_000


class TooManyCovers(RuntimeError):
    pass


def element_weight(system: SuspensionSystem, point: SymbolicPoint, word: tuple, alpha: float,
                   h: float) -> tuple[float, float]:
    """(order, weight) of the unstable-leaf cylinder ``point_{<=0} word`` at height ``h``."""
    n = len(word) - system.depth_offset
    z = with_future(system.sft, point, word) if word else point
    order = sum(system.roof.at(z, i) for i in range(n)) - h
    integral = system.birkhoff(z.with_fiber(h), order)
    return order, math.exp(integral - alpha * order)


def antichains(system: SuspensionSystem, point: SymbolicPoint, constraints: dict, T: float, cap: int):
    """All antichains of eligible nodes covering the target, as lists of words."""
    deepest = max(constraints) if constraints else 0
    count = [0]

    def eligible(word):
        n = len(word) - system.depth_offset
        if n < 1 or len(word) < deepest:
            return False
        z = with_future(system.sft, point, word)
        return sum(system.roof.at(z, i) for i in range(n)) - point.fiber >= T - 1e-12

    def covers(word):
        out = []
        if eligible(word):
            out.append([word])
        if len(word) < cap:
            last = word[-1] if word else point.symbol(0)
            kids = [word + (s,) for s in system.sft.successors(last)
                    if constraints.get(len(word) + 1, s) == s]
            parts = [covers(k) for k in kids]
            if all(parts):
                for combo in itertools.product(*parts):
                    out.append([w for part in combo for w in part])
                    count[0] += 1
                    if count[0] > MAX_COVERS:
                        raise TooManyCovers(f"more than {MAX_COVERS} antichains")
        return out

    return covers(())


def brute_cover_value(system: SuspensionSystem, point: SymbolicPoint, constraints: dict, alpha: float,
                      T: float, cap: int) -> tuple[float, int]:
    """Minimum total weight over all covering antichains, and how many were enumerated."""
    best = math.inf
    found = antichains(system, point, constraints, T, cap)
    weights: dict = {}
    for cover in found:
        total = 0.0
        for w in cover:
            if w not in weights:
                weights[w] = element_weight(system, point, w, alpha, point.fiber)[1]
            total += weights[w]
        best = min(best, total)
    return best, len(found)


def generic_variant(system: SuspensionSystem, seed: int, k_r: int = 0) -> SuspensionSystem:
    """Same shift and roof with a random window-[-1, 1] potential."""
    rng = np.random.default_rng(seed)
    vals = {w: float(rng.normal()) for w in system.sft.words(3)}
    return system.with_potential(LocallyConstantFunction(-1, 1, vals)).with_k_r(k_r)


# (depth_cap, cutoff T, number of leading forward coordinates pinned)
SHAPES = ((4, 1.5, 0), (5, 2.5, 0), (6, 3.6, 2), (7, 4.4, 3), (8, 5.2, 4), (8, 6.6, 5))


def acceptance_cases(system: SuspensionSystem, seed: int = 0):
    """Deterministic brute-force cases on ``system`` and two generic-potential variants."""
    rng = np.random.default_rng(seed)
    variants = [system, generic_variant(system, seed + 1), generic_variant(system, seed + 2, k_r=1)]
    for v in variants:
        for cap, T, pinned in SHAPES:
            x = v.random_point(rng, fiber=float(rng.uniform(0, 0.5)))
            if (cap - v.depth_offset) * v.min_roof - x.fiber < T:
                continue
            words = completions(v.sft, {0: x.symbol(0)}, 0, pinned)
            w = words[int(rng.integers(len(words)))]
            cons = dict(enumerate(w[1:], 1))
            alpha = float(rng.uniform(0.0, 1.0))
            yield v, x, cons, alpha, T, cap
