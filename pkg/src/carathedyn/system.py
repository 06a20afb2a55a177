"""Suspension flows over two-sided subshifts of finite type.

Points are finite windows of symbols with periodic tails on both sides plus a
fiber coordinate in ``[0, roof)``.  Roof and potential are locally constant,
so every orbit integral is an exact finite sum.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np


class SystemError_(ValueError):
    """Raised for inadmissible systems, points or cylinders."""


@dataclass(frozen=True)
class Sft:
    alphabet_size: int
    transitions: tuple[tuple[bool, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        k = self.alphabet_size
        if k < 2:
            raise SystemError_("alphabet_size must be at least 2")
        if len(self.transitions) != k or any(len(row) != k for row in self.transitions):
            raise SystemError_("transition matrix must be alphabet_size x alphabet_size")
        if not self.names:
            object.__setattr__(self, "names", tuple("abcdefghijklmnopqrstuvwxyz"[:k]) if k <= 26
                               else tuple(str(i) for i in range(k)))
        A = self.matrix
        if (A.sum(axis=1) == 0).any() or (A.sum(axis=0) == 0).any():
            raise SystemError_("every symbol needs a successor and a predecessor")
        if not _primitive(A):
            raise SystemError_("transition matrix must be irreducible and aperiodic")

    @classmethod
    def full(cls, k: int) -> "Sft":
        return cls(k, tuple(tuple(True for _ in range(k)) for _ in range(k)))

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[int]], names: Sequence[str] = ()) -> "Sft":
        return cls(len(rows), tuple(tuple(bool(v) for v in row) for row in rows), tuple(names))

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array(self.transitions, dtype=float)

    def allowed(self, a: int, b: int) -> bool:
        return self.transitions[a][b]

    def admissible(self, word: Sequence[int]) -> bool:
        return all(self.transitions[a][b] for a, b in zip(word, word[1:]))

    def words(self, length: int) -> list[tuple[int, ...]]:
        """All admissible words of the given length, in lexicographic order."""
        if length <= 0:
            return [()]
        out = [(s,) for s in range(self.alphabet_size)]
        for _ in range(length - 1):
            out = [w + (s,) for w in out for s in range(self.alphabet_size) if self.transitions[w[-1]][s]]
        return out

    def successors(self, a: int) -> list[int]:
        return [b for b in range(self.alphabet_size) if self.transitions[a][b]]

    def reversed(self) -> "Sft":
        k = self.alphabet_size
        return Sft(k, tuple(tuple(self.transitions[j][i] for j in range(k)) for i in range(k)), self.names)

    def symbol(self, name: str) -> int:
        return self.names.index(name)

    def parse(self, text: str) -> tuple[int, ...]:
        return tuple(self.symbol(c) for c in text)

    def format(self, word: Sequence[int]) -> str:
        return "".join(self.names[s] for s in word)


def _primitive(A: np.ndarray) -> bool:
    k = A.shape[0]
    B = (A > 0).astype(np.int64)
    P = B.copy()
    # Wielandt bound on the primitivity exponent
    for _ in range((k - 1) ** 2 + 1):
        if (P > 0).all():
            return True
        P = np.minimum(P @ B, 1)
    return bool((P > 0).all())


@dataclass(frozen=True)
class SymbolicPoint:
    """A two-sided sequence stored as ``window`` at indices ``lo..lo+len-1``.

    Beyond the window the sequence repeats ``right_cycle`` to the right and
    ``left_cycle`` to the left (index ``lo-1`` reads ``left_cycle[-1]``).
    ``epoch`` counts applied shifts and fixes how two points' coordinates are
    aligned when comparing tails.
    """

    window: tuple[int, ...]
    lo: int
    left_cycle: tuple[int, ...]
    right_cycle: tuple[int, ...]
    fiber: float = 0.0
    epoch: int = 0

    @property
    def hi(self) -> int:
        return self.lo + len(self.window) - 1

    def symbol(self, i: int) -> int:
        j = i - self.lo
        if 0 <= j < len(self.window):
            return self.window[j]
        if j >= len(self.window):
            return self.right_cycle[(j - len(self.window)) % len(self.right_cycle)]
        return self.left_cycle[j % len(self.left_cycle)]

    def word(self, a: int, b: int) -> tuple[int, ...]:
        return tuple(self.symbol(i) for i in range(a, b + 1))

    def with_fiber(self, fiber: float) -> "SymbolicPoint":
        return SymbolicPoint(self.window, self.lo, self.left_cycle, self.right_cycle, fiber, self.epoch)

    def extended(self, a: int, b: int) -> "SymbolicPoint":
        """Same sequence with the stored window grown to cover ``[a, b]``."""
        a, b = min(a, self.lo), max(b, self.hi)
        left = self.left_cycle
        right = self.right_cycle
        # keep the tail phase: the cycles continue from where the window now ends
        ln, rn = len(left), len(right)
        new_left = tuple(left[(j) % ln] for j in range(a - self.lo - ln, a - self.lo))
        new_right = tuple(right[(j) % rn] for j in range(b - self.hi, b - self.hi + rn))
        return SymbolicPoint(self.word(a, b), a, new_left, new_right, self.fiber, self.epoch)

    @classmethod
    def periodic(cls, cycle: Sequence[int], fiber: float = 0.0) -> "SymbolicPoint":
        cycle = tuple(cycle)
        return cls(cycle, 0, cycle, cycle, fiber)

    @classmethod
    def spliced(cls, past: Sequence[int], future: Sequence[int], left_cycle: Sequence[int],
                right_cycle: Sequence[int], fiber: float = 0.0) -> "SymbolicPoint":
        """``past`` occupies indices ``-len(past)+1..0``, ``future`` indices ``1..``."""
        past = tuple(past)
        return cls(past + tuple(future), 1 - len(past), tuple(left_cycle), tuple(right_cycle), fiber)


def shift(p: SymbolicPoint, n: int) -> SymbolicPoint:
    """The point ``q`` with ``q_i = p_{i+n}``."""
    return SymbolicPoint(p.window, p.lo - n, p.left_cycle, p.right_cycle, p.fiber, p.epoch + n)


def reflect(p: SymbolicPoint) -> SymbolicPoint:
    """The point ``y`` with ``y_j = p_{-j}``."""
    return SymbolicPoint(tuple(reversed(p.window)), -p.hi, tuple(reversed(p.right_cycle)),
                         tuple(reversed(p.left_cycle)), p.fiber, -p.epoch)


def check_point(sft: Sft, p: SymbolicPoint) -> None:
    for cyc in (p.left_cycle, p.right_cycle):
        if not cyc or not sft.admissible(cyc + cyc[:1]):
            raise SystemError_("tail cycle is not an admissible cycle")
    seq = p.left_cycle + p.window + p.right_cycle
    if not sft.admissible(seq):
        raise SystemError_("point window or tail joins are not admissible")


@dataclass(frozen=True)
class LocallyConstantFunction:
    """A function of the symbols at coordinates ``lo..hi``."""

    lo: int
    hi: int
    values: dict = field(hash=False, compare=True)

    def __post_init__(self):
        if self.lo > self.hi:
            raise SystemError_("window_lo must not exceed window_hi")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    def on_word(self, word: Sequence[int]) -> float:
        return self.values[tuple(word)]

    def at(self, p: SymbolicPoint, i: int = 0) -> float:
        """Value at the shifted point ``sigma^i p``."""
        return self.values[p.word(i + self.lo, i + self.hi)]

    def on_coords(self, get: Callable[[int], int], i: int = 0) -> float:
        return self.values[tuple(get(j) for j in range(i + self.lo, i + self.hi + 1))]

    def check(self, sft: Sft, *, positive: bool = False) -> None:
        for w in sft.words(self.width):
            if w not in self.values:
                raise SystemError_(f"missing value for admissible word {sft.format(w)}")
            if positive and not self.values[w] > 0:
                raise SystemError_("roof values must be strictly positive")

    def lift(self, lo: int, hi: int, sft: Sft) -> "LocallyConstantFunction":
        """Same function re-expressed on the larger window ``[lo, hi]``."""
        if lo > self.lo or hi < self.hi:
            raise SystemError_("lift window must contain the original window")
        a, b = self.lo - lo, self.hi - lo
        return LocallyConstantFunction(lo, hi, {w: self.values[w[a:b + 1]] for w in sft.words(hi - lo + 1)})

    def combine(self, other: "LocallyConstantFunction", op: Callable[[float, float], float],
                sft: Sft) -> "LocallyConstantFunction":
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        f, g = self.lift(lo, hi, sft), other.lift(lo, hi, sft)
        return LocallyConstantFunction(lo, hi, {w: op(f.values[w], g.values[w]) for w in f.values})

    def map(self, op: Callable[[float], float]) -> "LocallyConstantFunction":
        return LocallyConstantFunction(self.lo, self.hi, {w: op(v) for w, v in self.values.items()})

    def reversed(self) -> "LocallyConstantFunction":
        """The function read on the reflected sequence ``y_j = x_{-j}``, shifted by one.

        A backward step from ``x`` crosses ``sigma^{-i} x`` (``i >= 1``); on the
        reflected sequence this is forward step ``i - 1``, whose window is
        ``[1 - hi, 1 - lo]``.
        """
        return LocallyConstantFunction(1 - self.hi, 1 - self.lo,
                                       {tuple(reversed(w)): v for w, v in self.values.items()})

    def sup_norm(self) -> float:
        return max(abs(v) for v in self.values.values())

    @classmethod
    def constant(cls, value: float, sft: Sft) -> "LocallyConstantFunction":
        return cls(0, 0, {(s,): float(value) for s in range(sft.alphabet_size)})

    @classmethod
    def per_symbol(cls, values: Sequence[float]) -> "LocallyConstantFunction":
        return cls(0, 0, {(s,): float(v) for s, v in enumerate(values)})


@dataclass(frozen=True)
class SuspensionSystem:
    sft: Sft
    roof: LocallyConstantFunction
    potential: LocallyConstantFunction
    k_r: int = 0
    name: str = ""
    r_unit: float | None = None
    direction: str = "forward"

    def __post_init__(self):
        if self.k_r < 0:
            raise SystemError_("k_r must be nonnegative")
        self.roof.check(self.sft, positive=True)
        self.potential.check(self.sft)
        if self.r_unit is None:
            object.__setattr__(self, "r_unit", self.min_roof / 4)
        elif not self.r_unit > 0:
            raise SystemError_("r_unit must be positive")

    @cached_property
    def min_roof(self) -> float:
        return min(self.roof.values.values())

    @cached_property
    def max_roof(self) -> float:
        return max(self.roof.values.values())

    @property
    def constant_roof(self) -> bool:
        return self.min_roof == self.max_roof

    @cached_property
    def window(self) -> tuple[int, int]:
        """Joint window of roof and potential."""
        return min(self.roof.lo, self.potential.lo), max(self.roof.hi, self.potential.hi)

    @cached_property
    def step_potential(self) -> LocallyConstantFunction:
        """Integral of the potential over one crossing: potential times roof."""
        return self.potential.combine(self.roof, lambda a, b: a * b, self.sft)

    @cached_property
    def step_roof(self) -> LocallyConstantFunction:
        lo, hi = self.window
        return self.roof.lift(lo, hi, self.sft)

    @cached_property
    def step_psi(self) -> LocallyConstantFunction:
        lo, hi = self.window
        return self.step_potential.lift(lo, hi, self.sft)

    @cached_property
    def depth_offset(self) -> int:
        """Symbolic radius offset, raised if the windows reach further ahead."""
        return max(self.k_r, self.window[1] - 1)

    def reversed(self) -> "SuspensionSystem":
        """The time-reversed system on reflected sequences (see ``LocallyConstantFunction.reversed``)."""
        return SuspensionSystem(self.sft.reversed(), self.roof.reversed(), self.potential.reversed(),
                                self.k_r, self.name, self.r_unit,
                                "backward" if self.direction == "forward" else "forward")

    def with_potential(self, potential: LocallyConstantFunction, name: str = "") -> "SuspensionSystem":
        return SuspensionSystem(self.sft, self.roof, potential, self.k_r, name or self.name, self.r_unit,
                                self.direction)

    def with_k_r(self, k_r: int) -> "SuspensionSystem":
        return SuspensionSystem(self.sft, self.roof, self.potential, k_r, self.name, self.r_unit, self.direction)

    # -- orbit primitives ------------------------------------------------

    def check_point(self, p: SymbolicPoint) -> None:
        check_point(self.sft, p)
        if not 0 <= p.fiber < self.roof.at(p):
            raise SystemError_("fiber must lie in [0, roof)")

    def flow(self, p: SymbolicPoint, t: float) -> SymbolicPoint:
        f = p.fiber + t
        q = p
        r = self.roof.at(q)
        while f >= r:
            f -= r
            q = shift(q, 1)
            r = self.roof.at(q)
        while f < 0:
            q = shift(q, -1)
            f += self.roof.at(q)
        return q.with_fiber(f)

    def birkhoff(self, p: SymbolicPoint, t: float) -> float:
        """Integral of the potential along the orbit of ``p`` for time ``t``."""
        if t < 0:
            return -self.birkhoff(self.flow(p, t), -t)
        total = 0.0
        remaining = t
        q, f = p, p.fiber
        while remaining > 0:
            r = self.roof.at(q)
            dt = min(remaining, r - f)
            total += dt * self.potential.at(q)
            remaining -= dt
            q, f = shift(q, 1), 0.0
        return total

    def crossings_forward(self, p: SymbolicPoint, t: float) -> int:
        """Least ``n`` with ``S_n roof(p) >= t``."""
        n, s = 0, 0.0
        while s < t:
            s += self.roof.at(p, n)
            n += 1
        return n

    def crossings_backward(self, p: SymbolicPoint, t: float) -> int:
        n, s = 0, 0.0
        while s < t:
            n += 1
            s += self.roof.at(p, -n)
        return n

    def cylinder_ball(self, p: SymbolicPoint, t: float, side: str = "forward") -> "CylinderSet":
        if t < 0:
            raise SystemError_("Bowen ball order must be nonnegative")
        if side == "forward":
            n = self.crossings_forward(p, t)
            return CylinderSet(0, p.word(0, n + self.k_r), order=t)
        if side == "backward":
            n = self.crossings_backward(p, t)
            return CylinderSet(-(n + self.k_r), p.word(-(n + self.k_r), 0), order=t)
        raise SystemError_(f"unknown side {side!r}")

    def roof_sum(self, word: Sequence[int], lo: int, steps: range) -> float:
        """Sum of roof over shifts ``i in steps`` of a sequence known on ``word`` at ``lo``."""
        return sum(self.step_roof.on_word(word[i + self.step_roof.lo - lo:i + self.step_roof.hi - lo + 1])
                   for i in steps)

    def random_point(self, rng: np.random.Generator, radius: int = 6, cycle_len: int = 5,
                     fiber: float | None = None) -> SymbolicPoint:
        """A random admissible point with window ``[-radius, radius]`` and random tail cycles."""
        left = random_cycle(self.sft, rng, cycle_len)
        right = random_cycle(self.sft, rng, cycle_len)
        for _ in range(1000):
            w = [left[-1]]
            ok = True
            for _ in range(2 * radius + 1):
                succ = self.sft.successors(w[-1])
                w.append(int(rng.choice(succ)))
            if not self.sft.allowed(w[-1], right[0]):
                ok = False
            if ok:
                p = SymbolicPoint(tuple(w[1:]), -radius, left, right)
                r = self.roof.at(p)
                return p.with_fiber(float(rng.uniform(0, r)) if fiber is None else fiber)
        raise SystemError_("could not sample an admissible point")


def _cycle_through(sft: Sft, start: int) -> tuple[int, ...]:
    """Shortest admissible cycle starting at ``start``."""
    prev = {b: start for b in sft.successors(start)}
    frontier = list(prev)
    while start not in prev:
        nxt = []
        for a in frontier:
            for b in sft.successors(a):
                if b not in prev:
                    prev[b] = a
                    nxt.append(b)
        frontier = nxt
    path, cur = [start], prev[start]
    while cur != start:
        path.append(cur)
        cur = prev[cur]
    return (start,) + tuple(reversed(path[1:]))


def _path(sft: Sft, a: int, b: int) -> tuple[int, ...]:
    """Shortest path ``a -> ... -> b`` with at least one step, endpoints included."""
    prev = {s: a for s in sft.successors(a)}
    frontier = list(prev)
    while b not in prev:
        nxt = []
        for u in frontier:
            for v in sft.successors(u):
                if v not in prev:
                    prev[v] = u
                    nxt.append(v)
        frontier = nxt
    out, cur = [b], b
    while True:
        cur = prev[cur]
        out.append(cur)
        if cur == a and len(out) > 1:
            break
    return tuple(reversed(out))


def point_from_word(sft: Sft, word: Sequence[int], lo: int, fiber: float = 0.0) -> SymbolicPoint:
    """A point carrying ``word`` on coordinates ``lo..`` with admissible periodic tails."""
    word = tuple(word)
    if not word or not sft.admissible(word):
        raise SystemError_("word must be nonempty and admissible")
    left = _cycle_through(sft, 0)
    lead = _path(sft, left[0], word[0])[1:-1]
    right = _cycle_through(sft, 0)
    trail = _path(sft, word[-1], right[0])[1:-1]
    window = lead + word + trail
    return SymbolicPoint(window, lo - len(lead), left[1:] + left[:1], right, fiber)


def splice(past: SymbolicPoint, future: SymbolicPoint, cut: int = 0, fiber: float | None = None,
           epoch: int | None = None) -> SymbolicPoint:
    """Coordinates ``<= cut`` from ``past``, ``> cut`` from ``future``."""
    pe = past.extended(min(past.lo, cut), cut)
    fe = future.extended(cut + 1, max(future.hi, cut + 1))
    window = pe.window[:cut - pe.lo + 1] + fe.window[cut + 1 - fe.lo:]
    return SymbolicPoint(window, pe.lo, pe.left_cycle, fe.right_cycle,
                         past.fiber if fiber is None else fiber, past.epoch if epoch is None else epoch)


def with_future(sft: Sft, p: SymbolicPoint, word: Sequence[int], start: int = 1) -> SymbolicPoint:
    """``p`` with ``word`` on coordinates ``start..`` and an admissible tail after it."""
    word = tuple(word)
    if not word:
        return p
    return splice(p, point_from_word(sft, word, start), start - 1)


def with_past(sft: Sft, p: SymbolicPoint, word: Sequence[int], end: int = -1) -> SymbolicPoint:
    """``p`` with ``word`` ending at coordinate ``end`` and an admissible tail before it."""
    word = tuple(word)
    if not word:
        return p
    q = point_from_word(sft, word, end - len(word) + 1)
    return splice(q, p, end, fiber=p.fiber, epoch=p.epoch)


def random_cycle(sft: Sft, rng: np.random.Generator, length: int) -> tuple[int, ...]:
    for _ in range(10000):
        w = [int(rng.integers(sft.alphabet_size))]
        for _ in range(length - 1):
            w.append(int(rng.choice(sft.successors(w[-1]))))
        if sft.allowed(w[-1], w[0]):
            return tuple(w)
    raise SystemError_("no admissible cycle of that length")


@dataclass(frozen=True)
class CylinderSet:
    """Symbols fixed on coordinates ``lo..lo+len(word)-1``, optionally times a fiber interval.

    The fiber interval ``[a, b)`` refers to the fiber over the symbol at
    coordinate 0.  ``order`` records the Bowen-ball order for cylinders built
    by ``cylinder_ball``.
    """

    lo: int
    word: tuple[int, ...]
    fiber: tuple[float, float] | None = None
    order: float | None = None

    @property
    def hi(self) -> int:
        return self.lo + len(self.word) - 1

    def constraints(self) -> dict[int, int]:
        return {self.lo + j: s for j, s in enumerate(self.word)}

    def contains(self, p: SymbolicPoint) -> bool:
        if p.word(self.lo, self.hi) != self.word:
            return False
        if self.fiber is not None:
            a, b = self.fiber
            return a <= p.fiber < b
        return True

    def refinements(self, sft: Sft, side: str = "forward") -> list["CylinderSet"]:
        """One-symbol admissible extensions on the given side."""
        if side == "forward":
            if not self.word:
                return [CylinderSet(self.lo, (s,), self.fiber) for s in range(sft.alphabet_size)]
            return [CylinderSet(self.lo, self.word + (s,), self.fiber) for s in sft.successors(self.word[-1])]
        if not self.word:
            return [CylinderSet(self.lo - 1, (s,), self.fiber) for s in range(sft.alphabet_size)]
        return [CylinderSet(self.lo - 1, (s,) + self.word, self.fiber)
                for s in range(sft.alphabet_size) if sft.allowed(s, self.word[0])]

    def shifted(self, n: int) -> "CylinderSet":
        """Image under the base shift by ``n``."""
        return CylinderSet(self.lo - n, self.word, self.fiber, self.order)


def all_cylinders(sft: Sft, lo: int, hi: int, fiber=None) -> list[CylinderSet]:
    return [CylinderSet(lo, w, fiber) for w in sft.words(hi - lo + 1)]


def product_words(sft: Sft, n: int) -> Iterator[tuple[int, ...]]:
    for w in itertools.product(range(sft.alphabet_size), repeat=n):
        if sft.admissible(w):
            yield w


def log_golden() -> float:
    return math.log((1 + math.sqrt(5)) / 2)


def completions(sft: Sft, constraints: dict[int, int], lo: int, hi: int) -> list[tuple[int, ...]]:
    """Admissible words on ``lo..hi`` agreeing with ``constraints``, pruned as they grow."""
    out = [()]
    for c in range(lo, hi + 1):
        fixed = constraints.get(c)
        nxt = []
        for w in out:
            cands = sft.successors(w[-1]) if w else range(sft.alphabet_size)
            nxt.extend(w + (s,) for s in cands if fixed is None or s == fixed)
        out = nxt
    return out
