import math

import pytest
from hypothesis import given, strategies as st

from carathedyn.config import fixture
from carathedyn.system import (CylinderSet, LocallyConstantFunction, Sft, SymbolicPoint, SystemError_, completions,
                               reflect, shift, with_future)
from conftest import fixture_names, rng_of, seeds


def test_golden_shift_words():
    gold = fixture("GOLD")
    # Fibonacci counts, with bb forbidden
    assert [len(gold.sft.words(n)) for n in range(1, 7)] == [2, 3, 5, 8, 13, 21]
    assert all(w[i:i + 2] != (1, 1) for w in gold.sft.words(6) for i in range(5))


def test_non_primitive_matrix_rejected():
    with pytest.raises(SystemError_):
        Sft.from_matrix([[0, 1], [1, 0]])


def test_point_tails_repeat():
    p = SymbolicPoint((0, 1, 1), -1, (0,), (1, 0))
    assert p.word(-3, 5) == (0, 0, 0, 1, 1, 1, 0, 1, 0)
    assert shift(p, 2).symbol(0) == p.symbol(2)
    assert reflect(p).symbol(3) == p.symbol(-3)


@given(name=fixture_names, seed=seeds, a=st.floats(-4, 4), b=st.floats(-4, 4))
def test_flow_is_a_flow(name, seed, a, b):
    system = fixture(name)
    x = system.random_point(rng_of(seed))
    lhs = system.flow(system.flow(x, a), b)
    rhs = system.flow(x, a + b)
    assert math.isclose(lhs.fiber, rhs.fiber, abs_tol=1e-9) or math.isclose(
        abs(lhs.fiber - rhs.fiber), system.roof.at(rhs), abs_tol=1e-9)
    if abs(lhs.fiber - rhs.fiber) < 1e-9:
        assert lhs.word(-8, 8) == rhs.word(-8, 8)


@given(name=fixture_names, seed=seeds, a=st.floats(0, 5), b=st.floats(0, 5))
def test_birkhoff_is_additive(name, seed, a, b):
    system = fixture(name)
    x = system.random_point(rng_of(seed))
    whole = system.birkhoff(x, a + b)
    split = system.birkhoff(x, a) + system.birkhoff(system.flow(x, a), b)
    assert math.isclose(whole, split, rel_tol=1e-9, abs_tol=1e-9)


@given(name=fixture_names, seed=seeds, t=st.floats(0.01, 12))
def test_crossings_reach_time(name, seed, t):
    system = fixture(name)
    x = system.random_point(rng_of(seed))
    n = system.crossings_forward(x, t)
    total = sum(system.roof.at(x, i) for i in range(n))
    assert total >= t > total - system.roof.at(x, n - 1)


def test_lift_preserves_values():
    f = LocallyConstantFunction(0, 1, {(0, 0): 1.0, (0, 1): 2.0, (1, 0): 3.0, (1, 1): 4.0})
    sft = Sft.full(2)
    g = f.lift(-1, 2, sft)
    p = SymbolicPoint((1, 0, 1, 1), -1, (0,), (0,))
    assert g.at(p) == f.at(p) == 2.0


def test_completions_respect_constraints():
    gold = fixture("GOLD")
    words = completions(gold.sft, {0: 1, 2: 0}, -1, 2)
    assert words and all(w[1] == 1 and w[3] == 0 and gold.sft.admissible(w) for w in words)
    assert len(words) == len([w for w in gold.sft.words(4) if w[1] == 1 and w[3] == 0])


def test_cylinder_contains():
    Z = CylinderSet(-1, (0, 1), (0.0, 0.5))
    p = SymbolicPoint((0, 1), -1, (1,), (0,), 0.25)
    assert Z.contains(p)
    assert not Z.contains(p.with_fiber(0.75))
    q = with_future(Sft.full(2), p, (1, 1))
    assert q.word(1, 2) == (1, 1)
