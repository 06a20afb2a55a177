import math

import pytest
from hypothesis import given, strategies as st

from carathedyn import holonomy as hol
from carathedyn.config import fixture
from carathedyn.oracle import flow_pressure
from carathedyn.system import CylinderSet
from conftest import fixture_names, rng_of, seeds


@given(name=fixture_names, seed=seeds)
def test_omega_plus_cocycle(name, seed):
    system = fixture(name)
    P = flow_pressure(system)
    rng = rng_of(seed)
    x = system.random_point(rng)
    y = hol.random_weak_stable(system, x, rng)
    z = system.flow(hol.random_weak_stable(system, x, rng), float(rng.uniform(-1, 1)))
    xz, xy, yz = (hol.omega_plus(system, a, b, P) for a, b in ((x, z), (x, y), (y, z)))
    assert abs(xz.value - xy.value - yz.value) < 1e-12
    assert abs(xy.value + hol.omega_plus(system, y, x, P).value) < 1e-12
    assert xz.exact and xy.exact


@given(name=fixture_names, seed=seeds)
def test_omega_minus_cocycle(name, seed):
    system = fixture(name)
    P = flow_pressure(system)
    rng = rng_of(seed)
    x = system.random_point(rng)
    y = hol.random_weak_unstable(system, x, rng)
    z = system.flow(hol.random_weak_unstable(system, x, rng), float(rng.uniform(-1, 1)))
    xz, xy, yz = (hol.omega_minus(system, a, b, P) for a, b in ((x, z), (x, y), (y, z)))
    assert abs(xz.value - xy.value - yz.value) < 1e-12
    assert abs(xy.value + hol.omega_minus(system, y, x, P).value) < 1e-12


@given(name=fixture_names, seed=seeds, t=st.floats(-6, 6))
def test_orbit_identity(name, seed, t):
    system = fixture(name)
    P = flow_pressure(system)
    x = system.random_point(rng_of(seed))
    fx = system.flow(x, t)
    plus = hol.omega_plus(system, x, fx, P).value
    minus = hol.omega_minus(system, x, fx, P).value
    assert abs(plus + minus) < 1e-12
    # along one orbit both equal the potential integral minus tP, up to sign
    assert math.isclose(plus, system.birkhoff(x, t) - t * P, abs_tol=1e-10)


def test_zero_potential_cocycle_is_time_only():
    system = fixture("FULL2")
    P = math.log(2)
    x = system.random_point(rng_of(4))
    y = hol.random_weak_stable(system, x, rng_of(5))
    w = hol.omega_plus(system, x, y, P)
    assert math.isclose(w.value, -w.t * P, abs_tol=1e-14)


def _pair(system, rng, same):
    x = system.random_point(rng)
    y = system.random_point(rng)
    while (y.symbol(0) == x.symbol(0)) != same:
        y = system.random_point(rng)
    return x, y.with_fiber(x.fiber)


@given(name=fixture_names, seed=seeds)
def test_bracket_sits_on_both_leaves(name, seed):
    system = fixture(name)
    x, y = _pair(system, rng_of(seed), True)
    res = hol.bracket(system, x, y)
    assert res.point.word(1, 10) == x.word(1, 10)
    assert res.point.word(-10, 0) == y.word(-10, 0)
    assert res.point.fiber == y.fiber
    # beta undoes the forward displacement when the roof is read at coordinate 0
    if system.roof.lo == system.roof.hi == 0:
        assert abs(res.beta + res.t_displacement) < 1e-12


def test_bracket_rejects_other_rectangles():
    system = fixture("FULL2")
    x, y = _pair(system, rng_of(1), False)
    with pytest.raises(hol.NotRelated):
        hol.bracket(system, x, y)


@pytest.mark.parametrize("name", ["FULL2", "GOLD", "BERN13"])
def test_conformality_on_pointwise_fixtures(name):
    system = fixture(name)
    P = flow_pressure(system)
    x = system.random_point(rng_of(11))
    rec = hol.check_conformality(system, P, 1.5, CylinderSet(1, (x.symbol(1),)), x, (14,), 30, 1e-9)
    assert rec.passed, rec


def test_holonomy_rn_exact_for_pointwise_potential():
    system = fixture("BERN13")
    P = flow_pressure(system)
    rng = rng_of(8)
    x1 = system.random_point(rng)
    x2 = system.random_point(rng)
    while x2.symbol(0) != x1.symbol(0):
        x2 = system.random_point(rng)
    rec = hol.holonomy_rn_check(system, P, hol.PastReplacement(x1, x2), CylinderSet(1, (0, 1)), (14,), 30, 1e-10)
    assert rec.passed, rec
