import math

import pytest
from hypothesis import given, strategies as st

from carathedyn.config import fixture
from carathedyn.oracle import flow_pressure
from carathedyn.pushforward import (LeafPushforward, PushforwardError, cesaro_check, cylinder_algebra,
                                    mass_conservation, nonincreasing, tv_to_oracle)
from carathedyn.system import CylinderSet, LocallyConstantFunction, SuspensionSystem
from conftest import rng_of, seeds


def scaled_roof(name, r):
    base = fixture(name)
    roof = LocallyConstantFunction.constant(r, base.sft)
    return SuspensionSystem(base.sft, roof, base.potential, base.k_r, f"{name}x{r}")


@pytest.fixture(scope="module")
def bern():
    system = fixture("BERN13")
    return LeafPushforward(system, flow_pressure(system), system.random_point(rng_of(7)), 14.0)


@given(t=st.floats(0.5, 30))
def test_mass_is_conserved(bern, t):
    assert mass_conservation(bern, t).passed


def test_full_shift_transient():
    # only coordinate 0 of the base point is pinned; its share decays like 1/t
    system = fixture("FULL2")
    h = 0.3
    x = system.random_point(rng_of(1), fiber=h)
    lp = LeafPushforward(system, math.log(2), x, 12.0)
    for t in (5.0, 10.0, 20.0):
        assert math.isclose(tv_to_oracle(lp, t, 1), (1 - h) / (2 * t), rel_tol=1e-9)


def test_tv_decays_on_bernoulli(bern):
    tvs = [tv_to_oracle(bern, t, 2) for t in (10.0, 20.0, 40.0, 80.0)]
    assert nonincreasing(tvs, 0.10) and tvs[-1] < 0.05


@given(seed=seeds, t=st.floats(2, 40), eta=st.floats(0.01, 5))
def test_cesaro_stability(bern, seed, t, eta):
    sets = cylinder_algebra(bern.system, 2)
    Z = sets[int(rng_of(seed).integers(len(sets)))]
    assert cesaro_check(bern, Z, t, eta).passed


@given(seed=seeds, t=st.floats(1, 25))
def test_constant_roof_two(seed, t):
    system = scaled_roof("BERN13", 2.0)
    P = flow_pressure(system)
    x = system.random_point(rng_of(seed))
    lp = LeafPushforward(system, P, x, 14.0)
    assert mass_conservation(lp, t).passed
    halves = [Z.fiber for Z in cylinder_algebra(system, 1)]
    assert halves[:2] == [(0.0, 1.0), (1.0, 2.0)]
    assert sum(lp.nu_t(Z, t) for Z in cylinder_algebra(system, 2)) == pytest.approx(lp.plaque_mass, rel=1e-9)


def test_non_constant_roof_rejected():
    system = fixture("ROOF2")
    with pytest.raises(PushforwardError):
        LeafPushforward(system, 0.48, system.random_point(rng_of(0)))


def test_integrand_vanishes_off_fiber(bern):
    Z = CylinderSet(0, (0,), (0.0, 0.1))
    total = bern.nu_t(Z, 1.0) + bern.nu_t(CylinderSet(0, (0,), (0.1, 1.0)), 1.0)
    assert math.isclose(total, bern.nu_t(CylinderSet(0, (0,)), 1.0), rel_tol=1e-12)


@pytest.mark.parametrize("name,t,share", [("FULL2", 20.0, 1 / 2), ("BERN13", 50.0, 1 / 3)])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_single_symbol_share(name, t, share, seed):
    system = fixture(name)
    lp = LeafPushforward(system, flow_pressure(system), system.random_point(rng_of(seed)), 14.0)
    assert lp.nu_t(CylinderSet(0, (0,)), t) == pytest.approx(share * lp.plaque_mass, rel=0.05)
