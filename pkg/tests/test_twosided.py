import math

import pytest
from hypothesis import given, strategies as st

from carathedyn.config import fixture
from carathedyn.oracle import flow_equilibrium, flow_pressure, gibbs_cylinder
from carathedyn.system import CylinderSet, LocallyConstantFunction, SymbolicPoint, completions
from carathedyn.twosided import (MeasureM, TwoSidedDP, TwoSidedError, bstar, flow_cylinder, gibbs_star_ratio,
                                 m_value)
from conftest import rng_of, seeds

POINTWISE = ["FULL2", "GOLD", "BERN13", "SRB3", "ROOF2"]


def test_ball_window_full_shift():
    system = fixture("FULL2")
    x = SymbolicPoint.periodic((0, 1), fiber=0.0)
    ball = bstar(system, x, 3.0, 3.0)
    assert (ball.lo, ball.hi) == (-3, 3)
    assert math.isclose(ball.beta_halfwidth, system.r_unit / 6)


def test_full_shift_total_mass():
    system = fixture("FULL2")
    mm = MeasureM(system, math.log(2), 6.0)
    assert math.isclose(mm(CylinderSet(0, ())), 1 / system.r_unit, rel_tol=1e-12)
    # each symbol's fiber carries half
    half = m_value(system, math.log(2), CylinderSet(0, (1,)), 6.0).value
    assert math.isclose(half, 0.5 / system.r_unit, rel_tol=1e-12)
    with pytest.raises(TwoSidedError):
        m_value(system, math.log(2), CylinderSet(0, ()), 6.0)


@pytest.mark.parametrize("name", POINTWISE)
def test_proportional_to_oracle(name):
    system = fixture(name)
    P = flow_pressure(system)
    om = flow_equilibrium(system, P)
    mm = MeasureM(system, P, 6.0)
    sets = [CylinderSet(lo, w) for lo, hi in ((0, 0), (-1, 1)) for s in range(system.sft.alphabet_size)
            for w in completions(system.sft, {0: s}, lo, hi)]
    ratios = [mm(Z) / gibbs_cylinder(om, Z) for Z in sets]
    assert max(ratios) / min(ratios) - 1 < 1e-9


def test_materialized_cover_reproduces_value():
    system = fixture("GOLD")
    P = flow_pressure(system)
    dp = TwoSidedDP(system, P, 5.0, 10)
    Z = CylinderSet(0, (0,))
    value = dp.value(Z)
    cover = dp.materialize(Z)
    total = sum(cnt / (s + t) * math.exp(lw) for _, _, s, t, cnt, lw in cover)
    assert math.isclose(total, value, rel_tol=1e-10)
    spans = [(lo, w) for lo, w, *_ in cover]
    for i, (lo1, w1) in enumerate(spans):
        for lo2, w2 in spans[i + 1:]:
            a, b = max(lo1, lo2), min(lo1 + len(w1), lo2 + len(w2))
            assert w1[a - lo1:b - lo1] != w2[a - lo2:b - lo2]


def test_wide_windows_rejected():
    system = fixture("FULL2")
    wide = system.with_potential(LocallyConstantFunction(0, 1, {w: 0.1 * sum(w) for w in system.sft.words(2)}))
    with pytest.raises(TwoSidedError):
        MeasureM(wide, 0.7, 6.0)


@given(name=st.sampled_from(POINTWISE), seed=seeds, tau=st.floats(0.0, 3.0))
def test_flowed_cylinder_keeps_oracle_mass(name, seed, tau):
    system = fixture(name)
    om = flow_equilibrium(system)
    rng = rng_of(seed)
    s = int(rng.integers(system.sft.alphabet_size))
    w = completions(system.sft, {0: s}, -1, 1)
    r = system.roof.values[(s,)]
    a, b = sorted(rng.uniform(0, r, 2))
    Z = CylinderSet(-1, w[int(rng.integers(len(w)))], (float(a), float(b)))
    moved = sum(gibbs_cylinder(om, c) for c in flow_cylinder(system, Z, tau))
    assert math.isclose(moved, gibbs_cylinder(om, Z), rel_tol=1e-9, abs_tol=1e-15)


@given(seed=seeds, s=st.floats(2, 8), t=st.floats(2, 8))
def test_gibbs_star_bounded(seed, s, t):
    system = fixture("BERN13")
    P = flow_pressure(system)
    x = system.random_point(rng_of(seed), radius=12)
    x = x.with_fiber(min(max(x.fiber, 0.05), 0.95))
    rho = gibbs_star_ratio(MeasureM(system, P, 10.0, 24), x, s, t)
    assert 1 / 4 <= rho <= 4
