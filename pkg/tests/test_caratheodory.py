import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bruteforce import brute_cover_value, generic_variant
from carathedyn.caratheodory import (CoverError, LeafProblem, cover_value, critical_value, extrapolate_limit,
                                     leaf_measure_s, leaf_measure_u, reference_points, whole_space_value)
from carathedyn.config import fixture
from carathedyn.oracle import flow_equilibrium, flow_pressure, leaf_eigenmeasure
from carathedyn.system import completions
from conftest import rng_of, seeds


def generic(name, seed, k_r=0):
    return generic_variant(fixture(name), seed, k_r)


@given(name=st.sampled_from(["FULL2", "GOLD"]), seed=seeds, k_r=st.integers(0, 1),
       alpha=st.floats(-0.5, 1.5), h=st.floats(0.0, 0.95), T=st.floats(0.5, 3.0))
def test_dp_matches_brute_force_whole_leaf(name, seed, k_r, alpha, h, T):
    system = generic(name, seed, k_r)
    x = system.random_point(rng_of(seed), fiber=h)
    cap = 4
    if (cap - system.depth_offset) * system.min_roof - h < T:
        return
    dp = cover_value(LeafProblem(system, x, -1), {}, alpha, T, cap).value
    bf, _ = brute_cover_value(system, x, {}, alpha, T, cap)
    assert math.isclose(dp, bf, rel_tol=1e-12)


@given(name=st.sampled_from(["FULL2", "GOLD"]), seed=seeds, alpha=st.floats(0.0, 1.0), T=st.floats(4.5, 6.5))
def test_dp_matches_brute_force_deep_target(name, seed, alpha, T):
    system = generic(name, seed)
    rng = rng_of(seed)
    x = system.random_point(rng, fiber=float(rng.uniform(0, 0.5)))
    words = completions(system.sft, {0: x.symbol(0)}, 0, 5)
    w = words[int(rng.integers(len(words)))]
    cons = dict(enumerate(w[1:], 1))
    dp = cover_value(LeafProblem(system, x, -1), cons, alpha, T, 8).value
    bf, _ = brute_cover_value(system, x, cons, alpha, T, 8)
    assert math.isclose(dp, bf, rel_tol=1e-12)


def test_materialized_cover_is_a_partition():
    system = generic("GOLD", 5)
    x = system.random_point(rng_of(5), fiber=0.3)
    res = cover_value(LeafProblem(system, x, -1), {}, 0.4, 6.0, 12, materialize=True)
    words = [e.word for e in res.optimal_cover]
    for a in words:
        for b in words:
            if a is not b:
                assert b[:len(a)] != a
    assert math.isclose(sum(e.weight for e in res.optimal_cover), res.value, rel_tol=1e-10)


@given(seed=seeds)
def test_value_decreases_in_alpha(seed):
    system = generic("FULL2", seed)
    a, b = sorted(np.random.default_rng(seed).uniform(-1, 2, 2))
    assert whole_space_value(system, a, 6.0, 12) >= whole_space_value(system, b, 6.0, 12)


def test_subadditive_over_refinements():
    system = fixture("ROOF2")
    x = system.random_point(rng_of(2))
    P = 0.48
    problem = LeafProblem(system, x, -1)
    whole = cover_value(problem, {}, P, 10.0, 20).value
    parts = sum(cover_value(problem, {1: s}, P, 10.0, 20).value for s in system.sft.successors(x.symbol(0)))
    assert whole <= parts * (1 + 1e-12)


def test_cap_too_small_is_rejected():
    with pytest.raises(CoverError):
        cover_value(LeafProblem(fixture("FULL2"), fixture("FULL2").random_point(rng_of(0)), -1), {}, 0.7, 18.0, 10)


def test_critical_value_full_shift():
    est = critical_value(fixture("FULL2"), [8.0], depth_cap=14, alpha_tol=1e-9)
    assert abs(est.alpha_star - math.log(2)) < 1e-3


def test_extrapolation_settled_and_accelerated():
    assert extrapolate_limit([(1, 1.0), (2, 1.0), (3, 1.0)]).value == 1.0
    geo = [(k, 2.0 - 0.5 ** k) for k in range(1, 4)]
    assert math.isclose(extrapolate_limit(geo).value, 2.0, rel_tol=1e-12)


@pytest.mark.parametrize("h", [0.0, 0.25, 0.857])
def test_full_shift_whole_leaf(h):
    # one at the base of the fiber, scaled by exp(hP) at height h
    system = fixture("FULL2")
    x = system.random_point(rng_of(0), fiber=h)
    v = cover_value(LeafProblem(system, x, -1), {}, math.log(2), 10.0, 30).value
    assert v == pytest.approx(2.0 ** h, rel=1e-12)


@pytest.mark.parametrize("T", [5.0, 10.0, 15.0])
def test_full_shift_above_pressure(T):
    # with the cap at n(T) the only admissible level is n(T) itself
    system = fixture("FULL2")
    x = system.random_point(rng_of(0), fiber=0.0)
    n = math.ceil(T)
    v = cover_value(LeafProblem(system, x, -1), {}, math.log(2) + 0.1, T, n).value
    assert v == pytest.approx(math.exp(-0.1 * n), rel=1e-12)


def test_golden_whole_leaf_bounded_and_stable():
    system = fixture("GOLD")
    P = flow_pressure(system)
    vals = [whole_space_value(system, P, T, int(T) + 12) for T in (12.0, 16.0)]
    assert all(0.5 <= v <= 2.0 for v in vals)
    assert abs(vals[1] / vals[0] - 1) < 0.10


@given(seed=seeds)
def test_monotone_in_cutoff(seed):
    system = fixture("ROOF2")
    P = flow_pressure(system)
    x = system.random_point(rng_of(seed))
    prob = LeafProblem(system, x, -1)
    above = [cover_value(prob, {}, P + 0.2, T, 30).value for T in (4.0, 8.0, 12.0)]
    below = [cover_value(prob, {}, P - 0.2, T, 30).value for T in (4.0, 8.0, 12.0)]
    assert above == sorted(above, reverse=True)
    assert below == sorted(below)


def test_extrapolation_examples():
    assert extrapolate_limit([(5, 1.5), (10, 1.25), (15, 1.125)]).value == pytest.approx(1.0)
    assert extrapolate_limit([(5, 3.0), (10, 0.4), (15, 2.7)]).flagged


def test_bernoulli_leaf_ratios():
    system = fixture("BERN13")
    P = flow_pressure(system)
    u = [leaf_measure_u(system, P, {1: s}, (14.0,)).value for s in (0, 1)]
    s_ = [leaf_measure_s(system, P, {-1: s}, (14.0,)).value for s in (0, 1)]
    assert u[0] / u[1] == pytest.approx(0.5, rel=0.01)
    assert s_[0] / s_[1] == pytest.approx(0.5, rel=0.01)


def test_golden_leaf_ratio_matches_perron():
    system = fixture("GOLD")
    P = flow_pressure(system)
    om = flow_equilibrium(system, P)
    x = reference_points(system)[0]
    ratio = leaf_measure_u(system, P, {1: 1}, (14.0,), point=x).value / \
        leaf_measure_u(system, P, {1: 0}, (14.0,), point=x).value
    want = leaf_eigenmeasure(om, x, {1: 1}) / leaf_eigenmeasure(om, x, {1: 0})
    assert ratio == pytest.approx(want, rel=0.05)


@given(name=st.sampled_from(["GOLD", "ROOF2", "BERN13"]), seed=seeds)
def test_refinement_additivity(name, seed):
    system = fixture(name)
    P = flow_pressure(system)
    x = system.random_point(rng_of(seed))
    prob = LeafProblem(system, x, -1)
    parent = cover_value(prob, {1: x.symbol(1)}, P, 14.0, 34).value
    kids = sum(cover_value(prob, {1: x.symbol(1), 2: s}, P, 14.0, 34).value
               for s in system.sft.successors(x.symbol(1)))
    assert kids == pytest.approx(parent, rel=0.01)
