import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from carathedyn.config import fixture, load_fixture
from carathedyn.oracle import flow_equilibrium, flow_pressure, gibbs_cylinder
from carathedyn.product import (GlobalProductMeasure, LeafMeasures, ProductError, ProductMeasure,
                                integrate_exp_affine, make_rectangle, srb_product_global)
from carathedyn.system import CylinderSet, completions
from conftest import rng_of, seeds


@given(c=st.floats(-5, 5), k=st.floats(-20, 20), a=st.floats(-2, 2), w=st.floats(1e-6, 3))
def test_integrate_exp_affine_matches_quadrature(c, k, a, w):
    got = integrate_exp_affine(lambda f: c + k * f, a, a + w)
    with mpmath.workdps(80):
        want = mpmath.quad(lambda f: mpmath.exp(c + k * f), [a, a + w])
    assert math.isclose(got, float(want), rel_tol=1e-9)


def test_integrate_rejects_curved_density():
    with pytest.raises(ProductError):
        integrate_exp_affine(lambda f: f * f, 0.0, 1.0)


@pytest.fixture(scope="module", params=["FULL2", "BERN13", "GOLD"])
def product(request):
    system = fixture(request.param)
    P = flow_pressure(system)
    lm = LeafMeasures(system, P, 12.0, 24)
    return system, P, lm, ProductMeasure(make_rectangle(system, 0), lm)


def _random_set(system, rect, rng):
    lo, hi = -int(rng.integers(0, 3)), int(rng.integers(0, 3))
    words = completions(system.sft, {0: rect.symbol}, lo, hi)
    a, b = sorted(rng.uniform(*rect.band, 2))
    return CylinderSet(lo, words[int(rng.integers(len(words)))], (float(a), float(b)))


@given(seed=seeds)
def test_four_formulas_agree(product, seed):
    system, _, _, pm = product
    Z = _random_set(system, pm.rect, rng_of(seed))
    vals = [pm.value(Z, k) for k in (1, 2, 3, 4)]
    assert max(vals) <= min(vals) * (1 + 1e-9)


@given(seed=seeds)
def test_additive_under_refinement(product, seed):
    system, _, _, pm = product
    Z = _random_set(system, pm.rect, rng_of(seed))
    parts = Z.refinements(system.sft, "forward")
    assert math.isclose(sum(pm.value(c) for c in parts), pm.value(Z), rel_tol=1e-9)
    a, b = Z.fiber
    m = 0.5 * (a + b)
    halves = pm.value(CylinderSet(Z.lo, Z.word, (a, m))) + pm.value(CylinderSet(Z.lo, Z.word, (m, b)))
    assert math.isclose(halves, pm.value(Z), rel_tol=1e-9)


def test_proportional_to_oracle(product):
    system, P, lm, pm = product
    om = flow_equilibrium(system, P)
    rng = rng_of(3)
    ratios = [pm.value(Z) / gibbs_cylinder(om, Z) for Z in (_random_set(system, pm.rect, rng) for _ in range(12))]
    assert max(ratios) / min(ratios) - 1 < 1e-9


def test_global_measure_normalizes(product):
    system, _, lm, _ = product
    gpm = GlobalProductMeasure(system, lm)
    om = flow_equilibrium(system)
    for Z in (CylinderSet(0, (0,)), CylinderSet(-1, (0, 1)) if system.sft.allowed(0, 1) else CylinderSet(0, (1,))):
        assert math.isclose(gpm.normalized(Z), gibbs_cylinder(om, Z), rel_tol=1e-9)


def test_srb_product_matches_bernoulli():
    spec = load_fixture("SRB3")
    system = spec.system
    lm = LeafMeasures(system, 0.0, 12.0, 24)
    om = flow_equilibrium(system, 0.0)
    sets = [CylinderSet(-1, w) for w in system.sft.words(3)] + [CylinderSet(0, ())]
    ratios = [srb_product_global(system, spec.expansion, Z, lm) / gibbs_cylinder(om, Z) for Z in sets]
    assert max(ratios) / min(ratios) - 1 < 1e-9
