import math

import pytest
from hypothesis import given, strategies as st

from siqsjump.model import (JumpAtom, LevyMeasure, ModelParams, NoiseParams, State,
                            eta_extrema, levy_integral, validate)
from siqsjump.presets import PRESETS

EX1_LEVY = LevyMeasure.single(1.0, 0.01, 0.02, 0.05)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_validate(name):
    sc = PRESETS[name]
    assert validate(sc.params, sc.noise, sc.levy).ok


def test_zero_death_rate_is_named(table1):
    rep = validate(table1.replace(mu1=0.0), NoiseParams(), LevyMeasure())
    assert not rep.ok
    assert "mu1" in rep.fields()


def test_mu2_below_mu1_rejected(table1):
    rep = validate(table1.replace(mu2=0.01), NoiseParams(), LevyMeasure())
    assert rep.fields() == ["mu2"]


def test_eta_at_minus_one_fails_A2(table1):
    levy = LevyMeasure.single(1.0, 0.01, -1.0, 0.05)
    rep = validate(table1, NoiseParams(), levy)
    assert rep.fields() == ["atoms[0].eta2"]
    assert "A2" in str(rep)


def test_validation_collects_every_failure(table1):
    rep = validate(table1.replace(A=-1.0, k=0.0), NoiseParams(sigma2=-0.1),
                   LevyMeasure.single(0.0, -2.0, 0.0, 0.0))
    assert set(rep.fields()) == {"A", "k", "sigma2", "atoms[0].w", "atoms[0].eta1"}


def test_levy_integral_examples():
    assert levy_integral(EX1_LEVY, lambda e1, e2, e3: e2**2) == pytest.approx(0.0004, rel=1e-15)
    assert levy_integral(LevyMeasure(), lambda *e: 1.0) == 0.0
    two = LevyMeasure((JumpAtom(0.5, 0, 0.02, 0), JumpAtom(0.5, 0, 0.04, 0)))
    assert levy_integral(two, lambda e1, e2, e3: e2) == pytest.approx(0.03, rel=1e-15)


def test_eta_extrema_examples():
    assert eta_extrema(EX1_LEVY) == [(0.05, 0.01)]
    assert eta_extrema(LevyMeasure.single(1, 0.03, 0.03, 0.03)) == [(0.03, 0.03)]
    assert eta_extrema(LevyMeasure.single(1, -0.1, 0.2, 0.0)) == [(0.2, -0.1)]
    assert eta_extrema(LevyMeasure()) == []


etas = st.floats(-0.9, 2.0, allow_nan=False)
atoms = st.builds(JumpAtom, st.floats(0.01, 5.0), etas, etas, etas)
measures = st.lists(atoms, max_size=5).map(lambda a: LevyMeasure(tuple(a)))


@given(measures, st.floats(-3, 3), st.floats(-3, 3))
def test_levy_integral_is_linear(levy, a, b):
    f = lambda e1, e2, e3: e1 * e2 + e3
    h = lambda e1, e2, e3: e2**2
    lhs = levy_integral(levy, lambda *e: a * f(*e) + b * h(*e))
    rhs = a * levy_integral(levy, f) + b * levy_integral(levy, h)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@given(measures, measures)
def test_levy_integral_is_additive_over_atoms(m1, m2):
    f = lambda e1, e2, e3: math.log1p(e2) ** 2
    joined = LevyMeasure(m1.atoms + m2.atoms)
    assert levy_integral(joined, f) == pytest.approx(
        levy_integral(m1, f) + levy_integral(m2, f), rel=1e-12, abs=1e-12)


@given(measures)
def test_eta_extrema_bracket_each_multiplier(levy):
    for (hi, lo), a in zip(eta_extrema(levy), levy.atoms):
        assert all(lo <= e <= hi for e in a.etas)


def test_value_objects_are_frozen(table1):
    with pytest.raises(Exception):
        table1.A = 1.0
    assert State(1, 2, 3).N == 6
    assert NoiseParams(0.01, 0.03, 0.07, 0.02).sigma_bar() == pytest.approx(0.0049)
