import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracle
from siqsjump.deterministic import (compute_equilibria, compute_R0, integrate_ode, ode_rhs)
from siqsjump.model import ModelParams, State

# Frozen from oracle.endemic (Newton on the drift equations) / oracle.r0 at 50 digits.
R0_TABLE1 = 1.1538461538461538
ENDEMIC_TABLE1 = (1.7333333333333333, 0.12466124661246613, 0.040650406504065043)


def test_dfe_annihilates_drift(table1):
    assert ode_rhs(table1, State(2.0, 0.0, 0.0)) == (0.0, 0.0, 0.0)


def test_endemic_is_a_fixed_point(table1):
    eq = compute_equilibria(table1)
    assert max(abs(v) for v in ode_rhs(table1, eq.endemic)) < 1e-12


def test_decoupled_linear_case(table1):
    p = table1.replace(beta=0.0)
    got = ode_rhs(p, State(1.0, 1.0, 0.0))
    want = (p.A - p.mu1 + p.gamma, -(p.mu2 + p.delta + p.gamma), p.delta)
    assert got == pytest.approx(want, rel=1e-15)


def test_r0(table1):
    assert compute_R0(table1) == pytest.approx(R0_TABLE1, rel=1e-15)
    assert compute_R0(table1.replace(beta=2 * table1.beta)) == pytest.approx(2 * R0_TABLE1)
    assert compute_R0(table1.replace(beta=0.0)) == 0.0


def test_equilibria(table1):
    eq = compute_equilibria(table1)
    assert (eq.disease_free.S, eq.disease_free.I, eq.disease_free.Q) == (2.0, 0.0, 0.0)
    got = (eq.endemic.S, eq.endemic.I, eq.endemic.Q)
    assert got == pytest.approx(ENDEMIC_TABLE1, rel=1e-14)
    assert eq.stable == "endemic"


def test_no_endemic_below_threshold(table1):
    assert compute_equilibria(table1.replace(beta=0.01)).endemic is None


def test_no_endemic_at_threshold(table1):
    p = table1
    beta1 = p.mu1 * (p.mu2 + p.delta + p.gamma) / p.A
    eq = compute_equilibria(p.replace(beta=beta1))
    assert eq.R0 == pytest.approx(1.0, abs=1e-15)
    assert eq.R0 > 1 or eq.endemic is None
    if eq.endemic is not None:  # rounding put R0 a hair above one
        assert eq.endemic.I < 1e-14


def test_rk4_reaches_endemic(table1):
    traj = integrate_ode(table1, State(0.5, 0.3, 0.1), 2000.0, 0.01)
    assert np.max(np.abs(traj.y[-1] - ENDEMIC_TABLE1)) < 1e-6
    assert traj.clamp_count == 0


def test_rk4_linear_case_is_monotone(table1):
    p = table1.replace(beta=0.0)
    traj = integrate_ode(p, State(0.5, 0.0, 0.0), 200.0, 0.01)
    assert np.all(np.diff(traj.S) > 0)
    assert np.all(traj.I == 0) and np.all(traj.Q == 0)
    exact = 2.0 + (0.5 - 2.0) * np.exp(-p.mu1 * traj.t)
    assert np.max(np.abs(traj.S - exact)) < 1e-10


def test_rk4_fourth_order(table1):
    s0 = State(0.5, 0.3, 0.1)
    ends = [integrate_ode(table1, s0, 50.0, h).y[-1] for h in (1.0, 0.5, 0.25)]
    e1 = np.max(np.abs(ends[0] - ends[1]))
    e2 = np.max(np.abs(ends[1] - ends[2]))
    assert e1 / e2 == pytest.approx(16.0, rel=0.1)


def test_rk4_rejects_bad_grid(table1):
    with pytest.raises(ValueError):
        integrate_ode(table1, State(1, 1, 1), 10.0, 0.0)
    with pytest.raises(ValueError):
        integrate_ode(table1, State(1, 1, 1), 0.001, 0.01)


pos = st.floats(0.0, 10.0)


@given(pos, pos, pos)
def test_total_population_bookkeeping(S, I, Q):
    p = ModelParams(0.1, 0.05, 0.09, 0.052, 0.075, 0.03, 0.01, 0.04)
    dS, dI, dQ = ode_rhs(p, State(S, I, Q))
    assert dS + dI + dQ == pytest.approx(p.A - p.mu1 * S - p.mu2 * I - p.mu3 * Q,
                                         rel=1e-12, abs=1e-12)


def test_frozen_values_match_oracle(table1):
    assert oracle.rel_err(R0_TABLE1, oracle.r0(table1)) < 1e-15
    for got, exact in zip(ENDEMIC_TABLE1, oracle.endemic(table1)):
        assert oracle.rel_err(got, exact) < 1e-15
