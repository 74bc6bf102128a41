import math

import numpy as np
import pytest

from ec3lab.harness import ODE_TRAJECTORY_HEADER, read_trajectory_csv, write_trajectory_csv
from ec3lab.ode import (
    FOREST_DENSITY,
    OdeConfig,
    Terminal,
    critical_r,
    integrate,
    is_feasible,
    max_lambda1,
    policy_drift,
)
from ec3lab.policy import Policy, RANDOM_3CLAUSE, RANDOM_VARIABLE, SHORT_CLAUSE


def s3_error(traj):
    """Sup-norm gap to the exact r(1-x)^3 on the grid points (the interpolated end excluded)."""
    x, s3 = traj.x[:-1], traj.s3[:-1]
    return np.abs(s3 - traj.config.r * (1 - x) ** 3).max()


@pytest.mark.parametrize("kw", [dict(r=0.0), dict(r=-1.0), dict(r=0.5, step=0.0), dict(r=0.5, step=0.02),
                                dict(r=0.5, x_max=1.0), dict(r=float("nan"))])
def test_config_rejects(kw):
    with pytest.raises(ValueError):
        OdeConfig(**kw)


@pytest.mark.parametrize("r", [0.2, 0.4, 0.546])
def test_s3_closed_form(r):
    assert s3_error(integrate(OdeConfig(r, step=1e-3))) < 1e-8


def test_rk4_order():
    # ds3/dx does not involve s2, so s3 isolates the scheme's order. SC stops at
    # x0 ~ 0.65; near x = 1 the step is not small against 1 - x and the ratio drops.
    e1 = s3_error(integrate(OdeConfig(0.4, step=1e-2)))
    e2 = s3_error(integrate(OdeConfig(0.4, step=5e-3)))
    assert 12 <= e1 / e2 <= 20


def test_drift_at_origin():
    r = 0.4
    d2, d3 = policy_drift(SHORT_CLAUSE, 0.0, 0.0, r)
    m_T, m_F = 1.0, 1 + 6 * r
    assert d3 == pytest.approx(-3 * r, abs=1e-15)
    assert d2 == pytest.approx(m_F / (m_T + m_F) * 3 * r - 1 / (m_T + m_F), abs=1e-15)


def test_policy_drifts_differ_only_where_expected():
    x, s2, s3 = 0.2, 0.05, 0.2
    sc = policy_drift(SHORT_CLAUSE, x, s2, s3)
    rv = policy_drift(RANDOM_VARIABLE, x, s2, s3)
    r3 = policy_drift(RANDOM_3CLAUSE, x, s2, s3)
    w = 1 - x
    for d in (sc, rv):
        assert d[1] == pytest.approx(-3 * s3 / w, rel=1e-14)
    assert r3[1] < -3 * s3 / w
    assert rv[0] > sc[0]


def test_mix_of_pure_equals_pure():
    a = integrate(OdeConfig(0.5, Policy.parse("mix:1,0,0"), step=1e-4))
    b = integrate(OdeConfig(0.5, SHORT_CLAUSE, step=1e-4))
    assert np.array_equal(a.s2, b.s2) and a.terminal == b.terminal


def test_mix_lies_between():
    r_sc = integrate(OdeConfig(0.5, step=1e-4)).terminal_x
    r_mix = integrate(OdeConfig(0.5, Policy.parse("mix:0.5,0,0.5"), step=1e-4))
    assert r_mix.terminal is Terminal.S2_EXTINCT and r_mix.terminal_x != r_sc


def test_constants_at_0546():
    tr = integrate(OdeConfig(0.546))
    x_at, lam = max_lambda1(tr)
    assert tr.terminal is Terminal.S2_EXTINCT
    assert 0.991 <= lam < 1.0 and 0.27 <= x_at <= 0.31
    assert 0.77 <= tr.x0 <= 0.81
    assert 0.015 <= tr.residual_density <= 0.025


def test_trajectory_invariants():
    for pol in (SHORT_CLAUSE, RANDOM_VARIABLE):
        tr = integrate(OdeConfig(0.5, pol, step=1e-4))
        assert np.all(np.diff(tr.x) > 0)
        assert np.all(np.diff(tr.s3) < 0) and np.all(tr.s3 > 0)
        assert np.all(tr.s2[:-1] >= 0)
    # with p0 = (1, 1) a true setting spawns more falses than the reverse
    sc = integrate(OdeConfig(0.5, step=1e-4))
    assert np.all(sc.m_F >= sc.m_T)


def test_single_zero_crossing():
    for r in (0.3, 0.4, 0.5, 0.54):
        tr = integrate(OdeConfig(r, step=1e-4))
        assert tr.terminal is Terminal.S2_EXTINCT
        assert np.all(tr.s2[1:-1] > 0) and tr.s2[-1] == 0.0


def test_low_density_is_deeply_subcritical():
    assert max_lambda1(integrate(OdeConfig(0.3, step=1e-4)))[1] < 0.9


def test_high_density_goes_supercritical():
    tr = integrate(OdeConfig(0.60, step=1e-4))
    assert tr.terminal is Terminal.SUPERCRITICAL
    assert 0.1 < tr.terminal_x < 0.5
    assert math.isnan(tr.residual_density) and not is_feasible(tr)


@pytest.mark.parametrize("pol", [SHORT_CLAUSE, RANDOM_VARIABLE, RANDOM_3CLAUSE])
def test_floor_is_feasible(pol):
    tr = integrate(OdeConfig(0.1, pol, step=1e-4))
    assert tr.terminal is not Terminal.SUPERCRITICAL
    assert max_lambda1(tr)[1] < 0.5
    assert is_feasible(tr)


def test_r3_falls_back_when_3clauses_run_out():
    tr = integrate(OdeConfig(0.1, RANDOM_3CLAUSE, step=1e-4))
    assert tr.s3_exhausted_at is not None and tr.s3[-1] == 0.0


def test_step_robustness():
    a = integrate(OdeConfig(0.546, step=1e-5))
    b = integrate(OdeConfig(0.546, step=5e-6))
    assert abs(max_lambda1(a)[1] - max_lambda1(b)[1]) < 1e-4
    assert abs(a.x0 - b.x0) < 1e-4
    assert abs(a.residual_density - b.residual_density) < 1e-4


def test_critical_bracket_consistency():
    tol = 1e-3
    r = critical_r(SHORT_CLAUSE, tol=tol, step=1e-4)
    assert is_feasible(integrate(OdeConfig(r - tol, step=1e-4)))
    assert not is_feasible(integrate(OdeConfig(r + 2 * tol, step=1e-4)))


def test_critical_rejects_degenerate_bracket():
    with pytest.raises(ValueError, match="degenerate"):
        critical_r(SHORT_CLAUSE, lo=0.2, hi=0.3, step=1e-3)
    with pytest.raises(ValueError):
        critical_r(SHORT_CLAUSE, tol=1e-6)


def test_guard_matches_forest_threshold():
    assert FOREST_DENSITY == pytest.approx(1 / 6)


def test_swap_flag_is_a_different_trajectory():
    tr = integrate(OdeConfig(0.546, swap=True, step=1e-4))
    assert tr.terminal is Terminal.S2_EXTINCT and tr.x0 < 0.6


def test_csv_output_round_trip():
    tr = integrate(OdeConfig(0.4, step=1e-3))
    text = write_trajectory_csv(tr.rows(10), ODE_TRAJECTORY_HEADER)
    assert text.splitlines()[0] == "x,s2,s3,lambda1,mT,mF"
    header, data = read_trajectory_csv(text)
    assert header == ODE_TRAJECTORY_HEADER
    assert np.allclose(data, tr.rows(10), rtol=1e-11, atol=0)
    assert data[-1, 0] == pytest.approx(tr.terminal_x, rel=1e-11)
