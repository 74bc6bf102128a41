import math

import numpy as np
import pytest

from ec3lab.branching import BranchPoint, Supercritical, expected_sets, lambda1, transition_matrix


def random_points(rng, count, lam_max):
    """Random points whose lambda1 lies below ``lam_max``."""
    pts = []
    while len(pts) < count:
        x = rng.uniform(0, 0.95)
        s2 = rng.uniform(0, 0.3)
        s3 = rng.uniform(0, 0.6)
        p = BranchPoint(x, s2, s3)
        if lambda1(p) < lam_max:
            pts.append(p)
    return pts


def test_transition_examples():
    tm = transition_matrix(BranchPoint(0, 0, 0.55))
    assert tm.a == pytest.approx(3.3) and tm.b == 0
    tm = transition_matrix(BranchPoint(0, 0.5, 0))
    assert (tm.a, tm.b) == (1.0, 1.0)
    tm = transition_matrix(BranchPoint(0.5, 0.1, 0.2))
    assert tm.a == pytest.approx(2.8, abs=1e-15) and tm.b == pytest.approx(0.4, abs=1e-15)


def test_lambda_examples():
    assert lambda1(BranchPoint(0.3, 0.0, 0.4)) == 0.0
    assert lambda1(BranchPoint(0, 0.5, 0)) == 1.0


def test_rejects_x_at_one():
    with pytest.raises(ValueError):
        BranchPoint(1.0, 0.1, 0.1)
    with pytest.raises(ValueError):
        BranchPoint(0.2, -0.1, 0.1)


def test_lambda_matches_power_iteration():
    rng = np.random.default_rng(0)
    pts = random_points(rng, 1000, lam_max=0.999)
    # M + I is primitive with Perron root 1 + rho(M); iterate all points at once
    A = np.array([transition_matrix(p).as_array() + np.eye(2) for p in pts])
    v = np.ones((len(pts), 2))
    for _ in range(5000):
        w = np.einsum("kij,kj->ki", A, v)
        rho = np.linalg.norm(w, axis=1) / np.linalg.norm(v, axis=1)
        v = w / np.linalg.norm(w, axis=1, keepdims=True)
    closed = np.array([lambda1(p) for p in pts])
    assert np.abs((rho - 1.0) - closed).max() < 1e-9


def test_lambda_squared_is_ab():
    rng = np.random.default_rng(1)
    for p in random_points(rng, 1000, lam_max=10.0):
        tm = transition_matrix(p)
        assert abs(lambda1(p) ** 2 - tm.a * tm.b) < 1e-12 * max(1.0, tm.a * tm.b)


def test_expected_sets_examples():
    r = 0.4
    st = expected_sets(BranchPoint(0, 0, r))
    assert st.m_T == 1.0 and st.m_F == pytest.approx(1 + 6 * r)
    st = expected_sets(BranchPoint(0.63, 0, 0))
    assert (st.m_T, st.m_F) == (1.0, 1.0)


def test_expected_sets_matches_truncated_series():
    # lambda1 <= 0.85 so the K = 200 tail (about lambda1**200) is below 1e-14
    rng = np.random.default_rng(2)
    p0 = np.array([1.0, 1.0])
    for p in random_points(rng, 1000, lam_max=0.85):
        M = transition_matrix(p).as_array()
        total = np.zeros(2)
        term = p0.copy()
        for _ in range(201):
            total += term
            term = M @ term
        st = expected_sets(p)
        assert abs(total[0] - st.m_T) < 1e-10 * max(1, st.m_T)
        assert abs(total[1] - st.m_F) < 1e-10 * max(1, st.m_F)


def test_fixed_point_identities():
    rng = np.random.default_rng(3)
    for p in random_points(rng, 1000, lam_max=0.99):
        tm = transition_matrix(p)
        st = expected_sets(p)
        assert abs(st.m_T - (1 + tm.b * st.m_F)) < 1e-10 * st.m_T
        assert abs(st.m_F - (1 + tm.a * st.m_T)) < 1e-10 * st.m_F
        assert st.m_T >= 1 and st.m_F >= st.m_T


def test_monotone_in_densities():
    def totals(points):
        return [expected_sets(q).total for q in points if lambda1(q) < 1]

    for x in (0.0, 0.3, 0.6):
        for s3 in np.linspace(0.0, 0.2, 5):
            t = totals(BranchPoint(x, s2, s3) for s2 in np.linspace(0, 0.1, 11))
            assert len(t) >= 2 and all(b > a for a, b in zip(t, t[1:]))
        for s2 in np.linspace(0.01, 0.08, 5):
            t = totals(BranchPoint(x, s2, s3) for s3 in np.linspace(0, 0.1, 11))
            assert len(t) >= 2 and all(b > a for a, b in zip(t, t[1:]))


def test_blows_up_near_criticality():
    # pick s2 on rays of fixed s3 so that lambda1 = 0.999 exactly
    for x, s3 in [(0.0, 0.2), (0.3, 0.1), (0.29, 0.546 * 0.71 ** 3)]:
        target = 0.999 * (1 - x) / 2
        s2 = (-3 * s3 + math.sqrt(9 * s3 * s3 + 4 * target * target)) / 2
        p = BranchPoint(x, s2, s3)
        assert lambda1(p) == pytest.approx(0.999, abs=1e-12)
        assert expected_sets(p).total > 100


def test_supercritical_is_rejected():
    with pytest.raises(Supercritical):
        expected_sets(BranchPoint(0, 0.5, 0))
    with pytest.raises(Supercritical):
        expected_sets(BranchPoint(0.2, 0.3, 0.3))


def test_swap_flag_exchanges_totals():
    p = BranchPoint(0.2, 0.05, 0.2)
    a, b = expected_sets(p), expected_sets(p, swap=True)
    assert (a.m_T, a.m_F) == (b.m_F, b.m_T)
