import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chemotaxis_moments.realizability import (
    RHO_FLOOR,
    check_full_1d,
    check_full_2d,
    check_half,
    check_quarter,
    project_full_1d,
    project_full_2d,
    project_half,
    project_quarter,
)
from chemotaxis_moments.velocity import QUADRANTS, VelocityDomain2D


def _half(rho, q, r):
    # plus side only; the minus side is an isotropic state
    return check_half(rho, 1.0, q, -0.5, r, 1 / 3)


def test_check_half_examples():
    assert _half(1.0, 0.5, 1 / 3).ok
    rep = _half(1.0, 0.0, -1 / 6)
    assert not rep.ok and rep.location[1] == "r_p_lower"
    assert np.isclose(rep.worst_violation, 1 / 6)
    assert _half(1.0, 1.0, 1.0).ok


def test_check_half_without_second_moments():
    assert check_half(1.0, 1.0, 0.3, -0.3).ok
    rep = check_half(1.0, 1.0, 0.3, 0.2)
    assert not rep.ok and rep.location[1] == "q_m"
    assert check_half(1.0, 1.0, 0.3, 0.2, tol=0.25).ok
    with pytest.raises(ValueError):
        check_half(1.0, 1.0, 0.0, 0.0, tol=-1)


def test_check_reports_location():
    rho = np.array([1.0, 1.0, 1.0])
    rep = check_full_1d(rho, np.array([0.0, 1.5, 1.2]))
    assert rep.location == (1, "|q|") and np.isclose(rep.worst_violation, 0.5)


def test_project_half_examples():
    assert project_half(1.0, -0.3, +1) == (1.0, 0.0)
    rho, q = project_half(1e-20, 0.0, +1)
    assert rho == RHO_FLOOR and q == 0.0
    assert project_half(0.5, 0.9, +1) == (0.5, 0.5)
    assert project_half(0.5, -0.9, -1) == (0.5, -0.5)


def test_project_quarter_examples():
    rho, q = project_quarter(1.0, np.array([-0.1, 0.4]), VelocityDomain2D.PP)
    assert rho == 1.0 and np.array_equal(q, [0.0, 0.4])
    rho, q = project_quarter(1.0, np.array([0.9, 0.9]), VelocityDomain2D.PP)
    assert np.hypot(*q) <= 1.0 and np.isclose(np.hypot(*q), 1.0)
    assert np.isclose(q[0], q[1])
    q0 = np.array([0.2, 0.3])
    assert np.array_equal(project_quarter(1.0, q0, VelocityDomain2D.PP)[1], q0)


vals = arrays(float, 6, elements=st.floats(-10, 10))


@given(vals, vals, st.sampled_from([1, -1]))
def test_project_half_idempotent_and_realizable(rho, q, sign):
    r1, q1 = project_half(rho, q, sign)
    r2, q2 = project_half(r1, q1, sign)
    assert np.array_equal(r1, r2) and np.array_equal(q1, q2)
    if sign > 0:
        assert check_half(r1, 1.0, q1, 0.0).ok
    else:
        assert check_half(1.0, r1, 0.0, q1).ok


@given(vals, vals)
def test_project_half_keeps_strictly_realizable(rho, q):
    rho = np.abs(rho) + 1.0
    q = np.abs(q) % 1.0 * rho * 0.99
    r1, q1 = project_half(rho, q, +1)
    assert np.array_equal(r1, rho) and np.array_equal(q1, q)


@given(vals, vals)
def test_project_full_1d(rho, q):
    r1, q1 = project_full_1d(rho, q)
    assert check_full_1d(r1, q1).ok
    assert all(np.array_equal(a, b) for a, b in zip(project_full_1d(r1, q1), (r1, q1)))


@given(arrays(float, (4, 5), elements=st.floats(-10, 10)), arrays(float, (4, 5, 2), elements=st.floats(-10, 10)))
def test_project_quarter_idempotent_and_realizable(rho, q):
    out_r, out_q = np.empty_like(rho), np.empty_like(q)
    for k, quad in enumerate(QUADRANTS):
        out_r[k], out_q[k] = project_quarter(rho[k], q[k], quad)
        r2, q2 = project_quarter(out_r[k], out_q[k], quad)
        assert np.array_equal(r2, out_r[k]) and np.array_equal(q2, out_q[k])
    assert check_quarter(out_r, out_q[..., 0], out_q[..., 1]).ok


@given(arrays(float, 5, elements=st.floats(-10, 10)), arrays(float, (5, 2), elements=st.floats(-10, 10)))
def test_project_full_2d(rho, q):
    r1, q1 = project_full_2d(rho, q)
    assert check_full_2d(r1, q1[:, 0], q1[:, 1]).ok
    r2, q2 = project_full_2d(r1, q1)
    assert np.array_equal(r1, r2) and np.array_equal(q1, q2)
