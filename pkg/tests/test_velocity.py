import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemotaxis_moments.velocity import (
    QUADRANTS,
    VelocityDomain1D,
    VelocityDomain2D,
    basis_moments_1d,
    basis_moments_2d,
    limiter_phi,
    limiter_phi_vec,
    quadrature,
    third_moment_1d,
    third_moments_2d,
)

D1, D2 = VelocityDomain1D, VelocityDomain2D


@pytest.mark.parametrize(
    "dom, expected",
    [(D1.PLUS, (1, 0.5, 1 / 3)), (D1.MINUS, (1, -0.5, 1 / 3)), (D1.FULL, (2, 0, 2 / 3))],
)
def test_basis_moments_1d(dom, expected):
    assert np.allclose(basis_moments_1d(dom), expected, atol=1e-15)


def test_measures():
    assert D1.FULL.measure == 2 and D1.PLUS.measure == 1 and D1.MINUS.measure == 1
    assert all(np.isclose(q.measure, np.pi) for q in QUADRANTS)
    assert np.isclose(D2.FULL.measure, 4 * np.pi)


def test_basis_moments_pp():
    m0, m1, m2 = basis_moments_2d(D2.PP)
    assert np.isclose(m0, np.pi)
    assert np.allclose(m1, [np.pi / 2, np.pi / 2])
    assert np.allclose(m2, [[np.pi / 3, 2 / 3], [2 / 3, np.pi / 3]])


def test_basis_moments_mm_signs():
    _, m1, m2 = basis_moments_2d(D2.MM)
    assert np.allclose(m1, [-np.pi / 2, -np.pi / 2])
    assert np.isclose(m2[0, 1], 2 / 3)
    assert np.isclose(basis_moments_2d(D2.MP)[2][0, 1], -2 / 3)


def test_quadrants_sum_to_full_disk():
    full = basis_moments_2d(D2.FULL)
    parts = [basis_moments_2d(q) for q in QUADRANTS]
    for k in range(3):
        assert np.allclose(sum(p[k] for p in parts), full[k], atol=1e-12)
    assert np.allclose(full[2], 4 * np.pi / 3 * np.eye(2))


@pytest.mark.parametrize("dom", list(D1))
def test_quadrature_reproduces_1d_moments(dom):
    rule = quadrature(dom, 64)
    v = rule.nodes
    m0, m1, m2 = basis_moments_1d(dom)
    assert abs(rule.integrate(np.ones_like(v)) - m0) < 1e-12
    assert abs(rule.integrate(v) - m1) < 1e-12
    assert abs(rule.integrate(v**2) - m2) < 1e-12
    assert abs(rule.integrate(v**3) - third_moment_1d(dom)) < 1e-12
    assert np.all(rule.weights > 0)


@pytest.mark.parametrize("dom", list(D2))
def test_quadrature_reproduces_2d_moments(dom):
    rule = quadrature(dom, 64)
    vx, vy = rule.nodes[:, 0], rule.nodes[:, 1]
    m0, m1, m2 = basis_moments_2d(dom)
    assert abs(rule.integrate(np.ones_like(vx)) - m0) < 1e-10
    assert np.allclose([rule.integrate(vx), rule.integrate(vy)], m1, atol=1e-10)
    got = [[rule.integrate(vx * vx), rule.integrate(vx * vy)], [rule.integrate(vy * vx), rule.integrate(vy * vy)]]
    assert np.allclose(got, m2, atol=1e-10)
    if dom is not D2.FULL:
        m3 = third_moments_2d(dom)
        comps = (vx, vy)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    assert abs(rule.integrate(comps[i] * comps[j] * comps[k]) - m3[i, j, k]) < 1e-10


def test_quadrature_rejects_small_n():
    with pytest.raises(ValueError):
        quadrature(D1.PLUS, 1)
    with pytest.raises(ValueError):
        quadrature(D2.PP, (1, 8))


def test_limiter_examples():
    assert limiter_phi(0.0, 0.7) == 0.0
    assert np.isclose(limiter_phi(1.0, 0.0), 1 / np.sqrt(2))
    out = limiter_phi_vec(np.array([3.0, 4.0]), 1.0)
    assert np.isclose(np.linalg.norm(out), 4 / np.sqrt(17) + 1)
    assert np.allclose(out / np.linalg.norm(out), [0.6, 0.8])


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(finite, min_size=2, max_size=2), st.floats(0, 20))
def test_limiter_bound_and_identity(g, s):
    g = np.array(g)
    out = limiter_phi_vec(g, s)
    assert np.linalg.norm(out) <= s + 1 + 1e-12
    if np.linalg.norm(g) <= s:
        assert np.array_equal(out, g)


@given(st.floats(0, 10), st.floats(-1, 1))
@settings(max_examples=50)
def test_limiter_continuous_at_threshold(s, sign):
    g = np.copysign(s, sign)
    lo, hi = limiter_phi(g * (1 - 1e-12), s), limiter_phi(g * (1 + 1e-12), s)
    assert abs(lo - hi) < 1e-9


@given(finite, st.floats(0, 5))
def test_limiter_1d_matches_vector_version(g, s):
    assert np.isclose(limiter_phi(g, s), limiter_phi_vec(np.array([g, 0.0]), s)[0], rtol=1e-14, atol=0)
