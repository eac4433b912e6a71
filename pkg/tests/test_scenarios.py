from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chemotaxis_moments.params import ModelParams
from chemotaxis_moments.realizability import check_full_1d, check_full_2d, check_half, check_quarter
from chemotaxis_moments.runner import check_state, run
from chemotaxis_moments.scenarios import (
    FLOOR,
    MODELS_1D,
    MODELS_2D,
    QIDX,
    SCENARIOS,
    default_config,
    error_norm,
    initial_state,
    run_superposition_reference,
)
from chemotaxis_moments.transport import total_density
from chemotaxis_moments.velocity import QUADRANTS, basis_moments_2d

S2 = np.sqrt(2)


def _pt(name, *xs):
    return SCENARIOS[name].moments(*(np.atleast_1d(np.asarray(x, float)) for x in xs))


def test_published_parameters():
    expected = {
        "one_spike_1d": (2, 2, 1, 1, 1, 0),
        "two_spikes_1d": (0.5, 0.5, 0, 0, 0, 0),
        "kurganov_interior": (0.5, 1.2 * (1 + 4 * np.pi**2), 1, 1, 1, 0),
        "one_spike_2d": (2, 4, 8, 1, 1, 0),
        "two_spikes_diag": (1 / np.pi, 2 / np.pi, 0, 0, 0, 1),
        "two_spikes_axial": (1 / np.pi, 2 / np.pi, 0, 0, 0, 1),
    }
    for name, vals in expected.items():
        p = SCENARIOS[name].params
        assert (p.lam, p.alpha, p.beta, p.delta, p.D_m, p.s) == pytest.approx(vals, rel=1e-15)
    assert SCENARIOS["kurganov_boundary"].params == SCENARIOS["kurganov_interior"].params


def test_one_spike_1d_data():
    rp, rm, qp, qm = _pt("one_spike_1d", [0.0, 0.3, -1.0])
    assert rp[0] == 0.5 * (100 + 1e-4)
    assert np.array_equal(rp, rm)
    assert np.allclose(qp / rp, 0.5) and np.allclose(qm / rm, -0.5)
    assert np.all(SCENARIOS["one_spike_1d"].chemo(np.linspace(-3, 3, 7)) == 0)


def test_two_spikes_1d_data():
    rp, rm, qp, qm = _pt("two_spikes_1d", [-1.0, 1.0])
    assert qp[0] == 100.0 and qm[1] == -100.0
    assert rp[0] == 100 + FLOOR and rm[1] == 100 + FLOOR
    cfg = default_config("two_spikes_1d", "m1_1d", dx=0.02)
    state, chemo = initial_state(cfg)
    x = cfg.grid.x
    assert state.q[np.argmin(np.abs(x + 1))] > 90 and state.q[np.argmin(np.abs(x - 1))] < -90
    m = SCENARIOS["two_spikes_1d"].chemo(np.array([0.0, 1.0, -2.0]))
    assert m[0] == 9.0 and np.all(m[1:] < 9)


def test_two_spikes_kinetic_data_matches_moments():
    cfg = default_config("two_spikes_1d", "kinetic", dx=0.02, nv=64)
    state, _ = initial_state(cfg)
    hm = state.half_moments()
    ref, _ = initial_state(replace(cfg, model="hm1"))
    # beam mass agrees; the kinetic data have no density floor
    assert np.isclose(hm.rho_p.sum(), ref.rho_p.sum() - FLOOR * cfg.grid.nx, rtol=1e-3)
    # a half-Gaussian in v at the domain edge moves at mean speed 1 - sqrt(0.01/pi)
    assert np.isclose(hm.q_m.sum() / ref.q_m.sum(), 1 - np.sqrt(0.01 / np.pi), atol=2e-3)


@pytest.mark.parametrize("name, sign", [("kurganov_interior", -1), ("kurganov_boundary", 1)])
def test_kurganov_data(name, sign):
    rp, rm, _, _ = _pt(name, [0.0, 0.5])
    rho = rp + rm
    assert np.isclose(rho[1], 1 - sign * 0.01 * (1 + 4 * np.pi**2))
    assert (rho[1] > rho[0]) == (sign < 0)
    state, chemo = initial_state(default_config(name, "hm1"))
    assert np.isclose(state.rho.sum() * 0.02, 1.0, atol=1e-12)
    # chemoattractant in phase with the density
    assert np.corrcoef(state.rho, chemo.m)[0, 1] > 0.999


def test_one_spike_2d_data():
    rho, qx, qy = _pt("one_spike_2d", 0.0, 0.0)
    assert np.allclose(rho[:, 0], 25.000025, rtol=1e-15)
    m1 = np.stack([basis_moments_2d(q)[1] for q in QUADRANTS])
    assert np.allclose(qx[:, 0], rho[:, 0] / np.pi * m1[:, 0])
    assert np.allclose(qy[:, 0], rho[:, 0] / np.pi * m1[:, 1])


def test_two_spikes_diag_data():
    rho, qx, qy = _pt("two_spikes_diag", 1 / S2, -1 / S2)
    assert np.isclose(rho[QIDX["mp"], 0], 100 + FLOOR)
    assert np.isclose(qx[QIDX["mp"], 0], -100 / S2) and np.isclose(qy[QIDX["mp"], 0], 100 / S2)
    rho, qx, qy = _pt("two_spikes_diag", np.linspace(-3, 3, 41), np.linspace(3, -3, 41))
    assert np.all(qx[QIDX["mp"]] <= 0) and np.all(qx[QIDX["mm"]] <= 0)


def test_two_spikes_axial_data():
    rho, qx, qy = _pt("two_spikes_axial", [1.0, 0.0], [0.0, 1.0])
    mm = QIDX["mm"]
    # both beams put half their strength into the -- quadrant
    assert np.allclose(rho[mm], 50 + FLOOR, rtol=1e-6)
    assert np.isclose(qx[mm, 0], -50) and np.isclose(qy[mm, 1], -50)
    assert np.isclose(rho[QIDX["mp"], 0], 50 + FLOOR) and np.isclose(rho[QIDX["pm"], 1], 50 + FLOOR)
    assert np.isclose(rho[QIDX["pp"], 0], FLOOR)


@pytest.mark.parametrize("name", list(SCENARIOS))
def test_initial_states_realizable(name):
    sc = SCENARIOS[name]
    models = MODELS_1D if sc.dim == 1 else MODELS_2D
    for model in models:
        dx = 0.1 if sc.dim == 1 else 0.2
        if name.startswith("kurganov"):
            dx = 0.05
        state, chemo = initial_state(default_config(name, model, dx=dx))
        assert check_state(state).ok, (name, model)
        assert np.all(chemo.m >= 0)


def test_default_config_and_validation():
    cfg = default_config("one_spike_1d", "hm1")
    assert cfg.grid.nx == 300 and cfg.t_final == 5.0
    assert cfg.snapshot_times == (0.0, 1.25, 2.5, 3.75, 5.0)
    assert default_config("one_spike_2d", "qm1").grid.shape == (60, 60)
    with pytest.raises(ValueError):
        default_config("one_spike_1d", "qm1")
    with pytest.raises(ValueError):
        default_config("nope", "hm1")
    with pytest.raises(ValueError):
        default_config("one_spike_1d", "hm1", snapshot_times=(6.0,))
    with pytest.raises(ValueError):
        default_config("one_spike_1d", "m1_1d", engine="compiled")


def test_error_norm_examples():
    a = np.random.default_rng(0).uniform(size=50)
    assert error_norm(a, a) == 0.0
    assert np.isclose(error_norm(np.full(10, 0.3), np.zeros(10), "l1", 0.1), 0.3)
    assert np.isclose(error_norm(np.full(10, 0.3), np.zeros(10), "l2", 0.1), 0.3)
    assert np.isclose(error_norm(np.full(10, 0.3), np.zeros(10), np.inf), 0.3)
    with pytest.raises(ValueError):
        error_norm(np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError):
        error_norm(np.zeros(3), np.zeros(3), "l3")


@given(*(arrays(float, 12, elements=st.floats(-1e3, 1e3)) for _ in range(3)), st.sampled_from(["l1", "l2", "linf"]))
def test_error_norm_triangle(a, b, c, p):
    assert error_norm(a, c, p, 0.5) <= error_norm(a, b, p, 0.5) + error_norm(b, c, p, 0.5) + 1e-9


def test_superposition_of_linear_scheme_is_exact():
    params = ModelParams(lam=0.05, alpha=0.0, beta=0.0, delta=0.0, D_m=0.0, s=1.0)
    for name in ("two_spikes_diag", "two_spikes_axial"):
        cfg = default_config(name, "qp1", dx=0.2, t_final=2.0, params=params, project=False)
        joint = run(cfg)
        sup = run_superposition_reference(cfg, model=None)
        for snap, (t, rho) in zip(joint.snapshots, sup):
            assert snap.time == t
            assert np.max(np.abs(snap.arrays["rho"] - rho)) <= 1e-10 * np.abs(rho).max()


def test_superposition_reference_properties():
    cfg = default_config("two_spikes_diag", "m1_2d", dx=0.2, snapshot_times=(0.0, 3.0))
    sup = run_superposition_reference(cfg)
    state, _ = initial_state(cfg)
    assert np.allclose(sup[0][1], total_density(state), rtol=1e-13, atol=1e-15)
    rho_t = sup[1][1]
    # mirror symmetry y -> -y of the diagonal setup
    assert np.max(np.abs(rho_t - rho_t[:, ::-1])) <= 1e-10 * rho_t.max()
    joint = run(cfg).snapshots[-1].arrays["rho"]
    assert error_norm(joint, rho_t, "l1", cfg.grid.cell_volume) > 0.05 * error_norm(rho_t, 0 * rho_t, "l1", cfg.grid.cell_volume)
    with pytest.raises(ValueError):
        run_superposition_reference(default_config("one_spike_2d", "m1_2d"))


def test_check_helpers_accept_initial_data():
    rp, rm, qp, qm = _pt("one_spike_1d", np.linspace(-3, 3, 11))
    assert check_half(rp, rm, qp, qm).ok
    assert check_full_1d(rp + rm, qp + qm).ok
    rho, qx, qy = _pt("two_spikes_axial", np.linspace(-3, 3, 11), np.linspace(-3, 3, 11))
    assert check_quarter(rho, qx, qy).ok
    assert check_full_2d(rho.sum(0), qx.sum(0), qy.sum(0)).ok
