import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import RegularGridInterpolator

from chemotaxis_moments.chemo import ChemoField
from chemotaxis_moments.params import Grid, ModelParams
from chemotaxis_moments.runner import run
from chemotaxis_moments.scenarios import default_config, initial_state
from chemotaxis_moments.transport import (
    FullMomentField1D,
    FullMomentField2D,
    KineticField1D,
    MomentField1D,
    MomentField2D,
    StepStats,
    compute_dt,
    fill_ghost_reflective_1d,
    fill_ghost_reflective_2d,
    step_half_moment_1d,
    step_kinetic_1d,
    step_m1_1d,
    step_m1_2d,
    step_quarter_2d,
)
from chemotaxis_moments.velocity import QUADRANTS, basis_moments_2d

P = ModelParams(lam=2.0, alpha=2.0, beta=1.0, delta=1.0, D_m=1.0, s=0.0)


def _iso_quarter(shape, rho=1.0):
    m1 = np.stack([basis_moments_2d(q)[1] for q in QUADRANTS]) / np.pi
    r = np.full((4,) + shape, rho)
    return MomentField2D(r, r * m1[:, 0, None, None], r * m1[:, 1, None, None])


def test_compute_dt_examples():
    assert np.isclose(compute_dt(Grid(-3, 3, 60), P), 0.5 / 14)
    p2 = ModelParams(1 / np.pi, 2 / np.pi, 0, 0, 0, 1.0)
    assert np.isclose(compute_dt(Grid(-3, 3, 60, -3, 3, 60), p2), 0.5 / (10 + 1 / np.pi + 4 / np.pi))
    assert compute_dt(Grid(-3, 3, 120), P) < compute_dt(Grid(-3, 3, 60), P)
    assert np.isclose(compute_dt(Grid(0, 1, 10, 0, 1, 20), P), 0.5 / (20 + 2 + 2))


def test_ghost_cells_1d():
    st_ = MomentField1D(np.array([1.0, 1.0]), np.array([2.0, 1.0]), np.array([0.3, 0.7]), np.array([-0.5, -0.2]))
    left, right = fill_ghost_reflective_1d(st_)
    assert (left["rho_p"], left["q_p"]) == (2.0, 0.5)
    assert (right["rho_m"], right["q_m"]) == (1.0, -0.7)


def test_ghost_cells_2d_mirror():
    rng = np.random.default_rng(0)
    s = MomentField2D(*rng.uniform(0.1, 1, (3, 4, 5, 6)))
    rho, qx, qy = fill_ghost_reflective_2d(s, "left")
    for k, quad in enumerate(QUADRANTS):
        sx, sy = quad.signs
        j = next(i for i, q in enumerate(QUADRANTS) if q.signs == (-sx, sy))
        assert np.array_equal(rho[k], s.rho[j, 0, :])
        assert np.array_equal(qx[k], -s.qx[j, 0, :])
        assert np.array_equal(qy[k], s.qy[j, 0, :])
    with pytest.raises(ValueError):
        fill_ghost_reflective_2d(s, "front")


@pytest.mark.parametrize("closure", ["linear", "entropy"])
def test_half_moment_equilibrium(closure, half_table):
    n = 30
    state = MomentField1D(np.full(n, 1.5), np.full(n, 1.5), np.full(n, 0.75), np.full(n, -0.75))
    chemo = ChemoField(np.full(n, 3.0), 0.1)
    new = step_half_moment_1d(state, chemo, P, 0.01, closure, half_table)
    for a, b in zip(new.arrays().values(), state.arrays().values()):
        assert np.max(np.abs(a - b)) <= 1e-14


def test_kinetic_and_m1_equilibrium(m1_1d_table, m1_2d_table, quarter_table):
    n = 20
    v = KineticField1D.velocity_grid(16)
    k = KineticField1D(np.full((n, 16), 0.7), v)
    chemo = ChemoField(np.full(n, 2.0), 0.1)
    assert np.max(np.abs(step_kinetic_1d(k, chemo, P, 0.01).f - 0.7)) <= 1e-14
    m = FullMomentField1D(np.full(n, 1.4), np.zeros(n))
    out = step_m1_1d(m, chemo, P, 0.01, m1_1d_table)
    assert np.max(np.abs(out.rho - 1.4)) <= 1e-14 and np.max(np.abs(out.q)) <= 1e-14
    chemo2 = ChemoField(np.full((8, 9), 2.0), 0.1, 0.1)
    full = FullMomentField2D(np.full((8, 9), 2.0), np.zeros((8, 9)), np.zeros((8, 9)))
    out = step_m1_2d(full, chemo2, P, 0.01, m1_2d_table)
    assert np.max(np.abs(out.rho - 2.0)) <= 1e-14 and np.max(np.abs(out.qx)) <= 1e-14
    for closure in ("linear", "entropy"):
        q = _iso_quarter((8, 9))
        out = step_quarter_2d(q, chemo2, P, 0.01, closure, quarter_table)
        assert np.max(np.abs(out.rho - q.rho)) <= 1e-14
        assert np.max(np.abs(out.qx - q.qx)) <= 1e-12
        assert np.max(np.abs(out.qy - q.qy)) <= 1e-12


def _random_half(rng, n):
    rp, rm = rng.uniform(0.2, 2.0, (2, n))
    up, um = rng.uniform(0.05, 0.95, (2, n))
    return MomentField1D(rp, rm, up * rp, -um * rm)


@pytest.mark.parametrize("closure", ["linear", "entropy"])
def test_half_moment_mass_conservation(closure, half_table):
    rng = np.random.default_rng(1)
    state = _random_half(rng, 40)
    chemo = ChemoField(rng.uniform(0, 2, 40), 0.05)
    mass0 = state.rho.sum() * 0.05
    stats = StepStats()
    for _ in range(20):
        state = step_half_moment_1d(state, chemo, P, 0.01, closure, half_table, project=closure == "entropy", stats=stats)
    assert abs(state.rho.sum() * 0.05 - mass0 - stats.mass_added) <= 1e-13 * mass0


def test_m1_1d_mass_conservation(m1_1d_table):
    rng = np.random.default_rng(2)
    rho = rng.uniform(0.5, 2, 40)
    state = FullMomentField1D(rho, rng.uniform(-0.4, 0.4, 40) * rho)
    chemo = ChemoField(rng.uniform(0, 2, 40), 0.05)
    mass0 = rho.sum()
    stats = StepStats()
    for _ in range(20):
        state = step_m1_1d(state, chemo, P, 0.01, m1_1d_table, stats=stats)
    assert abs((state.rho.sum() - mass0) * 0.05 - stats.mass_added) <= 1e-13 * mass0


@pytest.mark.parametrize("closure", ["linear", "entropy"])
def test_quarter_mass_conservation(closure, quarter_table):
    rng = np.random.default_rng(3)
    q = _iso_quarter((10, 12))
    q.rho *= rng.uniform(0.5, 2, (1, 10, 12))
    q.qx *= q.rho
    q.qy *= q.rho
    chemo = ChemoField(rng.uniform(0, 1, (10, 12)), 0.1, 0.1)
    mass0 = q.density.sum()
    stats = StepStats()
    for _ in range(5):
        q = step_quarter_2d(q, chemo, P, 0.01, closure, quarter_table, project=False, stats=stats)
    assert abs(q.density.sum() - mass0) <= 1e-13 * mass0


def test_m1_2d_mass_conservation(m1_2d_table):
    rng = np.random.default_rng(4)
    rho = rng.uniform(0.5, 2, (10, 12))
    state = FullMomentField2D(rho, 0.3 * rho * rng.uniform(-1, 1, rho.shape), 0.3 * rho * rng.uniform(-1, 1, rho.shape))
    chemo = ChemoField(rng.uniform(0, 1, (10, 12)), 0.1, 0.1)
    for _ in range(5):
        state = step_m1_2d(state, chemo, P, 0.01, m1_2d_table, project=False)
    assert abs(state.rho.sum() - rho.sum()) <= 1e-13 * rho.sum()


@given(st.integers(0, 2**32 - 1), st.floats(0, 3), st.floats(0, 2))
@settings(max_examples=25, deadline=None)
def test_kinetic_positivity_under_cfl(seed, alpha, s):
    rng = np.random.default_rng(seed)
    lam = alpha * (s + 1) + rng.uniform(0, 1)
    p = ModelParams(lam, alpha, 0, 0, 0, s)
    n, nv = 25, 16
    state = KineticField1D(rng.uniform(0, 1, (n, nv)) ** 4, KineticField1D.velocity_grid(nv))
    chemo = ChemoField(rng.uniform(-5, 5, n), 0.1)
    dt = compute_dt(Grid(0, 2.5, n), p)
    for _ in range(10):
        state = step_kinetic_1d(state, chemo, p, dt)
        assert state.f.min() >= 0


def test_m1_2d_rotational_symmetry():
    cfg = default_config("one_spike_2d", "m1_2d", t_final=0.5, snapshot_times=(0.5,))
    rho = run(cfg).snapshots[-1].arrays["rho"]
    assert np.max(np.abs(rho - np.rot90(rho))) <= 1e-12


def test_quarter_square_anisotropy(quarter_table):
    # radius of the 10%-of-peak contour along a diagonal vs along an axis
    cfg = default_config("one_spike_2d", "qm1", t_final=1.0, snapshot_times=(1.0,))
    rho = run(cfg).snapshots[-1].arrays["rho"]
    g = cfg.grid
    interp = RegularGridInterpolator((g.x, g.y), rho)
    s = np.linspace(0, 2.9, 2901)
    level = 0.1 * rho.max()

    def radius(theta):
        vals = interp(np.stack([s * np.cos(theta), s * np.sin(theta)], 1))
        k = np.argmax(vals < level)
        return s[k - 1] + (s[k] - s[k - 1]) * (vals[k - 1] - level) / (vals[k - 1] - vals[k])

    assert radius(np.pi / 4) / radius(0.0) < 1.0


def test_free_streaming_beam_speed(half_table):
    # plus-only pulse, no turning or chemotaxis: mass moves right at unit speed
    g = Grid(0, 4, 400)
    bump = np.exp(-((g.x - 1.0) ** 2) / 0.01) + 1e-10
    state = MomentField1D(bump, np.full(g.nx, 1e-10), bump * (1 - 1e-9), np.zeros(g.nx))
    chemo = ChemoField(np.zeros(g.nx), g.dx)
    p = ModelParams(0, 0, 0, 0, 0, 0)
    dt = compute_dt(g, p)
    mass0 = state.rho.sum()
    steps = int(round(1.0 / dt))
    for _ in range(steps):
        state = step_half_moment_1d(state, chemo, p, dt, "entropy", half_table)
    centre = (g.x * state.rho).sum() / state.rho.sum()
    assert abs((centre - 1.0) / (steps * dt) - 1.0) < 0.02
    assert np.isclose(state.rho.sum(), mass0, rtol=1e-10)


def test_beam_reflects_at_wall(half_table):
    g = Grid(0, 1, 100)
    bump = np.exp(-((g.x - 0.8) ** 2) / 0.002) + 1e-8
    state = MomentField1D(bump, np.full(g.nx, 1e-8), 0.99 * bump, np.zeros(g.nx))
    chemo = ChemoField(np.zeros(g.nx), g.dx)
    p = ModelParams(0, 0, 0, 0, 0, 0)
    dt = compute_dt(g, p)
    flux0 = (state.q_p + state.q_m).sum()
    for _ in range(int(0.5 / dt)):
        state = step_half_moment_1d(state, chemo, p, dt, "entropy", half_table)
    assert flux0 > 0 and (state.q_p + state.q_m).sum() < -0.5 * flux0
    assert state.rho_m.sum() > 10 * state.rho_p.sum()


@pytest.mark.parametrize("model", ["hp1", "hm1", "kinetic"])
def test_compiled_engine_matches_numpy(model):
    kw = dict(dx=0.05, t_final=0.37, snapshot_times=(0.1, 0.37))
    a = run(default_config("one_spike_1d", model, **kw))
    b = run(default_config("one_spike_1d", model, engine="compiled", **kw))
    assert a.stats.steps == b.stats.steps
    for sa, sb in zip(a.snapshots, b.snapshots):
        assert sa.time == sb.time
        for key in sa.arrays:
            scale = max(1.0, np.abs(sa.arrays[key]).max())
            assert np.max(np.abs(sa.arrays[key] - sb.arrays[key])) <= 1e-12 * scale
    assert a.stats.projected_cells == b.stats.projected_cells


def test_initial_state_shapes():
    for model, cls in (("hm1", MomentField1D), ("m1_1d", FullMomentField1D), ("kinetic", KineticField1D)):
        state, chemo = initial_state(default_config("one_spike_1d", model, dx=0.1))
        assert isinstance(state, cls) and chemo.m.shape == (60,)
