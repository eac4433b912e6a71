"""Time loop shared by every model."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import closures as cl
from . import realizability as rz
from . import transport as tr
from .chemo import step_chemo_1d, step_chemo_2d
from .scenarios import ScenarioConfig, initial_state


class NumericalFailure(RuntimeError):
    """Non-finite state or a failed linear solve during a run."""


@dataclass
class Snapshot:
    time: float
    step: int
    arrays: dict


@dataclass
class RunResult:
    config: ScenarioConfig
    dt: float
    snapshots: list
    stats: tr.StepStats
    mass_initial: float
    mass_final: float
    max_violation: float
    min_rho: float
    chemo_max_residual: float
    wall_time: float
    history: dict = field(default_factory=dict)

    @property
    def mass_drift(self) -> float:
        return self.mass_final - self.mass_initial


def _tables(config: ScenarioConfig):
    """Closure table for the configured model, loaded from disk when a path is given."""
    kind = {"hm1": "half", "qm1": "quarter", "m1_1d": "m1_1d", "m1_2d": "m1_2d"}.get(config.model)
    if kind is None:
        return None
    path = config.tables.get(kind)
    if path:
        table = cl.load_table(path)
        if table.kind != kind:
            raise ValueError(f"table at {path} is {table.kind!r}, expected {kind!r}")
        return table
    return cl.build_table(kind)


def _stepper(config: ScenarioConfig, table):
    m, project = config.model, config.project
    if m in ("hp1", "hm1"):
        closure = "linear" if m == "hp1" else "entropy"
        return lambda s, c, p, dt, st: tr.step_half_moment_1d(s, c, p, dt, closure, table, project, st)
    if m == "kinetic":
        return lambda s, c, p, dt, st: tr.step_kinetic_1d(s, c, p, dt, st)
    if m == "m1_1d":
        return lambda s, c, p, dt, st: tr.step_m1_1d(s, c, p, dt, table, project, st)
    if m in ("qp1", "qm1"):
        closure = "linear" if m == "qp1" else "entropy"
        return lambda s, c, p, dt, st: tr.step_quarter_2d(s, c, p, dt, closure, table, project, st)
    if m == "m1_2d":
        return lambda s, c, p, dt, st: tr.step_m1_2d(s, c, p, dt, table, project, st)
    raise ValueError(f"unknown model {m!r}")


def check_state(state) -> rz.RealizabilityReport:
    if isinstance(state, tr.MomentField1D):
        return rz.check_half(state.rho_p, state.rho_m, state.q_p, state.q_m)
    if isinstance(state, tr.FullMomentField1D):
        return rz.check_full_1d(state.rho, state.q)
    if isinstance(state, tr.KineticField1D):
        return rz.RealizabilityReport(bool(state.f.min() >= 0), float(max(-state.f.min(), 0.0)), None, 0.0)
    if isinstance(state, tr.MomentField2D):
        return rz.check_quarter(state.rho, state.qx, state.qy)
    return rz.check_full_2d(state.rho, state.qx, state.qy)


def _snapshot(t, n, state, chemo):
    arrays = {"rho": tr.total_density(state).copy(), "m": chemo.m.copy()}
    arrays.update({k: np.array(v, copy=True) for k, v in state.arrays().items() if k not in arrays})
    return Snapshot(float(t), n, arrays)


def _compiled_advance(config, table, state, chemo, stats, diag, dt, n_full):
    """Chunked advance through the jitted loops; works on private copies of the state."""
    from . import kernels

    p, grid = config.params, config.grid
    T = config.t_final
    if config.model == "kinetic":
        arrays = [np.ascontiguousarray(state.f, dtype=float).copy()]
    else:
        arrays = [np.array(a, dtype=float) for a in (state.rho_p, state.rho_m, state.q_p, state.q_m)]
        lin_p = np.array([cl.linear_half_second_moment(1.0, 0.0, +1), cl.linear_half_second_moment(0.0, 1.0, +1)], float)
        lin_m = np.array([cl.linear_half_second_moment(1.0, 0.0, -1), cl.linear_half_second_moment(0.0, 1.0, -1)], float)
        w_tab = table._w_uniform[1] if table is not None else np.zeros(2)
        mode = kernels.ENTROPY if config.model == "hm1" else kernels.LINEAR
    m = np.array(chemo.m, dtype=float)
    phys = (grid.dx, p.lam, p.alpha, p.beta, p.delta, p.D_m, p.s)

    def run_kernel(nsteps, h):
        if config.model == "kinetic":
            return kernels.advance_kinetic_1d(arrays[0], state.v, m, nsteps, h, *phys)
        return kernels.advance_half_1d(*arrays, m, nsteps, h, *phys, mode, lin_p, lin_m, w_tab, config.project)

    def advance(_state, _chemo, k0, k1):
        chunks = [(min(k1, n_full) - k0, dt)] if k0 < n_full else []
        if k1 > n_full:
            chunks.append((1, T - n_full * dt))
        for nsteps, h in chunks:
            if nsteps <= 0:
                continue
            d = run_kernel(nsteps, h)
            if d[4] == 0.0 or not np.all(np.isfinite(m)):
                raise NumericalFailure(f"non-finite values between steps {k0} and {k1}")
            stats.steps += nsteps
            stats.projected_cells += int(d[0])
            stats.mass_added += float(d[1])
            diag["min_rho"] = min(diag["min_rho"], float(d[2]))
            diag["max_violation"] = max(diag["max_violation"], float(d[3]))
        if config.model == "kinetic":
            new = tr.KineticField1D(arrays[0].copy(), state.v)
        else:
            new = tr.MomentField1D(*(a.copy() for a in arrays))
        return new, replace(chemo, m=m.copy(), residual=0.0)

    return advance


def run(config: ScenarioConfig, dt: float | None = None, record_history: bool = False) -> RunResult:
    """Integrate ``config`` to ``t_final``.

    Each step: ghost fill and transport with the current chemoattractant,
    projection, then the chemoattractant update driven by the pre-step
    density.  The step size is fixed except for a final truncated step.
    A snapshot is taken at the first step time at or after each requested
    time.
    """
    grid, params = config.grid, config.params
    params.check_turning_bound(grid.dim)
    table = _tables(config)
    step = _stepper(config, table)
    state, chemo = initial_state(config)
    dt = tr.compute_dt(grid, params) if dt is None else float(dt)
    if dt <= 0:
        raise ValueError("dt must be positive")
    vol = grid.cell_volume

    def chemo_step(c, rho, h):
        if grid.dim == 1:
            return step_chemo_1d(c, rho, h, params, implicit=config.chemo_implicit)
        return step_chemo_2d(c, rho, h, params, rtol=config.chemo_rtol, max_iter=config.chemo_max_iter)

    stats = tr.StepStats()
    T = config.t_final
    eps = 1e-12 * max(T, 1.0)
    n_full = int(np.floor(T / dt + 1e-9))
    n_total = n_full + (1 if T - n_full * dt > eps else 0)

    def time_of(k):
        return T if k >= n_total else min(k * dt, T)

    # step index of the first step time at or after each requested time
    snap_at = {}
    for tau in sorted(set(config.snapshot_times)):
        k = 0 if tau <= eps else min(int(np.ceil((tau - eps) / dt)), n_total)
        while k > 0 and time_of(k - 1) >= tau - eps:
            k -= 1
        snap_at.setdefault(k, []).append(tau)

    mass0 = float(tr.total_density(state).sum() * vol)
    diag = {
        "min_rho": float(tr.total_density(state).min()),
        "max_violation": check_state(state).worst_violation,
        "chemo_res": 0.0,
    }
    history = {"t": [], "mass": [], "projected": []} if record_history else {}
    snaps = []
    for _ in snap_at.get(0, []):
        snaps.append(_snapshot(0.0, 0, state, chemo))

    if config.engine == "compiled":
        advance = _compiled_advance(config, table, state, chemo, stats, diag, dt, n_full)
    else:

        def advance(state, chemo, k0, k1):
            for k in range(k0, k1):
                h = T - n_full * dt if k + 1 > n_full else dt
                rho_pre = tr.total_density(state)
                state = step(state, chemo, params, h, stats)
                try:
                    chemo = chemo_step(chemo, rho_pre, h)
                except RuntimeError as exc:
                    raise NumericalFailure(f"step {k + 1}: {exc}") from exc
                diag["chemo_res"] = max(diag["chemo_res"], chemo.residual)
                rho = tr.total_density(state)
                if not np.all(np.isfinite(rho)) or not np.all(np.isfinite(chemo.m)):
                    raise NumericalFailure(f"non-finite values at step {k + 1} (t={time_of(k + 1):.6g})")
                diag["min_rho"] = min(diag["min_rho"], float(rho.min()))
                diag["max_violation"] = max(diag["max_violation"], check_state(state).worst_violation)
                if record_history:
                    history["t"].append(time_of(k + 1))
                    history["mass"].append(float(rho.sum() * vol))
                    history["projected"].append(stats.projected_cells)
            return state, chemo

    events = set(snap_at) | {n_full, n_total}
    if record_history:
        events |= set(range(1, n_total + 1))
    start = time.perf_counter()
    k = 0
    for e in sorted(events):
        if e <= k:
            continue
        state, chemo = advance(state, chemo, k, e)
        k = e
        if record_history and config.engine == "compiled":
            history["t"].append(time_of(k))
            history["mass"].append(float(tr.total_density(state).sum() * vol))
            history["projected"].append(stats.projected_cells)
        for _ in snap_at.get(k, []):
            snaps.append(_snapshot(time_of(k), k, state, chemo))
    wall = time.perf_counter() - start
    min_rho, max_violation, chemo_res = diag["min_rho"], diag["max_violation"], diag["chemo_res"]

    return RunResult(
        config=config,
        dt=dt,
        snapshots=snaps,
        stats=stats,
        mass_initial=mass0,
        mass_final=float(tr.total_density(state).sum() * vol),
        max_violation=float(max_violation),
        min_rho=min_rho,
        chemo_max_residual=chemo_res,
        wall_time=wall,
        history=history,
    )
