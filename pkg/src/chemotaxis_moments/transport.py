"""Explicit first-order steppers for the cell-density models.

Partial-moment models (half moments in 1D, quarter moments in 2D) are
upwinded per velocity subdomain, because the sign of each velocity
component is fixed there.  Full-moment M1 models use local Lax-Friedrichs
fluxes with unit viscosity.  The kinetic reference is upwinded per
discrete velocity.  Walls are reflective through one layer of ghost cells,
and every moment stepper ends with the cellwise realizability projection.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import closures as cl
from . import realizability as rz
from .chemo import ChemoField, gradient_m
from .params import Grid, ModelParams
from .velocity import QUADRANTS, basis_moments_2d, limiter_phi, limiter_phi_vec

FOUR_PI = 4.0 * np.pi


# ---------------------------------------------------------------------------
# state containers


@dataclass
class MomentField1D:
    rho_p: np.ndarray
    rho_m: np.ndarray
    q_p: np.ndarray
    q_m: np.ndarray

    @property
    def rho(self):
        return self.rho_p + self.rho_m

    def copy(self):
        return MomentField1D(self.rho_p.copy(), self.rho_m.copy(), self.q_p.copy(), self.q_m.copy())

    def arrays(self):
        return {"rho_p": self.rho_p, "rho_m": self.rho_m, "q_p": self.q_p, "q_m": self.q_m}


@dataclass
class FullMomentField1D:
    rho: np.ndarray
    q: np.ndarray

    def copy(self):
        return FullMomentField1D(self.rho.copy(), self.q.copy())

    def arrays(self):
        return {"q": self.q}


@dataclass
class KineticField1D:
    """``f[i, j]`` at cell ``i`` and velocity ``v[j]``; ``v`` are midpoints of
    ``nv`` equal cells of ``[-1, 1]``."""

    f: np.ndarray
    v: np.ndarray

    @classmethod
    def velocity_grid(cls, nv: int) -> np.ndarray:
        return -1.0 + (np.arange(nv) + 0.5) * (2.0 / nv)

    @property
    def dv(self) -> float:
        return 2.0 / self.v.size

    @property
    def rho(self):
        return self.f.sum(axis=1) * self.dv

    def half_moments(self) -> MomentField1D:
        plus = self.v > 0
        f, v, dv = self.f, self.v, self.dv
        return MomentField1D(
            f[:, plus].sum(1) * dv, f[:, ~plus].sum(1) * dv,
            (f[:, plus] * v[plus]).sum(1) * dv, (f[:, ~plus] * v[~plus]).sum(1) * dv,
        )

    def copy(self):
        return KineticField1D(self.f.copy(), self.v)

    def arrays(self):
        hm = self.half_moments()
        return hm.arrays()


@dataclass
class MomentField2D:
    """Quarter moments with a leading quadrant axis in ``QUADRANTS`` order,
    arrays shaped ``(4, nx, ny)``."""

    rho: np.ndarray
    qx: np.ndarray
    qy: np.ndarray

    @property
    def density(self):
        return self.rho.sum(axis=0)

    def copy(self):
        return MomentField2D(self.rho.copy(), self.qx.copy(), self.qy.copy())

    def arrays(self):
        out = {}
        for k, quad in enumerate(QUADRANTS):
            out[f"rho_{quad.value}"] = self.rho[k]
        for k, quad in enumerate(QUADRANTS):
            out[f"qx_{quad.value}"] = self.qx[k]
            out[f"qy_{quad.value}"] = self.qy[k]
        return out


@dataclass
class FullMomentField2D:
    rho: np.ndarray
    qx: np.ndarray
    qy: np.ndarray

    @property
    def density(self):
        return self.rho

    def copy(self):
        return FullMomentField2D(self.rho.copy(), self.qx.copy(), self.qy.copy())

    def arrays(self):
        return {"qx": self.qx, "qy": self.qy}


def total_density(state) -> np.ndarray:
    if isinstance(state, (MomentField1D, KineticField1D)):
        return state.rho
    if isinstance(state, FullMomentField1D):
        return state.rho
    return state.density


@dataclass
class StepStats:
    """Projection bookkeeping accumulated over steps."""

    projected_cells: int = 0
    mass_added: float = 0.0
    steps: int = 0
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# time step


def compute_dt(grid: Grid, params: ModelParams) -> float:
    h = grid.dx if grid.dim == 1 else min(grid.dx, grid.dy)
    return 0.5 / (1.0 / h + params.lam + params.alpha * (params.s + 1.0))


# ---------------------------------------------------------------------------
# ghost cells


def fill_ghost_reflective_1d(state: MomentField1D):
    """Ghost values ``(left, right)`` as dicts of scalars.

    Left wall: incoming plus-moments are the mirrored minus-moments of the
    boundary cell; right wall likewise with roles swapped.  The outgoing
    entries are copied from the adjacent cell; upwinding never reads them.
    """
    left = {
        "rho_p": state.rho_m[0], "q_p": -state.q_m[0],
        "rho_m": state.rho_m[0], "q_m": state.q_m[0],
    }
    right = {
        "rho_m": state.rho_p[-1], "q_m": -state.q_p[-1],
        "rho_p": state.rho_p[-1], "q_p": state.q_p[-1],
    }
    return left, right


def _flip_index(axis: int) -> np.ndarray:
    out = []
    for quad in QUADRANTS:
        sx, sy = quad.signs
        target = (-sx, sy) if axis == 0 else (sx, -sy)
        out.append(next(i for i, q in enumerate(QUADRANTS) if q.signs == target))
    return np.array(out)


FLIP_X = _flip_index(0)
FLIP_Y = _flip_index(1)


def reflect_quarter(rho, qx, qy, axis: int):
    """Mirror quadrant moments across a wall normal to ``axis`` (0 = x, 1 = y).

    Quadrants are swapped with their mirror partner and the normal flux
    component changes sign.  Arrays have a leading quadrant axis.
    """
    flip = FLIP_X if axis == 0 else FLIP_Y
    if axis == 0:
        return rho[flip], -qx[flip], qy[flip]
    return rho[flip], qx[flip], -qy[flip]


def fill_ghost_reflective_2d(state: MomentField2D, edge: str):
    """Ghost layer for one edge as ``(rho, qx, qy)`` arrays of shape ``(4, n)``."""
    take = {
        "left": lambda a: a[:, 0, :],
        "right": lambda a: a[:, -1, :],
        "bottom": lambda a: a[:, :, 0],
        "top": lambda a: a[:, :, -1],
    }
    if edge not in take:
        raise ValueError(f"edge must be one of {sorted(take)}")
    axis = 0 if edge in ("left", "right") else 1
    bnd = [take[edge](a) for a in (state.rho, state.qx, state.qy)]
    return reflect_quarter(*bnd, axis=axis)


def _pad_quarter(rho, qx, qy):
    """Pad ``(4, nx, ny)`` arrays with a reflective ghost layer on all sides.

    Corners receive both reflections; they commute, and the dimension-split
    stencil never reads them anyway.
    """
    def pad(a, b_left, b_right, axis):
        return np.concatenate([np.expand_dims(b_left, axis + 1), a, np.expand_dims(b_right, axis + 1)], axis=axis + 1)

    lx = reflect_quarter(rho[:, 0, :], qx[:, 0, :], qy[:, 0, :], axis=0)
    rx = reflect_quarter(rho[:, -1, :], qx[:, -1, :], qy[:, -1, :], axis=0)
    rho, qx, qy = (pad(a, l, r, 0) for a, l, r in zip((rho, qx, qy), lx, rx))
    ly = reflect_quarter(rho[:, :, 0], qx[:, :, 0], qy[:, :, 0], axis=1)
    ry = reflect_quarter(rho[:, :, -1], qx[:, :, -1], qy[:, :, -1], axis=1)
    return tuple(pad(a, l, r, 1) for a, l, r in zip((rho, qx, qy), ly, ry))


# ---------------------------------------------------------------------------
# projection helpers


def _record(stats, changed, mass_added):
    if stats is not None:
        stats.projected_cells += int(changed)
        stats.mass_added += float(mass_added)


def _project_half_state(state: MomentField1D, dx, stats):
    rp, qp = rz.project_half(state.rho_p, state.q_p, +1)
    rm, qm = rz.project_half(state.rho_m, state.q_m, -1)
    changed = (
        (rp != state.rho_p) | (qp != state.q_p) | (rm != state.rho_m) | (qm != state.q_m)
    )
    mass = ((rp - state.rho_p).sum() + (rm - state.rho_m).sum()) * dx
    _record(stats, changed.sum(), mass)
    return MomentField1D(rp, rm, qp, qm)


# ---------------------------------------------------------------------------
# steppers


def half_closure(rho_p, rho_m, q_p, q_m, closure: str, table=None):
    if closure == "linear":
        return cl.linear_half_closure(cl.HalfMoments(rho_p, rho_m, q_p, q_m))
    if closure == "entropy":
        if table is None:
            table = cl.build_half_table()
        return cl.entropy_half_closure(cl.HalfMoments(rho_p, rho_m, q_p, q_m), table)
    raise ValueError(f"unknown closure {closure!r}")


def step_half_moment_1d(
    state: MomentField1D,
    chemo: ChemoField,
    params: ModelParams,
    dt: float,
    closure: str = "entropy",
    table=None,
    project: bool = True,
    stats: StepStats | None = None,
) -> MomentField1D:
    """One upwind step of the half-moment system.

    Plus-moments take differences ``(i) - (i-1)``, minus-moments
    ``(i+1) - (i)``; the density equations are fluxed by ``q`` and the
    flux equations by the closed second moments.
    """
    dx = chemo.dx
    left, right = fill_ghost_reflective_1d(state)
    pad = {
        k: np.concatenate([[left[k]], getattr(state, k), [right[k]]])
        for k in ("rho_p", "rho_m", "q_p", "q_m")
    }
    Rp, Rm = half_closure(pad["rho_p"], pad["rho_m"], pad["q_p"], pad["q_m"], closure, table)
    qp, qm = pad["q_p"], pad["q_m"]
    rho_p, rho_m = state.rho_p, state.rho_m
    rho = rho_p + rho_m
    phi = limiter_phi(gradient_m(chemo), params.s)
    lam, a = params.lam, params.alpha
    c = dt / dx
    chem = a * rho * phi
    new = MomentField1D(
        rho_p - c * (qp[1:-1] - qp[:-2]) + dt * (-lam * rho_p + 0.5 * lam * rho + 0.25 * chem),
        rho_m - c * (qm[2:] - qm[1:-1]) + dt * (-lam * rho_m + 0.5 * lam * rho - 0.25 * chem),
        state.q_p - c * (Rp[1:-1] - Rp[:-2]) + dt * (-lam * state.q_p + 0.25 * lam * rho + chem / 6),
        state.q_m - c * (Rm[2:] - Rm[1:-1]) + dt * (-lam * state.q_m - 0.25 * lam * rho + chem / 6),
    )
    if stats is not None:
        stats.steps += 1
    if project:
        new = _project_half_state(new, dx, stats)
    return new


def step_kinetic_1d(
    state: KineticField1D, chemo: ChemoField, params: ModelParams, dt: float, stats=None
) -> KineticField1D:
    """Upwind in ``x`` per discrete velocity with explicit turning and chemotaxis."""
    f, v = state.f, state.v
    dx = chemo.dx
    mirror = f[:, ::-1]  # the velocity grid is symmetric about 0
    fp = np.concatenate([mirror[:1], f, mirror[-1:]], axis=0)
    pos = v > 0
    diff = np.where(pos, fp[1:-1] - fp[:-2], fp[2:] - fp[1:-1])
    rho = f.sum(axis=1) * state.dv
    phi = limiter_phi(gradient_m(chemo), params.s)
    src = -params.lam * (f - 0.5 * rho[:, None]) + 0.5 * params.alpha * (rho * phi)[:, None] * v[None, :]
    if stats is not None:
        stats.steps += 1
    return KineticField1D(f - (dt / dx) * v[None, :] * diff + dt * src, v)


def step_m1_1d(
    state: FullMomentField1D,
    chemo: ChemoField,
    params: ModelParams,
    dt: float,
    table=None,
    project: bool = True,
    stats: StepStats | None = None,
) -> FullMomentField1D:
    """Local Lax-Friedrichs step (unit viscosity) for the 1D full-moment M1 model."""
    if table is None:
        table = cl.build_m1_table()
    dx = chemo.dx
    rho = np.concatenate([state.rho[:1], state.rho, state.rho[-1:]])
    q = np.concatenate([-state.q[:1], state.q, -state.q[-1:]])
    r = cl.m1_full_closure_1d(rho, q, table)
    f_rho = 0.5 * (q[1:] + q[:-1]) - 0.5 * (rho[1:] - rho[:-1])
    f_q = 0.5 * (r[1:] + r[:-1]) - 0.5 * (q[1:] - q[:-1])
    c = dt / dx
    phi = limiter_phi(gradient_m(chemo), params.s)
    rho_new = state.rho - c * (f_rho[1:] - f_rho[:-1])
    q_new = state.q - c * (f_q[1:] - f_q[:-1]) + dt * (
        -params.lam * state.q + params.alpha * state.rho * phi / 3.0
    )
    if stats is not None:
        stats.steps += 1
    if not project:
        return FullMomentField1D(rho_new, q_new)
    rp, qp = rz.project_full_1d(rho_new, q_new)
    _record(stats, ((rp != rho_new) | (qp != q_new)).sum(), (rp - rho_new).sum() * dx)
    return FullMomentField1D(rp, qp)


def _quarter_sources():
    m1 = np.stack([basis_moments_2d(q)[1] for q in QUADRANTS])  # (4, 2)
    m2 = np.stack([basis_moments_2d(q)[2] for q in QUADRANTS])  # (4, 2, 2)
    return m1, m2


_QM1, _QM2 = _quarter_sources()
_QSIGNS = np.array([q.signs for q in QUADRANTS], dtype=float)


def quarter_closure(rho, qx, qy, closure: str, table=None):
    qm = cl.QuarterMoments(rho, qx, qy)
    if closure == "linear":
        return cl.linear_quarter_closure(qm)
    if closure == "entropy":
        if table is None:
            table = cl.build_quarter_table()
        return cl.entropy_quarter_closure(qm, table)
    raise ValueError(f"unknown closure {closure!r}")


def _upwind_diff(a, signs, axis):
    """Upwind difference along ``axis`` (1 = x, 2 = y) of a padded ``(4, nx+2, ny+2)`` array,
    returned on the interior."""
    inner = a[:, 1:-1, 1:-1]
    if axis == 1:
        back, fwd = a[:, :-2, 1:-1], a[:, 2:, 1:-1]
    else:
        back, fwd = a[:, 1:-1, :-2], a[:, 1:-1, 2:]
    s = signs.reshape(4, 1, 1)
    return np.where(s > 0, inner - back, fwd - inner)


def step_quarter_2d(
    state: MomentField2D,
    chemo: ChemoField,
    params: ModelParams,
    dt: float,
    closure: str = "entropy",
    table=None,
    project: bool = True,
    stats: StepStats | None = None,
) -> MomentField2D:
    """Dimension-split upwind step of the quarter-moment system."""
    dx, dy = chemo.dx, chemo.dy
    rho_p, qx_p, qy_p = _pad_quarter(state.rho, state.qx, state.qy)
    rxx, rxy, ryy = quarter_closure(rho_p, qx_p, qy_p, closure, table)
    sx, sy = _QSIGNS[:, 0], _QSIGNS[:, 1]
    cx, cy = dt / dx, dt / dy
    d_rho = cx * _upwind_diff(qx_p, sx, 1) + cy * _upwind_diff(qy_p, sy, 2)
    d_qx = cx * _upwind_diff(rxx, sx, 1) + cy * _upwind_diff(rxy, sy, 2)
    d_qy = cx * _upwind_diff(rxy, sx, 1) + cy * _upwind_diff(ryy, sy, 2)

    gx, gy = gradient_m(chemo)
    phi = limiter_phi_vec(np.stack([gx, gy], axis=-1), params.s)
    px, py = phi[..., 0], phi[..., 1]
    rho_tot = state.rho.sum(axis=0)
    lam, a = params.lam, params.alpha
    m1x, m1y = _QM1[:, 0, None, None], _QM1[:, 1, None, None]
    mxx, mxy, myy = _QM2[:, 0, 0, None, None], _QM2[:, 0, 1, None, None], _QM2[:, 1, 1, None, None]
    chem = (a / FOUR_PI) * rho_tot
    src_rho = 0.25 * lam * (rho_tot - 4.0 * state.rho) + chem * (m1x * px + m1y * py)
    src_qx = -lam * state.qx + (lam / FOUR_PI) * rho_tot * m1x + chem * (mxx * px + mxy * py)
    src_qy = -lam * state.qy + (lam / FOUR_PI) * rho_tot * m1y + chem * (mxy * px + myy * py)
    new = MomentField2D(
        state.rho - d_rho + dt * src_rho,
        state.qx - d_qx + dt * src_qx,
        state.qy - d_qy + dt * src_qy,
    )
    if stats is not None:
        stats.steps += 1
    if not project:
        return new
    rho_n = np.empty_like(new.rho)
    q_n = np.empty(new.rho.shape + (2,))
    for k, quad in enumerate(QUADRANTS):
        rho_n[k], q_n[k] = rz.project_quarter(new.rho[k], np.stack([new.qx[k], new.qy[k]], -1), quad)
    changed = (rho_n != new.rho) | (q_n[..., 0] != new.qx) | (q_n[..., 1] != new.qy)
    _record(stats, changed.sum(), (rho_n - new.rho).sum() * dx * dy)
    return MomentField2D(rho_n, q_n[..., 0], q_n[..., 1])


def step_m1_2d(
    state: FullMomentField2D,
    chemo: ChemoField,
    params: ModelParams,
    dt: float,
    table=None,
    project: bool = True,
    stats: StepStats | None = None,
) -> FullMomentField2D:
    """Dimension-split local Lax-Friedrichs step for the 2D full-moment M1 model."""
    if table is None:
        table = cl.build_m1_table(dim=2)
    dx, dy = chemo.dx, chemo.dy
    rho, qx, qy = state.rho, state.qx, state.qy
    # reflective padding: normal flux flips sign
    rho_p, qx_p, qy_p = _pad2(rho, 1, 1), _pad2(qx, -1, 1), _pad2(qy, 1, -1)
    rxx, rxy, ryy = cl.m1_full_closure_2d(rho_p, qx_p, qy_p, table)

    def lf(u, flux, axis):
        if axis == 0:
            uL, uR, fL, fR = u[:-1, 1:-1], u[1:, 1:-1], flux[:-1, 1:-1], flux[1:, 1:-1]
            F = 0.5 * (fL + fR) - 0.5 * (uR - uL)
            return F[1:] - F[:-1]
        uL, uR, fL, fR = u[1:-1, :-1], u[1:-1, 1:], flux[1:-1, :-1], flux[1:-1, 1:]
        F = 0.5 * (fL + fR) - 0.5 * (uR - uL)
        return F[:, 1:] - F[:, :-1]

    cx, cy = dt / dx, dt / dy
    d_rho = cx * lf(rho_p, qx_p, 0) + cy * lf(rho_p, qy_p, 1)
    d_qx = cx * lf(qx_p, rxx, 0) + cy * lf(qx_p, rxy, 1)
    d_qy = cx * lf(qy_p, rxy, 0) + cy * lf(qy_p, ryy, 1)
    gx, gy = gradient_m(chemo)
    phi = limiter_phi_vec(np.stack([gx, gy], axis=-1), params.s)
    chem = params.alpha * rho / 3.0
    new_rho = rho - d_rho
    new_qx = qx - d_qx + dt * (-params.lam * qx + chem * phi[..., 0])
    new_qy = qy - d_qy + dt * (-params.lam * qy + chem * phi[..., 1])
    if stats is not None:
        stats.steps += 1
    if not project:
        return FullMomentField2D(new_rho, new_qx, new_qy)
    rp, q = rz.project_full_2d(new_rho, np.stack([new_qx, new_qy], -1))
    changed = (rp != new_rho) | (q[..., 0] != new_qx) | (q[..., 1] != new_qy)
    _record(stats, changed.sum(), (rp - new_rho).sum() * dx * dy)
    return FullMomentField2D(rp, q[..., 0], q[..., 1])


def _pad2(a, sgn_x, sgn_y):
    a = np.concatenate([sgn_x * a[:1], a, sgn_x * a[-1:]], axis=0)
    return np.concatenate([sgn_y * a[:, :1], a, sgn_y * a[:, -1:]], axis=1)
