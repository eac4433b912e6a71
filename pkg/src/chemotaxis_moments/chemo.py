"""Chemoattractant reaction-diffusion step.

Diffusion is implicit, production and decay explicit::

    (I - D_m dt L) m_new = (1 - dt delta) m + dt beta max(rho, 0)

with ``L`` the standard Laplacian stencil whose Neumann closure takes the
boundary cell as its own outer neighbour.  1D systems are tridiagonal and
solved directly; 2D systems are symmetric positive definite and solved with
MINRES (monotone residual), with a sparse direct fallback for small grids.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import solve_banded

from .params import ModelParams


class ChemoSolverError(RuntimeError):
    """The 2D linear solve did not reach the requested residual."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class ChemoField:
    """Concentration per cell plus spacing; ``residual`` is the relative
    residual of the solve that produced it (0 for direct solves)."""

    m: np.ndarray
    dx: float
    dy: float | None = None
    residual: float = 0.0


def gradient_m(field: ChemoField):
    """Central differences inside, one-sided first order at boundary cells.

    Returns an array in 1D and a ``(gx, gy)`` pair in 2D.
    """
    m = field.m
    if min(m.shape) < 3:
        raise ValueError("gradient needs at least 3 cells per axis")
    if m.ndim == 1:
        return np.gradient(m, field.dx, edge_order=1)
    gx, gy = np.gradient(m, field.dx, field.dy, edge_order=1)
    return gx, gy


def _check_dt(dt, params):
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    if dt * params.delta >= 1.0:
        raise ValueError(f"explicit decay needs dt*delta < 1 (dt={dt}, delta={params.delta})")


def _rhs(m, rho, dt, params):
    return (1.0 - dt * params.delta) * m + dt * params.beta * np.maximum(rho, 0.0)


def step_chemo_1d(field: ChemoField, rho, dt: float, params: ModelParams, implicit: bool = True):
    _check_dt(dt, params)
    m = field.m
    n = m.size
    if not implicit:
        c = params.D_m * dt / field.dx**2
        if c > 0.5:
            raise ValueError(f"explicit diffusion unstable: D_m dt/dx^2 = {c:.3g} > 0.5")
        mp = np.pad(m, 1, mode="edge")
        lap = mp[2:] - 2 * m + mp[:-2]
        return replace(field, m=_rhs(m, rho, dt, params) + c * lap, residual=0.0)
    c = params.D_m * dt / field.dx**2
    rhs = _rhs(m, rho, dt, params)
    if c == 0.0:
        return replace(field, m=rhs, residual=0.0)
    ab = np.empty((3, n))
    ab[0, :] = -c
    ab[2, :] = -c
    ab[1, :] = 1 + 2 * c
    ab[1, 0] = ab[1, -1] = 1 + c
    return replace(field, m=solve_banded((1, 1), ab, rhs), residual=0.0)


@lru_cache(maxsize=16)
def _operator_2d(nx, ny, cx, cy):
    def lap1d(n):
        main = -2.0 * np.ones(n)
        main[0] = main[-1] = -1.0
        off = np.ones(n - 1)
        return sp.diags([off, main, off], [-1, 0, 1], format="csr")

    Ix, Iy = sp.identity(nx, format="csr"), sp.identity(ny, format="csr")
    L = cx * sp.kron(lap1d(nx), Iy) + cy * sp.kron(Ix, lap1d(ny))
    return (sp.identity(nx * ny, format="csr") - L).tocsr()


def step_chemo_2d(
    field: ChemoField,
    rho,
    dt: float,
    params: ModelParams,
    rtol: float = 1e-10,
    max_iter: int = 10_000,
    method: str = "krylov",
):
    """One implicit step on a 2D grid (arrays indexed ``[ix, iy]``)."""
    _check_dt(dt, params)
    m = field.m
    nx, ny = m.shape
    rhs = _rhs(m, rho, dt, params).ravel()
    cx = params.D_m * dt / field.dx**2
    cy = params.D_m * dt / field.dy**2
    if cx == 0.0 and cy == 0.0:
        return replace(field, m=rhs.reshape(nx, ny), residual=0.0)
    A = _operator_2d(nx, ny, cx, cy)
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0.0:
        return replace(field, m=np.zeros_like(m), residual=0.0)
    if method == "direct":
        sol = spla.spsolve(A.tocsc(), rhs)
    else:
        sol, _ = spla.minres(A, rhs, x0=m.ravel(), rtol=rtol * 1e-2, maxiter=max_iter)
    res = np.linalg.norm(rhs - A @ sol) / bnorm
    if res > rtol and method != "direct":
        if nx * ny <= 128 * 128:
            sol = spla.spsolve(A.tocsc(), rhs)
            res = np.linalg.norm(rhs - A @ sol) / bnorm
        if res > rtol:
            raise ChemoSolverError(f"chemoattractant solve stalled at relative residual {res:.3e}", res)
    return replace(field, m=sol.reshape(nx, ny), residual=float(res))
