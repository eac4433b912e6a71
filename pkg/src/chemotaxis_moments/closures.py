"""Closure relations for half-, quarter- and full-moment models.

Each closure maps the evolved moments (density and flux) to the second
moment needed in the flux of the flux equation.  Linear closures come from
a polynomial ansatz fitted through the basis-moment matrix; minimum-entropy
closures use an exponential ansatz ``exp(a + b.v)`` whose normalized
moments depend only on ``b`` and are inverted through precomputed tables.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.interpolate import PchipInterpolator, RectBivariateSpline
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .velocity import (
    QUADRANTS,
    VelocityDomain1D,
    VelocityDomain2D,
    basis_moments_1d,
    basis_moments_2d,
    quadrature,
    third_moment_1d,
    third_moments_2d,
)

TABLE_MAGIC = "CHEMOTAB"
TABLE_VERSION = 1
REALIZABILITY_SLACK = 1e-10
FAST_LOOKUP_POINTS = 2**16 + 1


class RealizabilityError(ValueError):
    """Moments outside the realizable set were passed to an entropy closure."""


class HalfMoments(NamedTuple):
    rho_p: np.ndarray
    rho_m: np.ndarray
    q_p: np.ndarray
    q_m: np.ndarray


class QuarterMoments(NamedTuple):
    """Arrays with a leading quadrant axis ordered as ``QUADRANTS``."""

    rho: np.ndarray
    qx: np.ndarray
    qy: np.ndarray


# ---------------------------------------------------------------------------
# forward maps b -> (u, w)


def half_forward(b):
    """Normalized moments of ``exp(b v)`` on ``[0, 1]``.

    Returns ``(u, w)`` with ``u = 1 - 1/b + 1/expm1(b)`` and
    ``w = 1 + 1/expm1(b) - 2u/b``; a Taylor series is used near ``b = 0``.
    The ``[-1, 0]`` maps follow from ``u_-(b) = -u_+(-b)``, ``w_-(b) = w_+(-b)``.
    """
    b = np.asarray(b, dtype=float)
    u = np.empty_like(b)
    w = np.empty_like(b)
    small = np.abs(b) < 2e-2
    x = b[small]
    u[small] = 0.5 + x / 12 - x**3 / 720 + x**5 / 30240
    w[small] = (
        1 / 3 + x / 12 + x**2 / 360 - x**3 / 720 - x**4 / 15120 + x**5 / 30240 + x**6 / 604800
    )
    x = b[~small]
    with np.errstate(over="ignore"):
        inv = 1.0 / np.expm1(x)
    u[~small] = 1.0 - 1.0 / x + inv
    w[~small] = 1.0 + inv - 2.0 * u[~small] / x
    return u, w


def m1_forward(b):
    """Normalized moments of ``exp(b v)`` on ``[-1, 1]``: Langevin function and ``1 - 2u/b``."""
    b = np.asarray(b, dtype=float)
    u = np.empty_like(b)
    w = np.empty_like(b)
    small = np.abs(b) < 2e-2
    x = b[small]
    u[small] = x / 3 - x**3 / 45 + 2 * x**5 / 945 - x**7 / 4725
    w[small] = 1 / 3 + 2 * x**2 / 45 - 4 * x**4 / 945 + 2 * x**6 / 4725
    x = b[~small]
    u[~small] = 1.0 / np.tanh(x) - 1.0 / x
    w[~small] = 1.0 - 2.0 * u[~small] / x
    return u, w


def exp_ansatz_moments(b, rule):
    """Normalized ``(u, w)`` of ``exp(b.v)`` under a quadrature rule.

    ``b`` has shape ``(k,)`` (1D rule) or ``(k, 2)`` (2D rule).  ``w`` is
    returned as ``(k,)`` or ``(k, 2, 2)``.  Exponents are shifted by their
    maximum so large multipliers do not overflow.
    """
    b = np.asarray(b, dtype=float)
    nodes = rule.nodes
    if nodes.ndim == 1:
        e = b[:, None] * nodes[None, :]
    else:
        e = b @ nodes.T
    e -= e.max(axis=1, keepdims=True)
    f = np.exp(e) * rule.weights
    z = f.sum(axis=1)
    if nodes.ndim == 1:
        return (f @ nodes) / z, (f @ nodes**2) / z
    u = (f @ nodes) / z[:, None]
    w = np.einsum("kn,ni,nj->kij", f, nodes, nodes) / z[:, None, None]
    return u, w


# ---------------------------------------------------------------------------
# tables


@dataclass(eq=False)
class ClosureTable:
    """Sampled forward map of an exponential ansatz.

    kind
        ``half`` (multiplier on ``[0, 1]``), ``m1_1d`` / ``m1_2d`` (magnitude
        of the multiplier on the full domain) or ``quarter`` (2D multiplier on
        the ``++`` quadrant).
    b
        Multiplier samples; for ``quarter`` the per-axis values.
    u, w
        Normalized first and second moments at the samples.  Shapes:
        ``half``/``m1_1d``: ``(n,)``; ``m1_2d``: ``u (n,)``, ``w (n, 2)``
        holding ``(w_par, w_perp)``; ``quarter``: ``u (n, n, 2)``,
        ``w (n, n, 3)`` holding ``(xx, xy, yy)``.
    meta
        Build parameters, serialized with the table.
    """

    kind: str
    b: np.ndarray
    u: np.ndarray
    w: np.ndarray
    meta: dict = field(default_factory=dict)

    # -- 1D lookups ---------------------------------------------------------

    @cached_property
    def _pchip(self):
        u = self.u
        w = self.w if self.w.ndim == 1 else self.w[:, 0]
        return PchipInterpolator(u, self.b), PchipInterpolator(u, w)

    def invert(self, u):
        """Multiplier and normalized second moment(s) for normalized flux ``u``.

        1D kinds only.  Outside the sampled range the second moment is blended
        linearly towards the beam value ``w = 1`` at ``u = 1`` (and, for
        ``half``, towards ``w = 0`` at ``u = 0``) and the multiplier follows
        its leading-order asymptotics.
        """
        if self.kind == "quarter":
            raise TypeError("use invert_quarter for 2D tables")
        u = np.asarray(u, dtype=float)
        b_of_u, w_of_u = self._pchip
        u_lo, u_hi = self.u[0], self.u[-1]
        w_lo, w_hi = w_of_u(u_lo), w_of_u(u_hi)
        uc = np.clip(u, u_lo, u_hi)
        b = b_of_u(uc)
        w = w_of_u(uc)
        hi = u > u_hi
        if np.any(hi):
            t = (u[hi] - u_hi) / (1.0 - u_hi)
            w[hi] = w_hi + t * (1.0 - w_hi)
            b[hi] = 1.0 / np.maximum(1.0 - u[hi], 1e-300)
        lo = u < u_lo
        if np.any(lo):
            if self.kind == "half":
                w[lo] = u[lo] * (w_lo / u_lo)
                b[lo] = -1.0 / np.maximum(u[lo], 1e-300)
            else:  # full-domain tables start at u = 0, b = 0
                w[lo] = w_lo
                b[lo] = 0.0
        return b, w

    @cached_property
    def _w_uniform(self):
        grid = np.linspace(0.0, 1.0, FAST_LOOKUP_POINTS)
        return grid, self.invert(grid)[1]

    def w_fast(self, u):
        """Second moment only, by linear interpolation on a fine uniform ``u`` grid.

        ``w(u)`` is smooth on the whole of ``[0, 1]``, so this agrees with
        :meth:`invert` to a few 1e-9 at a fraction of the cost; the solvers use it.
        """
        if self.kind not in ("half", "m1_1d"):
            raise TypeError("w_fast is only defined for 1D tables")
        grid, w = self._w_uniform
        return np.interp(u, grid, w)

    def w_perp(self, u):
        """Perpendicular normalized second moment for the ``m1_2d`` table."""
        if self.kind != "m1_2d":
            raise TypeError("w_perp is only defined for m1_2d tables")
        _, w_par = self.invert(u)
        return 0.5 * (1.0 - w_par)

    # -- 2D lookups ---------------------------------------------------------

    @cached_property
    def _quarter(self):
        return _QuarterLookup(self)

    def invert_quarter(self, ux, uy):
        """Return ``(bx, by, wxx, wxy, wyy)`` for normalized fluxes on the ``++`` quadrant."""
        if self.kind != "quarter":
            raise TypeError("invert_quarter needs a quarter table")
        return self._quarter(np.asarray(ux, float), np.asarray(uy, float))

    def forward_quarter(self, bx, by):
        """Spline-interpolated forward map ``b -> (ux, uy, wxx, wxy, wyy)``."""
        lk = self._quarter
        s, t = lk.index_of(np.asarray(bx, float)), lk.index_of(np.asarray(by, float))
        return tuple(sp.ev(s, t) for sp in lk.splines)


class _QuarterLookup:
    """Inverse search on quintic splines of the sampled forward map.

    The forward samples live on a structured grid in index space, where
    ``b = b0 * sinh(k * s)``.  Queries inside the image of the sampled box are
    solved by Newton iteration on the spline surrogate, started from the
    nearest sample.  Queries outside are pulled radially towards the
    isotropic point onto the image boundary; the covariance found there is
    then shrunk with the distance to the realizable boundary so the closure
    reaches ``w = u (x) u`` on it.
    """

    def __init__(self, table: ClosureTable):
        self.b0 = float(table.meta["b0"])
        self.k = float(table.meta["k"])
        n = table.b.size
        self.nh = (n - 1) // 2
        s = np.arange(-self.nh, self.nh + 1, dtype=float)
        comps = [table.u[..., 0], table.u[..., 1], table.w[..., 0], table.w[..., 1], table.w[..., 2]]
        self.splines = [RectBivariateSpline(s, s, c, kx=5, ky=5) for c in comps]
        S, T = np.meshgrid(s, s, indexing="ij")
        self.S, self.T = S.ravel(), T.ravel()
        self.tree = cKDTree(table.u.reshape(-1, 2))
        self.anchor = np.array([0.5, 0.5])
        self._build_boundary()

    def index_of(self, b):
        return np.arcsinh(b / self.b0) / self.k

    def b_of(self, s):
        return self.b0 * np.sinh(self.k * s)

    def _build_boundary(self):
        nh = float(self.nh)
        m = 4096
        lin = np.linspace(-nh, nh, m, endpoint=False)
        # counter-clockwise walk around the index box
        s = np.concatenate([lin, np.full(m, nh), -lin, np.full(m, -nh)])
        t = np.concatenate([np.full(m, -nh), lin, np.full(m, nh), -lin])
        ux, uy = self.splines[0].ev(s, t), self.splines[1].ev(s, t)
        d = np.stack([ux, uy], axis=1) - self.anchor
        ang = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
        order = np.argsort(ang)
        ang, rad = ang[order], np.hypot(d[order, 0], d[order, 1])
        if np.any(np.diff(ang) <= 0):
            keep = np.concatenate([[True], np.diff(ang) > 0])
            ang, rad = ang[keep], rad[keep]
        # periodic extension for interpolation
        self.ang = np.concatenate([ang - 2 * np.pi, ang, ang + 2 * np.pi])
        self.rad = np.concatenate([rad, rad, rad])

    def boundary_radius(self, theta):
        theta = np.mod(theta - self.ang[len(self.ang) // 3], 2 * np.pi) + self.ang[len(self.ang) // 3]
        return np.interp(theta, self.ang, self.rad)

    def solve(self, ux, uy, tol=1e-12, max_iter=50):
        """Newton search in index space; returns ``(s, t, residual)``."""
        _, idx = self.tree.query(np.stack([ux, uy], axis=1))
        s, t = self.S[idx].copy(), self.T[idx].copy()
        sx, sy = self.splines[0], self.splines[1]
        active = np.arange(ux.size)
        res = np.zeros(ux.size)
        lim = float(self.nh)
        for _ in range(max_iter):
            if active.size == 0:
                break
            sa, ta = s[active], t[active]
            rx = sx.ev(sa, ta) - ux[active]
            ry = sy.ev(sa, ta) - uy[active]
            a11, a12 = sx.ev(sa, ta, dx=1), sx.ev(sa, ta, dy=1)
            a21, a22 = sy.ev(sa, ta, dx=1), sy.ev(sa, ta, dy=1)
            det = a11 * a22 - a12 * a21
            det = np.where(np.abs(det) > 1e-300, det, 1e-300)
            ds = (a22 * rx - a12 * ry) / det
            dt = (a11 * ry - a21 * rx) / det
            step = np.maximum(np.abs(ds), np.abs(dt))
            scale = np.minimum(1.0, 4.0 / np.maximum(step, 1e-300))
            s_new = np.clip(sa - scale * ds, -lim, lim)
            t_new = np.clip(ta - scale * dt, -lim, lim)
            moved = np.maximum(np.abs(s_new - sa), np.abs(t_new - ta))
            s[active], t[active] = s_new, t_new
            r = np.hypot(rx, ry)
            res[active] = r
            # clamped points stall on the box edge without reaching tol
            active = active[(r > tol) & (moved > 1e-12)]
        res = np.hypot(sx.ev(s, t) - ux, sy.ev(s, t) - uy)
        return s, t, res

    def __call__(self, ux, uy):
        shape = np.shape(ux)
        ux, uy = np.ravel(ux).astype(float), np.ravel(uy).astype(float)
        d = np.stack([ux, uy], axis=1) - self.anchor
        r = np.hypot(d[:, 0], d[:, 1])
        R = self.boundary_radius(np.arctan2(d[:, 1], d[:, 0])) * (1.0 - 1e-9)
        outside = r > R
        ucx, ucy = ux.copy(), uy.copy()
        if np.any(outside):
            f = R[outside] / r[outside]
            ucx[outside] = self.anchor[0] + f * d[outside, 0]
            ucy[outside] = self.anchor[1] + f * d[outside, 1]
        s, t, _ = self.solve(ucx, ucy)
        wxx, wxy, wyy = (sp.ev(s, t) for sp in self.splines[2:])
        if np.any(outside):
            o = outside
            cx, cy = self.splines[0].ev(s[o], t[o]), self.splines[1].ev(s[o], t[o])
            cxx, cxy, cyy = wxx[o] - cx * cx, wxy[o] - cx * cy, wyy[o] - cy * cy
            dist = np.maximum(np.minimum(np.minimum(ux[o], uy[o]), 1.0 - np.hypot(ux[o], uy[o])), 0.0)
            dist_c = np.minimum(np.minimum(cx, cy), 1.0 - np.hypot(cx, cy))
            fac = np.clip(dist / np.maximum(dist_c, 1e-300), 0.0, 1.0)
            wxx[o] = ux[o] ** 2 + fac * cxx
            wxy[o] = ux[o] * uy[o] + fac * cxy
            wyy[o] = uy[o] ** 2 + fac * cyy
        out = (self.b_of(s), self.b_of(t), wxx, wxy, wyy)
        return tuple(np.reshape(a, shape) for a in out)


def _symmetric_log_axis(n: int, b_max: float, b_min: float = 1e-3) -> np.ndarray:
    mags = np.geomspace(b_min, b_max, n // 2)
    return np.concatenate([-mags[::-1], [0.0], mags])


@lru_cache(maxsize=8)
def build_half_table(n: int = 2048, b_max: float = 500.0) -> ClosureTable:
    """Tabulate the half-line exponential ansatz on a symmetric log grid in ``b``.

    The grid has ``2 * (n // 2) + 1`` points with ``b = 0`` in the middle.
    """
    if n < 100 or b_max <= 0:
        raise ValueError("need n >= 100 and b_max > 0")
    b = _symmetric_log_axis(n, b_max)
    u, w = half_forward(b)
    if np.any(np.diff(u) <= 0):
        raise RuntimeError("half-moment forward map is not monotone on the grid")
    return ClosureTable("half", b, u, w, {"n": n, "b_max": b_max})


@lru_cache(maxsize=8)
def build_m1_table(n: int = 2048, b_max: float = 500.0, dim: int = 1) -> ClosureTable:
    """Full-domain M1 table over ``|b|``; ``dim=2`` adds the perpendicular moment.

    On the projected sphere the component of ``v`` along ``b`` is uniform on
    ``[-1, 1]``, so the parallel maps coincide with the 1D ones and
    ``w_perp = (1 - w_par) / 2``.
    """
    if n < 100 or b_max <= 0:
        raise ValueError("need n >= 100 and b_max > 0")
    b = np.concatenate([[0.0], np.geomspace(1e-3, b_max, n - 1)])
    u, w = m1_forward(b)
    if dim == 1:
        return ClosureTable("m1_1d", b, u, w, {"n": n, "b_max": b_max})
    return ClosureTable("m1_2d", b, u, np.stack([w, 0.5 * (1 - w)], axis=1), {"n": n, "b_max": b_max})


def _quarter_axis(n_per_axis: int, b_max: float, slope: float = 0.3):
    nh = n_per_axis // 2
    k = brentq(lambda k: slope / k * np.sinh(nh * k) - b_max, 1e-6, np.log(4 * b_max / slope) / nh)
    b0 = slope / k
    s = np.arange(-nh, nh + 1, dtype=float)
    return b0 * np.sinh(k * s), b0, k


@lru_cache(maxsize=4)
def build_quarter_table(n_per_axis: int = 128, b_max: float = 70.0, quad_n: int = 64, slope: float = 0.3) -> ClosureTable:
    """Tabulate the ``++`` quadrant exponential ansatz on a 2D multiplier grid.

    Each axis holds ``2 * (n_per_axis // 2) + 1`` values ``b0 sinh(k s)``,
    log-like in magnitude with both signs.  Moments come from Gauss-Legendre
    quadrature; a subset of entries is re-integrated with a finer composite
    rule as a self-check.
    """
    if n_per_axis < 64:
        raise ValueError("n_per_axis must be >= 64")
    axis, b0, k = _quarter_axis(n_per_axis, b_max, slope)
    n = axis.size
    BX, BY = np.meshgrid(axis, axis, indexing="ij")
    B = np.stack([BX.ravel(), BY.ravel()], axis=1)
    rule = quadrature(VelocityDomain2D.PP, quad_n)
    U = np.empty((B.shape[0], 2))
    W = np.empty((B.shape[0], 3))
    for chunk in np.array_split(np.arange(B.shape[0]), max(1, B.shape[0] // 1024)):
        u, w = exp_ansatz_moments(B[chunk], rule)
        U[chunk] = u
        W[chunk] = np.stack([w[:, 0, 0], w[:, 0, 1], w[:, 1, 1]], axis=1)
    if np.any(U < 0) or np.any(np.hypot(U[:, 0], U[:, 1]) > 1):
        raise RuntimeError("tabulated first moments left the quarter disk")
    check = np.arange(0, B.shape[0], 97)
    fine = quadrature(VelocityDomain2D.PP, quad_n, panels=3)
    uf, wf = exp_ansatz_moments(B[check], fine)
    err = max(np.abs(uf - U[check]).max(), np.abs(wf[:, 0, 0] - W[check, 0]).max())
    if err > 1e-8:
        raise RuntimeError(f"quarter table quadrature self-check failed ({err:.2e})")
    meta = {"n_per_axis": n_per_axis, "b_max": b_max, "b0": b0, "k": k, "quad_n": quad_n, "slope": slope}
    return ClosureTable("quarter", axis, U.reshape(n, n, 2), W.reshape(n, n, 3), meta)


def build_table(kind: str, **kwargs) -> ClosureTable:
    builders = {
        "half": build_half_table,
        "quarter": build_quarter_table,
        "m1_1d": lambda **kw: build_m1_table(dim=1, **kw),
        "m1_2d": lambda **kw: build_m1_table(dim=2, **kw),
    }
    if kind not in builders:
        raise ValueError(f"unknown table kind {kind!r}; expected one of {sorted(builders)}")
    return builders[kind](**kwargs)


def save_table(table: ClosureTable, path) -> Path:
    """Write a table as ``.npz`` with a magic string, version and JSON header."""
    path = Path(path)
    header = {"magic": TABLE_MAGIC, "version": TABLE_VERSION, "kind": table.kind, "meta": table.meta}
    with open(path, "wb") as fh:
        np.savez(fh, header=np.array(json.dumps(header)), b=table.b, u=table.u, w=table.w)
    return path


def load_table(path) -> ClosureTable:
    with np.load(Path(path), allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        if header.get("magic") != TABLE_MAGIC:
            raise ValueError(f"{path}: not a closure table (bad magic)")
        if header.get("version") != TABLE_VERSION:
            raise ValueError(f"{path}: unsupported table version {header.get('version')}")
        return ClosureTable(header["kind"], data["b"], data["u"], data["w"], header["meta"])


# ---------------------------------------------------------------------------
# closures


def _linear_fit_matrix_1d(domain):
    m0, m1, m2 = basis_moments_1d(domain)
    A = np.array([[m0, m1], [m1, m2]])
    # r = m2 a + m3 b with (a, b) = A^{-1} (rho, q)
    return np.array([m2, third_moment_1d(domain)]) @ np.linalg.inv(A)


_LIN_PLUS = _linear_fit_matrix_1d(VelocityDomain1D.PLUS)
_LIN_MINUS = _linear_fit_matrix_1d(VelocityDomain1D.MINUS)


def linear_half_second_moment(rho, q, sign: int):
    """Second moment of the linear ansatz ``a + b v`` on one half line.

    Works out to ``-rho/6 + q`` on ``[0, 1]`` and ``-rho/6 - q`` on ``[-1, 0]``.
    """
    c = _LIN_PLUS if sign > 0 else _LIN_MINUS
    return c[0] * np.asarray(rho) + c[1] * np.asarray(q)


def linear_half_closure(hm: HalfMoments):
    return (
        linear_half_second_moment(hm.rho_p, hm.q_p, +1),
        linear_half_second_moment(hm.rho_m, hm.q_m, -1),
    )


def _normalized(rho, q):
    rho = np.asarray(rho, dtype=float)
    q = np.asarray(q, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(rho > 0, q / np.where(rho > 0, rho, 1.0), 0.0)


def entropy_half_second_moment(rho, q, sign: int, table: ClosureTable):
    """``rho * w(u)`` for the exponential ansatz on the half line of the given sign."""
    rho = np.asarray(rho, dtype=float)
    u = sign * _normalized(rho, q)
    if np.any(u < -REALIZABILITY_SLACK) or np.any(u > 1 + REALIZABILITY_SLACK) or np.any(rho < 0):
        bad = np.flatnonzero((u < -REALIZABILITY_SLACK) | (u > 1 + REALIZABILITY_SLACK) | (rho < 0))
        raise RealizabilityError(
            f"unrealizable half moments at {bad.size} cell(s), first index {bad[0]}; project first"
        )
    return rho * table.w_fast(np.clip(u, 0.0, 1.0))


def entropy_half_closure(hm: HalfMoments, table: ClosureTable):
    return (
        entropy_half_second_moment(hm.rho_p, hm.q_p, +1, table),
        entropy_half_second_moment(hm.rho_m, hm.q_m, -1, table),
    )


@lru_cache(maxsize=None)
def _linear_quarter_matrices():
    mats = []
    for quad in QUADRANTS:
        m0, m1, m2 = basis_moments_2d(quad)
        A = np.empty((3, 3))
        A[0, 0], A[0, 1:], A[1:, 0], A[1:, 1:] = m0, m1, m1, m2
        if abs(np.linalg.det(A)) < 1e-10:
            raise RuntimeError(f"singular basis-moment matrix for {quad}")
        m3 = third_moments_2d(quad)
        # rows: r_xx, r_xy, r_yy in terms of (a, bx, by)
        R = np.array(
            [
                [m2[0, 0], m3[0, 0, 0], m3[0, 0, 1]],
                [m2[0, 1], m3[0, 1, 0], m3[0, 1, 1]],
                [m2[1, 1], m3[1, 1, 0], m3[1, 1, 1]],
            ]
        )
        mats.append(R @ np.linalg.inv(A))
    return np.stack(mats)


def linear_quarter_closure(qm: QuarterMoments):
    """Second moments ``(r_xx, r_xy, r_yy)`` of the per-quadrant linear ansatz ``a + b.v``."""
    M = _linear_quarter_matrices()
    rho, qx, qy = (np.asarray(a, dtype=float) for a in qm)
    shape = (4,) + (1,) * (rho.ndim - 1)
    out = []
    for row in range(3):
        c = M[:, row, :]
        out.append(
            c[:, 0].reshape(shape) * rho + c[:, 1].reshape(shape) * qx + c[:, 2].reshape(shape) * qy
        )
    return tuple(out)


def entropy_quarter_closure(qm: QuarterMoments, table: ClosureTable):
    """Per-quadrant minimum-entropy second moments ``(r_xx, r_xy, r_yy)``.

    Every quadrant is reflected onto ``++``, looked up there and reflected
    back, so ``r_xy`` picks up the product of the quadrant's signs.
    """
    rho, qx, qy = (np.asarray(a, dtype=float) for a in qm)
    signs = np.array([q.signs for q in QUADRANTS], dtype=float)
    shape = (4,) + (1,) * (rho.ndim - 1)
    sx, sy = signs[:, 0].reshape(shape), signs[:, 1].reshape(shape)
    ux = sx * _normalized(rho, qx)
    uy = sy * _normalized(rho, qy)
    slack = REALIZABILITY_SLACK
    bad = (ux < -slack) | (uy < -slack) | (np.hypot(ux, uy) > 1 + slack) | (rho < 0)
    if np.any(bad):
        raise RealizabilityError(
            f"unrealizable quarter moments in {int(bad.sum())} cell(s); project first"
        )
    ux, uy = np.clip(ux, 0, 1), np.clip(uy, 0, 1)
    norm = np.hypot(ux, uy)
    over = norm > 1
    ux = np.where(over, ux / np.where(over, norm, 1), ux)
    uy = np.where(over, uy / np.where(over, norm, 1), uy)
    _, _, wxx, wxy, wyy = table.invert_quarter(ux, uy)
    return rho * wxx, rho * sx * sy * wxy, rho * wyy


def m1_full_closure_1d(rho, q, table: ClosureTable):
    """``rho * w(u)`` for the full-domain exponential ansatz; ``w`` is even in ``u``."""
    rho = np.asarray(rho, dtype=float)
    u = _normalized(rho, q)
    if np.any(np.abs(u) > 1 + REALIZABILITY_SLACK) or np.any(rho < 0):
        raise RealizabilityError("unrealizable full moments (|q| > rho); project first")
    return rho * table.w_fast(np.minimum(np.abs(u), 1.0))


def m1_full_closure_2d(rho, qx, qy, table: ClosureTable):
    """Full-disk M1 second moments ``(r_xx, r_xy, r_yy)``.

    Uses ``w = w_perp I + (w_par - w_perp) n (x) n`` with ``n = u/|u|``.
    """
    rho = np.asarray(rho, dtype=float)
    ux, uy = _normalized(rho, qx), _normalized(rho, qy)
    un = np.hypot(ux, uy)
    if np.any(un > 1 + REALIZABILITY_SLACK) or np.any(rho < 0):
        raise RealizabilityError("unrealizable full moments (|q| > rho); project first")
    un_c = np.minimum(un, 1.0)
    _, w_par = table.invert(un_c)
    w_perp = 0.5 * (1.0 - w_par)
    safe = np.where(un > 0, un, 1.0)
    nx = np.where(un > 0, ux / safe, 1.0)
    ny = np.where(un > 0, uy / safe, 0.0)
    diff = w_par - w_perp
    return rho * (w_perp + diff * nx * nx), rho * diff * nx * ny, rho * (w_perp + diff * ny * ny)
