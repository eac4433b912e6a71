"""Compiled time loops for the 1D half-moment and kinetic solvers.

Each kernel advances a state in place by ``nsteps`` steps of size ``dt``
(transport, projection, implicit chemoattractant update from the pre-step
density) and is arithmetically the same scheme as the numpy steppers in
:mod:`transport` and :mod:`chemo`.  They exist because at 1D resolutions
both solvers are dominated by per-call interpreter overhead, which hides
the actual cost difference between the models.

Diagnostics are returned in a float array ``[projected_cells, mass_added,
min_rho, max_violation, finite]``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

RHO_FLOOR = 1e-14

LINEAR, ENTROPY = 0, 1


@njit(cache=True)
def _limiter(g, s):
    a = abs(g)
    if a <= s:
        return g
    e = a - s
    return g * ((e / np.sqrt(1.0 + e * e) + s) / a)


@njit(cache=True)
def _chemo_implicit(m, rho, dt, dx, beta, delta, D_m, rhs, cp):
    """Thomas solve of ``(I - D dt L) m_new = (1 - dt delta) m + dt beta max(rho, 0)``."""
    n = m.size
    for i in range(n):
        rhs[i] = (1.0 - dt * delta) * m[i] + dt * beta * max(rho[i], 0.0)
    c = D_m * dt / (dx * dx)
    if c == 0.0:
        for i in range(n):
            m[i] = rhs[i]
        return
    # forward sweep; diagonal is 1 + 2c inside and 1 + c at both ends
    b0 = 1.0 + c
    cp[0] = -c / b0
    rhs[0] = rhs[0] / b0
    for i in range(1, n):
        b = (1.0 + c) if i == n - 1 else (1.0 + 2.0 * c)
        den = b + c * cp[i - 1]
        cp[i] = -c / den
        rhs[i] = (rhs[i] + c * rhs[i - 1]) / den
    m[n - 1] = rhs[n - 1]
    for i in range(n - 2, -1, -1):
        m[i] = rhs[i] - cp[i] * m[i + 1]


@njit(cache=True)
def _gradient(m, dx, out):
    n = m.size
    out[0] = (m[1] - m[0]) / dx
    out[n - 1] = (m[n - 1] - m[n - 2]) / dx
    for i in range(1, n - 1):
        out[i] = (m[i + 1] - m[i - 1]) / (2.0 * dx)


@njit(cache=True)
def _second_moment(rho, q, sign, closure, lin0, lin1, w_tab):
    if closure == LINEAR:
        return lin0 * rho + lin1 * q
    u = sign * q / rho if rho > 0.0 else 0.0
    u = min(max(u, 0.0), 1.0)
    x = u * (w_tab.size - 1)
    k = min(int(x), w_tab.size - 2)
    t = x - k
    return rho * ((1.0 - t) * w_tab[k] + t * w_tab[k + 1])


@njit(cache=True)
def advance_half_1d(rho_p, rho_m, q_p, q_m, m, nsteps, dt, dx, lam, alpha, beta, delta, D_m, s,
                    closure, lin_p, lin_m, w_tab, project):
    n = rho_p.size
    rp_g = np.empty(n + 1)  # plus second moment at ghost + cells 0..n-1
    rm_g = np.empty(n + 1)  # minus second moment at cells 0..n-1 + ghost
    grad = np.empty(n)
    rho = np.empty(n)
    rhs = np.empty(n)
    cp = np.empty(n)
    new_rp = np.empty(n)
    new_rm = np.empty(n)
    new_qp = np.empty(n)
    new_qm = np.empty(n)
    diag = np.zeros(5)
    diag[2] = np.inf
    diag[4] = 1.0
    c = dt / dx
    for _ in range(nsteps):
        rp_g[0] = _second_moment(rho_m[0], -q_m[0], 1.0, closure, lin_p[0], lin_p[1], w_tab)
        rm_g[n] = _second_moment(rho_p[n - 1], -q_p[n - 1], -1.0, closure, lin_m[0], lin_m[1], w_tab)
        for i in range(n):
            rp_g[i + 1] = _second_moment(rho_p[i], q_p[i], 1.0, closure, lin_p[0], lin_p[1], w_tab)
            rm_g[i] = _second_moment(rho_m[i], q_m[i], -1.0, closure, lin_m[0], lin_m[1], w_tab)
            rho[i] = rho_p[i] + rho_m[i]
        _gradient(m, dx, grad)
        for i in range(n):
            chem = alpha * rho[i] * _limiter(grad[i], s)
            qp_back = q_p[i - 1] if i > 0 else -q_m[0]
            qm_fwd = q_m[i + 1] if i < n - 1 else -q_p[n - 1]
            new_rp[i] = rho_p[i] - c * (q_p[i] - qp_back) + dt * (-lam * rho_p[i] + 0.5 * lam * rho[i] + 0.25 * chem)
            new_rm[i] = rho_m[i] - c * (qm_fwd - q_m[i]) + dt * (-lam * rho_m[i] + 0.5 * lam * rho[i] - 0.25 * chem)
            new_qp[i] = q_p[i] - c * (rp_g[i + 1] - rp_g[i]) + dt * (-lam * q_p[i] + 0.25 * lam * rho[i] + chem / 6)
            new_qm[i] = q_m[i] - c * (rm_g[i + 1] - rm_g[i]) + dt * (-lam * q_m[i] - 0.25 * lam * rho[i] + chem / 6)
        for i in range(n):
            a, b, qa, qb = new_rp[i], new_rm[i], new_qp[i], new_qm[i]
            if project:
                a2 = max(a, RHO_FLOOR)
                b2 = max(b, RHO_FLOOR)
                qa2 = min(max(qa, 0.0), a2)
                qb2 = max(min(qb, 0.0), -b2)
                if a2 != a or b2 != b or qa2 != qa or qb2 != qb:
                    diag[0] += 1.0
                diag[1] += ((a2 - a) + (b2 - b)) * dx
                a, b, qa, qb = a2, b2, qa2, qb2
            viol = max(-a, -b, -qa, qb, abs(qa) - a, abs(qb) - b)
            diag[3] = max(diag[3], viol)
            diag[2] = min(diag[2], a + b)
            if not (np.isfinite(a) and np.isfinite(b) and np.isfinite(qa) and np.isfinite(qb)):
                diag[4] = 0.0
            rho_p[i], rho_m[i], q_p[i], q_m[i] = a, b, qa, qb
        _chemo_implicit(m, rho, dt, dx, beta, delta, D_m, rhs, cp)
        if diag[4] == 0.0:
            break
    return diag


@njit(cache=True)
def advance_kinetic_1d(f, v, m, nsteps, dt, dx, lam, alpha, beta, delta, D_m, s):
    n, nv = f.shape
    dv = 2.0 / nv
    rho = np.empty(n)
    grad = np.empty(n)
    rhs = np.empty(n)
    cp = np.empty(n)
    new = np.empty_like(f)
    diag = np.zeros(5)
    diag[2] = np.inf
    diag[4] = 1.0
    c = dt / dx
    for _ in range(nsteps):
        for i in range(n):
            acc = 0.0
            for j in range(nv):
                acc += f[i, j]
            rho[i] = acc * dv
        _gradient(m, dx, grad)
        for i in range(n):
            chem = 0.5 * alpha * rho[i] * _limiter(grad[i], s)
            for j in range(nv):
                vj = v[j]
                if vj > 0:
                    back = f[i - 1, j] if i > 0 else f[0, nv - 1 - j]
                    diff = f[i, j] - back
                else:
                    fwd = f[i + 1, j] if i < n - 1 else f[n - 1, nv - 1 - j]
                    diff = fwd - f[i, j]
                new[i, j] = f[i, j] - c * vj * diff + dt * (-lam * (f[i, j] - 0.5 * rho[i]) + chem * vj)
        for i in range(n):
            acc = 0.0
            for j in range(nv):
                x = new[i, j]
                f[i, j] = x
                acc += x
                diag[3] = max(diag[3], -x)
                if not np.isfinite(x):
                    diag[4] = 0.0
            diag[2] = min(diag[2], acc * dv)
        _chemo_implicit(m, rho, dt, dx, beta, delta, D_m, rhs, cp)
        if diag[4] == 0.0:
            break
    return diag
