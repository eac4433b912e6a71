"""Realizability checks and the cheap projection applied after each update."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RHO_FLOOR = 1e-14


@dataclass(frozen=True)
class RealizabilityReport:
    ok: bool
    worst_violation: float
    location: tuple[int, str] | None
    tol: float


def _report(violations: dict[str, np.ndarray], tol: float) -> RealizabilityReport:
    worst, where = 0.0, None
    for name, v in violations.items():
        v = np.ravel(v)
        if v.size == 0:
            continue
        i = int(np.argmax(v))
        if v[i] > worst:
            worst, where = float(v[i]), (i, name)
    return RealizabilityReport(worst <= tol, worst, where, tol)


def check_half(rho_p, rho_m, q_p, q_m, r_p=None, r_m=None, tol: float = 0.0) -> RealizabilityReport:
    """Check half-moment realizability, optionally including the second moments.

    Conditions per half line: ``rho >= 0``, ``+-q >= 0``, ``|q| <= rho`` and
    ``q^2/rho <= r <= +-q``.  Violations are measured as positive excesses.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    viol = {}
    for tag, rho, q, r, sign in (("p", rho_p, q_p, r_p, 1), ("m", rho_m, q_m, r_m, -1)):
        rho = np.asarray(rho, dtype=float)
        q = np.asarray(q, dtype=float)
        viol[f"rho_{tag}"] = -rho
        viol[f"q_{tag}"] = -sign * q
        viol[f"|q_{tag}|"] = np.abs(q) - rho
        if r is not None:
            r = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                lower = np.where(rho > 0, q**2 / np.where(rho > 0, rho, 1.0), np.where(q == 0, 0.0, np.inf))
            viol[f"r_{tag}_lower"] = lower - r
            viol[f"r_{tag}_upper"] = r - sign * q
    return _report(viol, tol)


def check_full_1d(rho, q, tol: float = 0.0) -> RealizabilityReport:
    rho, q = np.asarray(rho, float), np.asarray(q, float)
    return _report({"rho": -rho, "|q|": np.abs(q) - rho}, tol)


def check_quarter(rho, qx, qy, tol: float = 0.0) -> RealizabilityReport:
    """Quadrant conditions: the normalized flux of each quadrant lies in its quarter disk.

    Arrays carry a leading quadrant axis in ``QUADRANTS`` order.
    """
    from .velocity import QUADRANTS

    rho, qx, qy = (np.asarray(a, float) for a in (rho, qx, qy))
    signs = np.array([q.signs for q in QUADRANTS], dtype=float)
    shape = (4,) + (1,) * (rho.ndim - 1)
    sx, sy = signs[:, 0].reshape(shape), signs[:, 1].reshape(shape)
    return _report(
        {"rho": -rho, "qx": -sx * qx, "qy": -sy * qy, "|q|": np.hypot(qx, qy) - rho}, tol
    )


def check_full_2d(rho, qx, qy, tol: float = 0.0) -> RealizabilityReport:
    rho, qx, qy = (np.asarray(a, float) for a in (rho, qx, qy))
    return _report({"rho": -rho, "|q|": np.hypot(qx, qy) - rho}, tol)


def project_half(rho, q, sign: int):
    """Floor the density, clamp the flux sign, then enforce ``|q| <= rho``.

    The clamp uses the density rather than a unit bound, which would leave
    ``|q| > rho`` possible whenever ``rho < 1``.
    """
    rho = np.maximum(np.asarray(rho, dtype=float), RHO_FLOOR)
    q = sign * np.maximum(sign * np.asarray(q, dtype=float), 0.0)
    q = np.clip(q, -rho, rho)
    return rho, q


def project_full_1d(rho, q):
    rho = np.maximum(np.asarray(rho, dtype=float), RHO_FLOOR)
    return rho, np.clip(np.asarray(q, dtype=float), -rho, rho)


def project_quarter(rho, q, quadrant):
    """Project one quadrant's ``(rho, q)``; ``q`` has a trailing axis of length 2.

    The hull of the quadrant's velocities is the closed quarter disk, so
    after the componentwise sign clamp only ``|q| <= rho`` remains, enforced
    by direction-preserving rescaling.
    """
    sx, sy = quadrant.signs
    rho = np.maximum(np.asarray(rho, dtype=float), RHO_FLOOR)
    q = np.array(q, dtype=float, copy=True)
    q[..., 0] = sx * np.maximum(sx * q[..., 0], 0.0)
    q[..., 1] = sy * np.maximum(sy * q[..., 1], 0.0)
    return rho, _shrink_to_density(rho, q)


def project_full_2d(rho, q):
    rho = np.maximum(np.asarray(rho, dtype=float), RHO_FLOOR)
    return rho, _shrink_to_density(rho, np.array(q, dtype=float, copy=True))


def _shrink_to_density(rho, q):
    norm = np.hypot(q[..., 0], q[..., 1])
    over = norm > rho
    if np.any(over):
        f = np.where(over, rho / np.where(over, norm, 1.0), 1.0)
        q = q * f[..., None]
        # rounding in the rescale may leave |q| a hair above rho
        norm = np.hypot(q[..., 0], q[..., 1])
        still = norm > rho
        if np.any(still):
            q = q * np.where(still, np.nextafter(rho / np.where(still, norm, 1.0), 0.0), 1.0)[..., None]
    return q
