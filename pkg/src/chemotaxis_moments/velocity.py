"""Velocity-space geometry: half-line and quadrant domains, exact basis
moments, Gauss-Legendre quadrature and the chemotactic gradient limiter.

The 2D domains use the projected-sphere parametrization

    v(phi, r) = (sqrt(1 - r^2) cos(phi), sqrt(1 - r^2) sin(phi)),  r in [-1, 1]

with measure ``dphi dr``, so every quadrant has measure pi and the whole disk 4*pi.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PI = np.pi


class VelocityDomain1D(enum.Enum):
    FULL = "full"
    PLUS = "plus"
    MINUS = "minus"

    @property
    def bounds(self) -> tuple[float, float]:
        return {"full": (-1.0, 1.0), "plus": (0.0, 1.0), "minus": (-1.0, 0.0)}[self.value]

    @property
    def measure(self) -> float:
        lo, hi = self.bounds
        return hi - lo


class VelocityDomain2D(enum.Enum):
    """Quadrants are named by the signs of (v_x, v_y)."""

    FULL = "full"
    PP = "pp"
    MP = "mp"
    MM = "mm"
    PM = "pm"

    @property
    def phi_bounds(self) -> tuple[float, float]:
        return {
            "full": (0.0, 2 * PI),
            "pp": (0.0, PI / 2),
            "mp": (PI / 2, PI),
            "mm": (PI, 3 * PI / 2),
            "pm": (3 * PI / 2, 2 * PI),
        }[self.value]

    @property
    def signs(self) -> tuple[int, int]:
        """Sign pattern of (v_x, v_y); ``(0, 0)`` for the full disk."""
        return {"full": (0, 0), "pp": (1, 1), "mp": (-1, 1), "mm": (-1, -1), "pm": (1, -1)}[
            self.value
        ]

    @property
    def measure(self) -> float:
        lo, hi = self.phi_bounds
        return 2.0 * (hi - lo)


QUADRANTS = (VelocityDomain2D.PP, VelocityDomain2D.MP, VelocityDomain2D.MM, VelocityDomain2D.PM)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes are velocities: shape ``(N,)`` in 1D, ``(N, 2)`` in 2D."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate samples at the nodes; the node axis must be the last one."""
        return np.asarray(values) @ self.weights


def basis_moments_1d(domain: VelocityDomain1D) -> tuple[float, float, float]:
    """Exact integrals of ``1, v, v**2`` over the domain."""
    if domain is VelocityDomain1D.PLUS:
        return 1.0, 0.5, 1.0 / 3.0
    if domain is VelocityDomain1D.MINUS:
        return 1.0, -0.5, 1.0 / 3.0
    return 2.0, 0.0, 2.0 / 3.0


def third_moment_1d(domain: VelocityDomain1D) -> float:
    return {VelocityDomain1D.PLUS: 0.25, VelocityDomain1D.MINUS: -0.25}.get(domain, 0.0)


def basis_moments_2d(domain: VelocityDomain2D) -> tuple[float, np.ndarray, np.ndarray]:
    """Exact ``int 1``, ``int v`` and ``int v (x) v`` over a quadrant or the disk.

    The phi and r integrals factor; ``int (1 - r^2)^(1/2) dr = pi/2`` and
    ``int (1 - r^2) dr = 4/3``.
    """
    if domain is VelocityDomain2D.FULL:
        return 4 * PI, np.zeros(2), (4 * PI / 3) * np.eye(2)
    sx, sy = domain.signs
    m1 = np.array([sx * PI / 2, sy * PI / 2])
    off = sx * sy * 2.0 / 3.0
    m2 = np.array([[PI / 3, off], [off, PI / 3]])
    return PI, m1, m2


def third_moments_2d(domain: VelocityDomain2D) -> np.ndarray:
    """``int v_i v_j v_k`` over the domain as a ``(2, 2, 2)`` array."""
    out = np.zeros((2, 2, 2))
    if domain is VelocityDomain2D.FULL:
        return out
    sx, sy = domain.signs
    # int (1 - r^2)^(3/2) dr = 3 pi / 8; phi integrals of cos^3 = 2/3, cos^2 sin = 1/3
    c = 3 * PI / 8
    xxx, yyy = sx * c * 2 / 3, sy * c * 2 / 3
    xxy, xyy = sy * c / 3, sx * c / 3
    out[0, 0, 0] = xxx
    out[1, 1, 1] = yyy
    out[0, 0, 1] = out[0, 1, 0] = out[1, 0, 0] = xxy
    out[0, 1, 1] = out[1, 0, 1] = out[1, 1, 0] = xyy
    return out


def _gauss_legendre(n: int, lo: float, hi: float, panels: int = 1) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@lru_cache(maxsize=64)
def _quadrature_cached(domain, n, panels) -> QuadratureRule:
    if isinstance(domain, VelocityDomain1D):
        nodes, weights = _gauss_legendre(n, *domain.bounds, panels=panels)
        return QuadratureRule(nodes, weights)
    n_phi, n_psi = n
    phi, wphi = _gauss_legendre(n_phi, *domain.phi_bounds, panels=panels)
    # r = sin(psi) removes the square-root endpoint behaviour of sqrt(1 - r^2)
    psi, wpsi = _gauss_legendre(n_psi, -PI / 2, PI / 2, panels=panels)
    P, S = np.meshgrid(phi, psi, indexing="ij")
    W = np.outer(wphi, wpsi * np.cos(psi))
    nodes = np.stack([np.cos(S) * np.cos(P), np.cos(S) * np.sin(P)], axis=-1).reshape(-1, 2)
    return QuadratureRule(nodes, W.ravel())


def quadrature(domain, n, panels: int = 1) -> QuadratureRule:
    """Gauss-Legendre rule on a velocity domain.

    ``n`` is the node count in 1D; in 2D either an int (same count per axis)
    or a ``(n_phi, n_r)`` pair. ``panels`` splits each axis into equal
    sub-intervals (composite rule).
    """
    if isinstance(domain, VelocityDomain2D):
        n = (n, n) if np.isscalar(n) else tuple(int(k) for k in n)
        if min(n) < 2:
            raise ValueError(f"quadrature needs at least 2 nodes per axis, got {n}")
    else:
        n = int(n)
        if n < 2:
            raise ValueError(f"quadrature needs at least 2 nodes, got {n}")
    return _quadrature_cached(domain, n, int(panels))


def limiter_phi(g, s: float):
    """Saturating limiter for the chemoattractant gradient.

    Identity for ``|g| <= s``; beyond that the magnitude grows like
    ``s + (|g| - s) / sqrt(1 + (|g| - s)^2)`` so it never exceeds ``s + 1``.
    Arrays are treated componentwise as 1D gradients; see
    :func:`limiter_phi_vec` for vector gradients.
    """
    g = np.asarray(g, dtype=float)
    norm = np.abs(g)
    excess = np.maximum(norm - s, 0.0)
    scale = np.where(norm > s, (excess / np.hypot(1.0, excess) + s) / np.where(norm > s, norm, 1.0), 1.0)
    return g * scale


def limiter_phi_vec(g, s: float):
    """Vector version of :func:`limiter_phi`; the last axis holds the components."""
    g = np.asarray(g, dtype=float)
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    excess = np.maximum(norm - s, 0.0)
    scale = np.where(norm > s, (excess / np.hypot(1.0, excess) + s) / np.where(norm > s, norm, 1.0), 1.0)
    return g * scale
