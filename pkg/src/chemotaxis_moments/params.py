"""Grid and model parameter containers shared by the solvers."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Equidistant cell-centred grid; ``ny = None`` means one space dimension."""

    x_min: float
    x_max: float
    nx: int
    y_min: float | None = None
    y_max: float | None = None
    ny: int | None = None

    def __post_init__(self):
        if self.nx < 4 or (self.ny is not None and self.ny < 4):
            raise ValueError("grids need at least 4 cells per axis")
        if self.x_max <= self.x_min or (self.ny is not None and self.y_max <= self.y_min):
            raise ValueError("empty domain")

    @classmethod
    def from_spacing(cls, x_min, x_max, dx, y_min=None, y_max=None, dy=None):
        nx = int(round((x_max - x_min) / dx))
        if y_min is None:
            return cls(x_min, x_max, nx)
        ny = int(round((y_max - y_min) / (dy if dy is not None else dx)))
        return cls(x_min, x_max, nx, y_min, y_max, ny)

    @property
    def dim(self) -> int:
        return 1 if self.ny is None else 2

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self) -> float:
        if self.ny is None:
            raise AttributeError("1D grid has no dy")
        return (self.y_max - self.y_min) / self.ny

    @property
    def x(self) -> np.ndarray:
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y(self) -> np.ndarray:
        return self.y_min + (np.arange(self.ny) + 0.5) * self.dy

    @property
    def cell_volume(self) -> float:
        return self.dx if self.dim == 1 else self.dx * self.dy

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.nx,) if self.dim == 1 else (self.nx, self.ny)

    def mesh(self):
        """Cell-centre coordinates with ``indexing='ij'``."""
        return np.meshgrid(self.x, self.y, indexing="ij")


@dataclass(frozen=True)
class ModelParams:
    """Turning rate ``lam``, chemotactic sensitivity ``alpha``, production
    ``beta``, decay ``delta``, chemoattractant diffusivity ``D_m`` and limiter
    threshold ``s``."""

    lam: float
    alpha: float
    beta: float
    delta: float
    D_m: float
    s: float

    def __post_init__(self):
        for name in ("lam", "alpha", "beta", "delta", "D_m", "s"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)) or v < 0:
                raise ValueError(f"parameter {name} must be a finite non-negative number, got {v!r}")

    def check_turning_bound(self, dim: int) -> bool:
        """Warn when ``lam < C_V alpha (s + 1)``, where positivity of the kinetic
        solution is no longer guaranteed."""
        c_v = 0.5 if dim == 1 else 1.0 / (4.0 * math.pi)
        ok = self.lam >= c_v * self.alpha * (self.s + 1.0)
        if not ok:
            warnings.warn(
                f"lam={self.lam} < C_V*alpha*(s+1)={c_v * self.alpha * (self.s + 1):.4g}; "
                "non-negativity of the kinetic density is not guaranteed",
                stacklevel=2,
            )
        return ok
