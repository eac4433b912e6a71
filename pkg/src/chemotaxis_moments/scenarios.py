"""Benchmark scenarios: parameters, initial data and comparison helpers."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .chemo import ChemoField
from .params import Grid, ModelParams
from .transport import (
    FullMomentField1D,
    FullMomentField2D,
    KineticField1D,
    MomentField1D,
    MomentField2D,
)
from .velocity import QUADRANTS, basis_moments_2d

FLOOR = 1e-4
SQRT2 = np.sqrt(2.0)

MODELS_1D = ("hp1", "hm1", "m1_1d", "kinetic")
MODELS_2D = ("qp1", "qm1", "m1_2d")
MODELS = MODELS_1D + MODELS_2D
COMPILED_MODELS = ("hp1", "hm1", "kinetic")


@dataclass(frozen=True)
class Scenario:
    """Point-value initial data plus the published parameter set.

    ``moments`` returns ``(rho_p, rho_m, q_p, q_m)`` in 1D and
    ``(rho, qx, qy)`` with a leading quadrant axis in 2D.  ``kinetic``
    (1D only) gives ``f(x, v)``; isotropic data default to ``f = rho_+``.
    """

    name: str
    dim: int
    domain: tuple[float, ...]
    dx: float
    t_final: float
    params: ModelParams
    moments: Callable
    chemo: Callable
    kinetic: Callable | None = None
    description: str = ""


# -- 1D -----------------------------------------------------------------------


def _one_spike_1d(x):
    rho = 0.5 * (100.0 * np.exp(-(x**2) / 0.01) + FLOOR)
    return rho, rho.copy(), 0.5 * rho, -0.5 * rho


def _two_spikes_1d(x):
    left = 100.0 * np.exp(-((x + 1.0) ** 2) / 0.01)
    right = 100.0 * np.exp(-((x - 1.0) ** 2) / 0.01)
    # the minus-flux must be non-positive: the right spike travels left
    return left + FLOOR, right + FLOOR, left, -right


def _two_spikes_kinetic(x, v):
    c = 100.0 / (0.05 * np.sqrt(np.pi))
    return c * (
        np.exp(-((v + 1.0) ** 2) / 0.01) * np.exp(-((x - 1.0) ** 2) / 0.01)
        + np.exp(-((v - 1.0) ** 2) / 0.01) * np.exp(-((x + 1.0) ** 2) / 0.01)
    )


def _kurganov(sign):
    amp = 0.01 * (1.0 + 4.0 * np.pi**2)

    def moments(x):
        rho = 0.5 * (1.0 + sign * amp * np.cos(2 * np.pi * x))
        return rho, rho.copy(), 0.5 * rho, -0.5 * rho

    def chemo(x):
        return 1.0 + sign * 0.01 * np.cos(2 * np.pi * x)

    return moments, chemo


# -- 2D -----------------------------------------------------------------------


def _isotropic_quarter(density_per_quadrant):
    """Quadrant moments of velocity-independent data: ``q = rho <v> / pi``."""
    rho = np.stack([density_per_quadrant] * 4)
    m1 = np.stack([basis_moments_2d(q)[1] for q in QUADRANTS]) / np.pi
    qx = rho * m1[:, 0].reshape(4, *([1] * density_per_quadrant.ndim))
    qy = rho * m1[:, 1].reshape(4, *([1] * density_per_quadrant.ndim))
    return rho, qx, qy


def _one_spike_2d(x, y):
    return _isotropic_quarter(0.25 * (100.0 * np.exp(-100.0 * (x**2 + y**2)) + FLOOR))


def _zeta(x, y, cx, cy):
    return 100.0 * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / 0.001)


QIDX = {q.value: k for k, q in enumerate(QUADRANTS)}


def _two_spikes_diag(include=(True, True)):
    def moments(x, y):
        zp = _zeta(x, y, 1 / SQRT2, -1 / SQRT2) if include[0] else np.zeros_like(x)
        zm = _zeta(x, y, 1 / SQRT2, 1 / SQRT2) if include[1] else np.zeros_like(x)
        rho = np.full((4,) + x.shape, FLOOR)
        qx = np.zeros((4,) + x.shape)
        qy = np.zeros((4,) + x.shape)
        rho[QIDX["mp"]] += zp
        qx[QIDX["mp"]] = -zp / SQRT2
        qy[QIDX["mp"]] = zp / SQRT2
        rho[QIDX["mm"]] += zm
        qx[QIDX["mm"]] = -zm / SQRT2
        qy[QIDX["mm"]] = -zm / SQRT2
        return rho, qx, qy

    return moments


def _two_spikes_axial(include=(True, True)):
    """Diagonal setup rotated by 45 degrees: one beam from (1, 0) moving in -x,
    one from (0, 1) moving in -y.  Each beam's velocity lies on a quadrant
    edge, so its mass is split evenly between the two adjacent quadrants."""

    def moments(x, y):
        za = _zeta(x, y, 1.0, 0.0) if include[0] else np.zeros_like(x)
        zb = _zeta(x, y, 0.0, 1.0) if include[1] else np.zeros_like(x)
        rho = np.full((4,) + x.shape, FLOOR)
        qx = np.zeros((4,) + x.shape)
        qy = np.zeros((4,) + x.shape)
        for quad in ("mp", "mm"):
            rho[QIDX[quad]] += 0.5 * za
            qx[QIDX[quad]] -= 0.5 * za
        for quad in ("pm", "mm"):
            rho[QIDX[quad]] += 0.5 * zb
            qy[QIDX[quad]] -= 0.5 * zb
        return rho, qx, qy

    return moments


def _zero_chemo(*xs):
    return np.zeros_like(xs[0])


_KURG_ALPHA = 1.2 * (1.0 + 4.0 * np.pi**2)

SCENARIOS: dict[str, Scenario] = {
    "one_spike_1d": Scenario(
        "one_spike_1d", 1, (-3.0, 3.0), 0.02, 5.0,
        ModelParams(lam=2.0, alpha=2.0, beta=1.0, delta=1.0, D_m=1.0, s=0.0),
        _one_spike_1d, _zero_chemo,
        description="isotropic Gaussian aggregate, no initial chemoattractant",
    ),
    "two_spikes_1d": Scenario(
        "two_spikes_1d", 1, (-3.0, 3.0), 0.02, 4.0,
        ModelParams(lam=0.5, alpha=0.5, beta=0.0, delta=0.0, D_m=0.0, s=0.0),
        _two_spikes_1d, lambda x: -(x**2) + 9.0, _two_spikes_kinetic,
        description="two colliding beams in a frozen parabolic chemoattractant",
    ),
    "kurganov_interior": Scenario(
        "kurganov_interior", 1, (0.0, 1.0), 0.02, 50.0,
        ModelParams(lam=0.5, alpha=_KURG_ALPHA, beta=1.0, delta=1.0, D_m=1.0, s=0.0),
        *_kurganov(-1.0),
        description="perturbed constant state forming a single interior spike",
    ),
    "kurganov_boundary": Scenario(
        "kurganov_boundary", 1, (0.0, 1.0), 0.02, 50.0,
        ModelParams(lam=0.5, alpha=_KURG_ALPHA, beta=1.0, delta=1.0, D_m=1.0, s=0.0),
        *_kurganov(+1.0),
        description="perturbed constant state forming two boundary spikes",
    ),
    "one_spike_2d": Scenario(
        "one_spike_2d", 2, (-3.0, 3.0, -3.0, 3.0), 0.1, 2.0,
        ModelParams(lam=2.0, alpha=4.0, beta=8.0, delta=1.0, D_m=1.0, s=0.0),
        _one_spike_2d, _zero_chemo,
        description="isotropic Gaussian aggregate in 2D",
    ),
    "two_spikes_diag": Scenario(
        "two_spikes_diag", 2, (-3.0, 3.0, -3.0, 3.0), 0.1, 3.0,
        ModelParams(lam=1 / np.pi, alpha=2 / np.pi, beta=0.0, delta=0.0, D_m=0.0, s=1.0),
        _two_spikes_diag(), lambda x, y: -(x**2 + y**2) + 18.0,
        description="two beams on orthogonal diagonal paths",
    ),
    "two_spikes_axial": Scenario(
        "two_spikes_axial", 2, (-3.0, 3.0, -3.0, 3.0), 0.1, 3.0,
        ModelParams(lam=1 / np.pi, alpha=2 / np.pi, beta=0.0, delta=0.0, D_m=0.0, s=1.0),
        _two_spikes_axial(), lambda x, y: -(x**2 + y**2) + 18.0,
        description="two beams on orthogonal axis-aligned paths",
    ),
}


def model_dim(model: str) -> int:
    if model in MODELS_1D:
        return 1
    if model in MODELS_2D:
        return 2
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    model: str
    grid: Grid
    t_final: float
    params: ModelParams
    snapshot_times: tuple[float, ...]
    tables: dict = field(default_factory=dict)
    chemo_rtol: float = 1e-10
    chemo_max_iter: int = 10_000
    chemo_implicit: bool = True
    project: bool = True
    nv: int = 64
    # "compiled" runs hp1/hm1/kinetic through the jitted time loops
    engine: str = "numpy"
    # which spikes of a two-spike 2D scenario are present; used by superposition runs
    spikes: tuple[bool, bool] = (True, True)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; expected one of {sorted(SCENARIOS)}")
        if model_dim(self.model) != SCENARIOS[self.scenario].dim:
            raise ValueError(
                f"model {self.model!r} is {model_dim(self.model)}D but scenario "
                f"{self.scenario!r} is {SCENARIOS[self.scenario].dim}D"
            )
        if self.grid.dim != SCENARIOS[self.scenario].dim:
            raise ValueError("grid dimension does not match the scenario")
        if self.t_final < 0:
            raise ValueError("t_final must be non-negative")
        if any(t < 0 or t > self.t_final for t in self.snapshot_times):
            raise ValueError("snapshot times must lie in [0, t_final]")
        if self.nv < 2 or self.nv % 2:
            raise ValueError("nv must be an even number >= 2")
        if self.engine not in ("numpy", "compiled"):
            raise ValueError(f"engine must be 'numpy' or 'compiled', got {self.engine!r}")
        if self.engine == "compiled":
            if self.model not in COMPILED_MODELS:
                raise ValueError(f"compiled engine supports {COMPILED_MODELS}, not {self.model!r}")
            if not self.chemo_implicit or (self.model == "hm1" and not self.project):
                raise ValueError("compiled engine needs implicit chemo and, for hm1, projection")


def default_config(scenario: str, model: str, dx: float | None = None, t_final: float | None = None, **overrides) -> ScenarioConfig:
    """Config with the published parameters of ``scenario`` and default snapshots."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; expected one of {sorted(SCENARIOS)}")
    sc = SCENARIOS[scenario]
    dx = sc.dx if dx is None else dx
    T = sc.t_final if t_final is None else t_final
    if sc.dim == 1:
        grid = Grid.from_spacing(sc.domain[0], sc.domain[1], dx)
    else:
        grid = Grid.from_spacing(*sc.domain[:2], dx, *sc.domain[2:], dx)
    snaps = overrides.pop("snapshot_times", None)
    if snaps is None:
        snaps = tuple(T * k / 4 for k in range(5))
    params = overrides.pop("params", sc.params)
    return ScenarioConfig(scenario, model, grid, T, params, tuple(snaps), **overrides)


# -- cell averages ----------------------------------------------------------------


def _cell_nodes(lo, h, n, order=8):
    x, w = np.polynomial.legendre.leggauss(order)
    centres = lo + (np.arange(n) + 0.5) * h
    return centres[:, None] + 0.5 * h * x[None, :], 0.5 * w


def _average_1d(fun, grid: Grid):
    X, w = _cell_nodes(grid.x_min, grid.dx, grid.nx)
    vals = fun(X)
    if isinstance(vals, tuple):
        return tuple(v @ w for v in vals)
    return vals @ w


def _average_2d(fun, grid: Grid, order=8):
    X, wx = _cell_nodes(grid.x_min, grid.dx, grid.nx, order)
    Y, wy = _cell_nodes(grid.y_min, grid.dy, grid.ny, order)
    XX = X[:, None, :, None] + 0 * Y[None, :, None, :]
    YY = Y[None, :, None, :] + 0 * X[:, None, :, None]
    W = wx[:, None] * wy[None, :]
    vals = fun(XX, YY)

    def avg(a):
        return np.einsum("...ijab,ab->...ij", a, W)

    if isinstance(vals, tuple):
        return tuple(avg(v) for v in vals)
    return avg(vals)


def initial_state(config: ScenarioConfig):
    """Cell-averaged initial state for the configured model, plus the chemoattractant."""
    sc = SCENARIOS[config.scenario]
    grid = config.grid
    if sc.dim == 1:
        m = ChemoField(_average_1d(sc.chemo, grid), grid.dx)
        if config.model == "kinetic":
            return _kinetic_initial(sc, grid, config.nv), m
        rp, rm, qp, qm = _average_1d(sc.moments, grid)
        if config.model == "m1_1d":
            return FullMomentField1D(rp + rm, qp + qm), m
        return MomentField1D(rp, rm, qp, qm), m
    moments = sc.moments
    if config.spikes != (True, True):
        if config.scenario == "two_spikes_diag":
            moments = _two_spikes_diag(config.spikes)
        elif config.scenario == "two_spikes_axial":
            moments = _two_spikes_axial(config.spikes)
        else:
            raise ValueError("spike selection only applies to two-spike 2D scenarios")
    m = ChemoField(_average_2d(sc.chemo, grid), grid.dx, grid.dy)
    rho, qx, qy = _average_2d(moments, grid)
    if config.model == "m1_2d":
        return FullMomentField2D(rho.sum(0), qx.sum(0), qy.sum(0)), m
    return MomentField2D(rho, qx, qy), m


def _kinetic_initial(sc: Scenario, grid: Grid, nv: int) -> KineticField1D:
    v = KineticField1D.velocity_grid(nv)
    if sc.kinetic is None:
        rp, rm, _, _ = _average_1d(sc.moments, grid)
        # isotropic: f(x, v) equals the half-line density on each half line
        f = np.where(v[None, :] > 0, rp[:, None], rm[:, None])
        return KineticField1D(f, v)
    X, wx = _cell_nodes(grid.x_min, grid.dx, grid.nx)
    V, wv = _cell_nodes(-1.0, 2.0 / nv, nv)
    vals = sc.kinetic(X[:, None, :, None], V[None, :, None, :])
    return KineticField1D(np.einsum("ijab,a,b->ij", vals, wx, wv), v)


# -- comparison -----------------------------------------------------------------


def error_norm(a, b, p="l1", cell_volume: float = 1.0) -> float:
    """Grid-weighted discrete ``L^p`` norm of ``a - b``; ``p`` in {1, 2, inf} or their names."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    if a.shape != b.shape:
        raise ValueError(f"grid mismatch: {a.shape} vs {b.shape}")
    key = {1: "l1", 2: "l2", np.inf: "linf", "inf": "linf"}.get(p, p)
    d = np.abs(a - b)
    if key == "l1":
        return float(d.sum() * cell_volume)
    if key == "l2":
        return float(np.sqrt((d**2).sum() * cell_volume))
    if key == "linf":
        return float(d.max(initial=0.0))
    raise ValueError(f"unknown norm {p!r}")


def run_superposition_reference(config: ScenarioConfig, model: str | None = "m1_2d", runner=None):
    """Sum of single-spike runs (M1 by default), minus one background run.

    ``model=None`` keeps ``config.model``.

    Each single-spike run carries the full density floor, so a floor-only run
    is subtracted once; for a linear scheme this reproduces the joint run
    exactly.  Returns a list of ``(time, rho)`` pairs.
    """
    if config.scenario not in ("two_spikes_diag", "two_spikes_axial"):
        raise ValueError("superposition reference needs a two-spike 2D scenario")
    if runner is None:
        from .runner import run as runner
    if model is not None:
        config = replace(config, model=model)
    runs = [runner(replace(config, spikes=s)) for s in ((True, False), (False, True), (False, False))]
    out = []
    for sa, sb, sf in zip(*(r.snapshots for r in runs)):
        out.append((sa.time, sa.arrays["rho"] + sb.arrays["rho"] - sf.arrays["rho"]))
    return out
