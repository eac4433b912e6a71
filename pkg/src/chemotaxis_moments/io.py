"""YAML run configs, CSV snapshots and run comparison."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np
import yaml

from .params import Grid, ModelParams
from .scenarios import SCENARIOS, ScenarioConfig, default_config, error_norm, model_dim

MANIFEST = "manifest.json"

_TOP_KEYS = {"scenario", "model", "dx", "grid", "t_final", "params", "snapshot_times", "tables", "solver", "spikes"}
_GRID_KEYS = {"x_min", "x_max", "nx", "y_min", "y_max", "ny"}
_PARAM_KEYS = {"lam", "alpha", "beta", "delta", "D_m", "s"}
_SOLVER_KEYS = {"chemo_rtol", "chemo_max_iter", "chemo_implicit", "project", "nv", "engine"}
_TABLE_KINDS = {"half", "quarter", "m1_1d", "m1_2d"}


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""


def _number(path, v, integer=False):
    # PyYAML reads "1e-10" (no dot) as a string
    if isinstance(v, str):
        try:
            v = float(v)
        except ValueError:
            raise ConfigError(f"{path}: expected a number, got {v!r}") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{path}: expected a finite number, got {v!r}")
    if integer:
        if v != int(v):
            raise ConfigError(f"{path}: expected an integer, got {v!r}")
        return int(v)
    return float(v)


def _mapping(path, v, allowed):
    if not isinstance(v, dict):
        raise ConfigError(f"{path}: expected a mapping")
    unknown = sorted(set(v) - allowed)
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}: unknown key (allowed: {', '.join(sorted(allowed))})")
    return v


def _bool(path, v):
    if not isinstance(v, bool):
        raise ConfigError(f"{path}: expected true or false, got {v!r}")
    return v


def config_from_dict(data: dict, overrides: dict | None = None) -> ScenarioConfig:
    """Validate a config mapping, filling missing values from the scenario defaults.

    ``overrides`` (model, dx, t_final) take precedence over the mapping.
    """
    data = dict(_mapping("config", data or {}, _TOP_KEYS))
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    for key in ("scenario", "model"):
        if key not in data:
            raise ConfigError(f"{key}: required key missing")
        if not isinstance(data[key], str):
            raise ConfigError(f"{key}: expected a string")
    scenario, model = data["scenario"], data["model"]
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario: unknown scenario {scenario!r} (known: {', '.join(SCENARIOS)})")
    try:
        dim = model_dim(model)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from None
    sc = SCENARIOS[scenario]
    if dim != sc.dim:
        raise ConfigError(f"model: {model!r} is {dim}D but scenario {scenario!r} is {sc.dim}D")
    if "dx" in data and "grid" in data:
        raise ConfigError("dx: give either dx or grid, not both")

    kw = {}
    if "params" in data:
        p = _mapping("params", data["params"], _PARAM_KEYS)
        merged = asdict(sc.params)
        merged.update({k: _number(f"params.{k}", v) for k, v in p.items()})
        try:
            kw["params"] = ModelParams(**merged)
        except ValueError as exc:
            raise ConfigError(f"params: {exc}") from None
    if "snapshot_times" in data:
        st = data["snapshot_times"]
        if not isinstance(st, list):
            raise ConfigError("snapshot_times: expected a list")
        kw["snapshot_times"] = tuple(_number(f"snapshot_times[{i}]", t) for i, t in enumerate(st))
    if "tables" in data:
        tabs = _mapping("tables", data["tables"], _TABLE_KINDS)
        kw["tables"] = {k: str(v) for k, v in tabs.items()}
    if "solver" in data:
        sv = _mapping("solver", data["solver"], _SOLVER_KEYS)
        for k, v in sv.items():
            if k in ("chemo_implicit", "project"):
                kw[k] = _bool(f"solver.{k}", v)
            elif k in ("chemo_max_iter", "nv"):
                kw[k] = _number(f"solver.{k}", v, integer=True)
            elif k == "engine":
                kw[k] = str(v)
            else:
                kw[k] = _number(f"solver.{k}", v)
    if "spikes" in data:
        sp = data["spikes"]
        if not (isinstance(sp, list) and len(sp) == 2):
            raise ConfigError("spikes: expected a list of two booleans")
        kw["spikes"] = tuple(_bool(f"spikes[{i}]", b) for i, b in enumerate(sp))

    dx = _number("dx", data["dx"]) if "dx" in data else None
    t_final = _number("t_final", data["t_final"]) if "t_final" in data else None
    if dx is not None and dx <= 0:
        raise ConfigError("dx: must be positive")
    try:
        cfg = default_config(scenario, model, dx=dx, t_final=t_final, **kw)
        if "grid" in data:
            g = _mapping("grid", data["grid"], _GRID_KEYS)
            gk = {k: _number(f"grid.{k}", v, integer=k in ("nx", "ny")) for k, v in g.items()}
            base = asdict(cfg.grid)
            base.update(gk)
            cfg = replace(cfg, grid=Grid(**base))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"config: {exc}") from None
    return cfg


def parse_config(path, overrides: dict | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from None
    return config_from_dict(data, overrides)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Fully explicit mapping; ``config_from_dict`` of it reproduces ``cfg``."""
    grid = {k: v for k, v in asdict(cfg.grid).items() if v is not None}
    return {
        "scenario": cfg.scenario,
        "model": cfg.model,
        "grid": {k: (int(v) if k in ("nx", "ny") else float(v)) for k, v in grid.items()},
        "t_final": float(cfg.t_final),
        "params": {k: float(v) for k, v in asdict(cfg.params).items()},
        "snapshot_times": [float(t) for t in cfg.snapshot_times],
        "tables": dict(cfg.tables),
        "solver": {
            "chemo_rtol": float(cfg.chemo_rtol),
            "chemo_max_iter": int(cfg.chemo_max_iter),
            "chemo_implicit": bool(cfg.chemo_implicit),
            "project": bool(cfg.project),
            "nv": int(cfg.nv),
            "engine": cfg.engine,
        },
        "spikes": [bool(b) for b in cfg.spikes],
    }


def write_config(cfg: ScenarioConfig, path) -> Path:
    path = Path(path)
    path.write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))
    return path


# -- snapshots -------------------------------------------------------------------


def snapshot_columns(grid: Grid, arrays: dict):
    """Column names and matching 1D arrays: coordinates, partial moments, ``rho``, ``m``."""
    if grid.dim == 1:
        names, cols = ["x"], [grid.x]
    else:
        X, Y = grid.mesh()
        names, cols = ["x", "y"], [X.ravel(), Y.ravel()]
    for k, v in arrays.items():
        if k not in ("rho", "m"):
            names.append(k)
            cols.append(np.ravel(v))
    names += ["rho", "m"]
    cols += [np.ravel(arrays["rho"]), np.ravel(arrays["m"])]
    return names, cols


def write_snapshots(result, out_dir) -> Path:
    """One CSV per snapshot plus ``manifest.json``; returns the manifest path."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"{out}: cannot create output directory ({exc.strerror})") from exc
    grid = result.config.grid
    entries = []
    for i, snap in enumerate(result.snapshots):
        names, cols = snapshot_columns(grid, snap.arrays)
        fname = f"snapshot_{i:03d}.csv"
        try:
            np.savetxt(out / fname, np.column_stack(cols), delimiter=",", fmt="%.17g",
                       header=",".join(names), comments="")
        except OSError as exc:
            raise OSError(f"{out / fname}: write failed ({exc.strerror})") from exc
        entries.append({"file": fname, "time": snap.time, "step": snap.step})
    manifest = {
        "config": config_to_dict(result.config),
        "dt": result.dt,
        "steps": result.stats.steps,
        "projection_count": result.stats.projected_cells,
        "projection_mass_added": result.stats.mass_added,
        "mass_initial": result.mass_initial,
        "mass_final": result.mass_final,
        "max_violation": result.max_violation,
        "min_rho": result.min_rho,
        "chemo_max_residual": result.chemo_max_residual,
        "wall_time": result.wall_time,
        "snapshots": entries,
    }
    path = out / MANIFEST
    path.write_text(json.dumps(manifest, indent=2))
    return path


def read_snapshot(path) -> dict:
    """Arrays of one snapshot CSV keyed by column name."""
    path = Path(path)
    with path.open() as fh:
        names = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {n: data[:, i].copy() for i, n in enumerate(names)}


def read_run(run_dir):
    run_dir = Path(run_dir)
    try:
        manifest = json.loads((run_dir / MANIFEST).read_text())
    except OSError as exc:
        raise ConfigError(f"{run_dir}: no readable {MANIFEST} ({exc.strerror})") from None
    snaps = [(e["time"], read_snapshot(run_dir / e["file"])) for e in manifest["snapshots"]]
    return manifest, snaps


def compare_runs(dir_a, dir_b, norm: str = "l1"):
    """Per-snapshot error of total density between two run directories.

    Returns rows ``(time, error, relative_error)``; relative to the norm of ``a``.
    """
    if norm not in ("l1", "l2", "linf"):
        raise ValueError(f"norm must be l1, l2 or linf, got {norm!r}")
    ma, sa = read_run(dir_a)
    mb, sb = read_run(dir_b)
    if ma["config"]["grid"] != mb["config"]["grid"]:
        raise ValueError("runs are on different grids")
    ta, tb = [t for t, _ in sa], [t for t, _ in sb]
    if len(ta) != len(tb) or not np.allclose(ta, tb, rtol=0, atol=1e-9):
        raise ValueError(f"snapshot times differ: {ta} vs {tb}")
    g = ma["config"]["grid"]
    vol = (g["x_max"] - g["x_min"]) / g["nx"]
    if "ny" in g:
        vol *= (g["y_max"] - g["y_min"]) / g["ny"]
    rows = []
    for (t, a), (_, b) in zip(sa, sb):
        err = error_norm(a["rho"], b["rho"], norm, vol)
        ref = error_norm(a["rho"], np.zeros_like(a["rho"]), norm, vol)
        rows.append((t, err, err / ref if ref > 0 else math.inf))
    return rows
