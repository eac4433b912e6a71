"""Half- and quarter-moment models for kinetic chemotaxis, with kinetic and
full-moment M1 reference solvers."""
from .chemo import ChemoField, ChemoSolverError, gradient_m, step_chemo_1d, step_chemo_2d
from .closures import (
    ClosureTable,
    HalfMoments,
    QuarterMoments,
    RealizabilityError,
    build_half_table,
    build_m1_table,
    build_quarter_table,
    build_table,
    entropy_half_closure,
    entropy_quarter_closure,
    linear_half_closure,
    linear_quarter_closure,
    load_table,
    m1_full_closure_1d,
    m1_full_closure_2d,
    save_table,
)
from .io import ConfigError, compare_runs, parse_config, read_run, read_snapshot, write_config, write_snapshots
from .params import Grid, ModelParams
from .realizability import (
    RealizabilityReport,
    check_full_1d,
    check_full_2d,
    check_half,
    check_quarter,
    project_full_1d,
    project_full_2d,
    project_half,
    project_quarter,
)
from .runner import NumericalFailure, RunResult, Snapshot, run
from .scenarios import SCENARIOS, ScenarioConfig, default_config, error_norm, initial_state, run_superposition_reference
from .transport import (
    FullMomentField1D,
    FullMomentField2D,
    KineticField1D,
    MomentField1D,
    MomentField2D,
    compute_dt,
    step_half_moment_1d,
    step_kinetic_1d,
    step_m1_1d,
    step_m1_2d,
    step_quarter_2d,
)
from .velocity import VelocityDomain1D, VelocityDomain2D, basis_moments_1d, basis_moments_2d, limiter_phi, quadrature

__version__ = "0.1.0"
