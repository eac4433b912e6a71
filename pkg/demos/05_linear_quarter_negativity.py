"""The linear quarter closure without projection.

The linear ansatz on a quadrant is not positive, and on crossing beams the
density itself dips below zero.  The per-step projection keeps it realizable.
"""
import warnings

from chemotaxis_moments import default_config, run

warnings.simplefilter("ignore", UserWarning)
for project in (False, True):
    r = run(default_config("two_spikes_diag", "qp1", dx=0.2, project=project))
    mins = [f"{s.arrays['rho'].min():.3g}" for s in r.snapshots]
    print(f"projection={project!s:5}  min rho per snapshot: {mins}  projected cells: {r.stats.projected_cells}")
