"""Crossing beams in 2D: quarter moments against full-moment M1.

The kinetic equation is linear when chemotaxis is frozen, so two single-beam
M1 runs added together serve as a reference for the crossing.  On the
diagonal placement the beams live in distinct quadrants and QM1 follows the
reference more closely than a joint M1 run; on the axial placement both beams
share a quadrant and the advantage is gone.

Uses a coarse grid (dx = 0.2) to keep the run short.
"""
from chemotaxis_moments import default_config, error_norm, run, run_superposition_reference

for name in ("two_spikes_diag", "two_spikes_axial"):
    cfg = default_config(name, "qm1", dx=0.2, snapshot_times=(0.0, 1.0, 1.5, 2.0, 3.0))
    ref = run_superposition_reference(cfg)
    qm1 = run(cfg)
    m1 = run(default_config(name, "m1_2d", dx=0.2, snapshot_times=cfg.snapshot_times))
    vol = cfg.grid.cell_volume
    print(name)
    print(f"  {'t':>4} {'L1(QM1, ref)':>14} {'L1(M1, ref)':>14}")
    for (t, rho_ref), sq, sm in zip(ref, qm1.snapshots, m1.snapshots):
        eq = error_norm(sq.arrays["rho"], rho_ref, "l1", vol)
        em = error_norm(sm.arrays["rho"], rho_ref, "l1", vol)
        print(f"  {t:4.2f} {eq:14.4f} {em:14.4f}")
