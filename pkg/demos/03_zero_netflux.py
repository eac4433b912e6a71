"""Two beams meeting head on.

With one flux per cell, M1 sees q ~ 0 where the beams overlap and treats the
mixture as an isotropic lump that stalls in the middle.  Half moments keep a
flux per direction, so both beams pass through each other.
"""
import numpy as np

from chemotaxis_moments import default_config, run


def front(x, rho):
    """Half-maximum leading edge of the right-moving pulse."""
    xr, rr = x[x >= 0], rho[x >= 0]
    k = np.argmax(rr)
    j = k + np.flatnonzero(rr[k:] < 0.5 * rr[k])[0]
    return xr[j]


times = (0.5, 1.0, 1.5, 2.0, 3.0)
runs = {
    m: run(default_config("two_spikes_1d", m, snapshot_times=times, engine="numpy" if m == "m1_1d" else "compiled"))
    for m in ("hm1", "m1_1d", "kinetic")
}
x = runs["hm1"].config.grid.x
dx = runs["hm1"].config.grid.dx

# %% Mass left near the centre, and where the right-moving front has got to.
print(f"{'t':>4} " + " ".join(f"{m:>16}" for m in runs) + "   (centre mass / front)")
for i, t in enumerate(times):
    cells = []
    for r in runs.values():
        rho = r.snapshots[i].arrays["rho"]
        cells.append(f"{rho[np.abs(x) < 0.25].sum() * dx:7.2f} / {front(x, rho):6.2f}")
    print(f"{t:4.1f} " + " ".join(f"{c:>16}" for c in cells))
