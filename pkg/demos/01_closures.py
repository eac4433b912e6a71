"""Closures on one half line: where the linear ansatz breaks and the entropy one does not.

Run with ``python demos/01_closures.py``.
"""
import numpy as np

from chemotaxis_moments import build_table
from chemotaxis_moments.closures import entropy_half_second_moment, linear_half_second_moment

# %% The state on [0, 1] is fixed by (rho, q); the closure supplies r.
# Realizable second moments satisfy q^2 <= rho r <= rho q.
table = build_table("half")
rho = 1.0
print(f"{'u = q/rho':>10} {'linear r':>10} {'entropy r':>10} {'lower q^2':>10} {'upper q':>10}")
for u in (0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99):
    q = rho * u
    r_lin = float(linear_half_second_moment(rho, q, +1))
    r_ent = float(entropy_half_second_moment(np.array([rho]), np.array([q]), +1, table)[0])
    print(f"{u:10.2f} {r_lin:10.4f} {r_ent:10.4f} {q * q:10.4f} {q:10.4f}")

# %% The linear ansatz a + b v goes negative for u far from 1/2, and its r
# leaves the realizable band at both ends.  At u = 0 it gives rho r - q^2 = -1/6.
print("\nlinear closure at (1, 0): rho r - q^2 =", float(linear_half_second_moment(1.0, 0.0, +1)))

# %% The entropy closure inverts u -> b through the table; the ansatz exp(a + b v)
# is positive for every b, so r stays inside the band.
b, w = table.invert(np.array([0.05, 0.5, 0.95]))
print("multipliers b for u = 0.05, 0.5, 0.95:", np.round(b, 3))
