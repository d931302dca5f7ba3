"""Where to put a damping material of fixed mass so the first N modes all see it.

Run:  python3 demos/damping_placement.py
"""
import math

import numpy as np

from speclab import canonical_rectangle, make_orthotope, orthotope_spectrum
from speclab.damping_opt import (
    DampingDensity,
    bang_bang_report,
    budget_sweep,
    modal_decay_rate,
    optimize_relaxed,
)

interval = orthotope_spectrum(make_orthotope((1.0,)), 16)
sol = optimize_relaxed(interval, math.pi / 2, 1)
cells = np.flatnonzero(sol.density.a > 0.5)
c = interval.quadrature.cell_centroids[:, 0]
print(f"1D, one mode, half the length: J = {sol.J_value:.8f} (1/2 + 1/pi = {0.5 + 1 / math.pi:.8f})")
print(f"  damped region [{c[cells[0]]:.3f}, {c[cells[-1]]:.3f}] (cell centroids), certificate gap {sol.duality_gap:.1e}")

rect = orthotope_spectrum(canonical_rectangle(), 6)
area = rect.quadrature.cell_areas.sum()
for N in (1, 2, 3, 6):
    s = optimize_relaxed(rect, 0.5 * area, N)
    bb = bang_bang_report(s)
    print(f"rectangle N={N}: J={s.J_value:.6f} active modes {s.active_modes}"
          f" multipliers {np.round(s.multipliers, 4)} fractional cells {bb.cells}")

print("budget sweep (N=3):")
for ell, J in budget_sweep(rect, area * np.linspace(0.1, 0.9, 5), 3):
    print(f"  ell={ell:7.4f}  J={J:.6f}")

mid = DampingDensity.indicator(interval, lambda p: (p[:, 0] > math.pi / 4) & (p[:, 0] < 3 * math.pi / 4))
for M in (4, 8, 16):
    print(f"decay rate, middle half damped, k=0.3, M={M}: {modal_decay_rate(interval, mid, 0.3, M):.6f}")
