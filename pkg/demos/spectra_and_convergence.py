"""Closed-form orthotope spectra, the P1 finite element solver, and how fast the two agree.

Run:  python3 demos/spectra_and_convergence.py
"""
import numpy as np

from speclab import (
    Disk,
    canonical_rectangle,
    convergence_study,
    disk_ground_state,
    fem_spectrum,
    mesh_domain,
    orthotope_spectrum,
)

rect = canonical_rectangle()  # mu = (1, 2^{-1/4}): lambda_K = k1^2 + sqrt(2) k2^2
exact = orthotope_spectrum(rect, 6)
print("closed form on the canonical rectangle")
for m in exact.modes:
    print(f"  K={m.K}  lambda={m.lam:.10f}  exact={m.lam_exact}")

for h in (0.1, 0.05, 0.02):
    fem = fem_spectrum(mesh_domain(rect, h), 6)
    rel = np.abs(fem.lambdas - exact.lambdas) / exact.lambdas
    print(f"FEM h={h:<5} max relative error {rel.max():.2e}")

table = convergence_study(rect, [0.2, 0.1, 0.05], 4)
print("observed eigenvalue orders:", np.round(table.orders, 3))

# the disk has no orthotope closed form, but its ground state is a Bessel function
lam, _ = disk_ground_state(1.0)
disk = fem_spectrum(mesh_domain(Disk(1.0), 0.05), 1)
print(f"disk: j_01^2 = {lam:.8f}, FEM {disk.lambdas[0]:.8f}")
print(convergence_study(Disk(1.0), [0.2, 0.1, 0.05], 1).to_csv())
