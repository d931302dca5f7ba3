"""Finite evidence for the coupling and non-resonance conditions of a bilinear Schrodinger control.

Run:  python3 demos/schrodinger_precheck.py
"""
from speclab import Polygon, canonical_rectangle, fem_spectrum, make_orthotope, mesh_domain, orthotope_spectrum
from speclab.schrodinger_check import PolynomialPotential, controllability_precheck, residual_W_search

interval = orthotope_spectrum(make_orthotope((1.0,)), 4)
print("interval, W=x     :", controllability_precheck(interval, PolynomialPotential.coordinate(0, 1), 4, 10).label)
print("interval, W=1     :", controllability_precheck(interval, 1.0, 4, 10).label)

rect = orthotope_spectrum(canonical_rectangle(), 6)
rep = controllability_precheck(rect, PolynomialPotential.coordinate(0, 2), 4, 10)
print("rectangle, W=x1   :", rep.label, "couplings", [f"{c:+.4f}" for c in rep.couplings])

quad = Polygon(((0.0, 0.0), (3.1, 0.2), (2.7, 2.4), (0.4, 1.9)))
fem = fem_spectrum(mesh_domain(quad, 0.12), 5)
res = residual_W_search(fem, 4, 3, seed=1)
print(f"quadrilateral      : random quadratic W passed after {res.attempts} attempt(s):", res.report.label)
print("note:", res.report.note)
