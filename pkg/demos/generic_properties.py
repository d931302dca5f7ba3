"""Simplicity, independence of squared eigenfunctions and non-resonance, checked at desk scale.

The square shows every failure mode (a double eigenvalue, an integer
relation); the rectangle with sides in ratio 2^{1/4} repairs simplicity and
independence but, like every rectangle, keeps low-height resonances.

Run:  python3 demos/generic_properties.py
"""
import math

from speclab import (
    canonical_rectangle,
    check_simplicity,
    exact_nonresonance,
    make_orthotope,
    nonresonance_search,
    orthotope_spectrum,
    squared_gram,
    squared_independence_det,
    squared_independence_search,
)

square = orthotope_spectrum(make_orthotope((1.0, 1.0)), 4)
rect = orthotope_spectrum(canonical_rectangle(), 8)

print("simplicity")
print("  square   :", check_simplicity(square).to_dict()["witness"])
print("  rectangle:", check_simplicity(rect).verdict, "(exact arithmetic in Q(sqrt 2))")

skew = orthotope_spectrum(make_orthotope((1.0, 2**-0.5)), 30)
print("  mu=(1, 2^-1/2) has a non-resonant side ratio yet:", check_simplicity(skew).witness)

print("squared independence")
interval = orthotope_spectrum(make_orthotope((1.0,)), 2)
print(f"  det at (pi/2, pi/4) on (0, pi): {squared_independence_det(interval, [[math.pi / 2], [math.pi / 4]]):.6f}"
      f" (4/pi^2 = {4 / math.pi**2:.6f})")
g = squared_gram(orthotope_spectrum(canonical_rectangle(), 6))
print(f"  rectangle Gram min eigenvalue {g.min_eigenvalue:.4e}, quadrature error {g.quadrature_error:.1e}")
print("  witness search:", squared_independence_search(rect, 200, seed=0).verdict)

print("non-resonance")
rep = nonresonance_search([2.0, 5.0, 5.0, 8.0], 4)
print("  square (2,5,5,8), H=4:", [r.q for r in rep.relations][:6], "...")
rep = exact_nonresonance(orthotope_spectrum(canonical_rectangle(), 4), 20)
print("  rectangle first four, exact, H=20:", rep.verdict, "witness", rep.witness["q"])
print("    every rectangle has l11 + l22 = l21 + l12, so the first four are never non-resonant")
rep = exact_nonresonance(orthotope_spectrum(canonical_rectangle(), 3), 4)
print("  rectangle first three, H=4:", rep.verdict)
