"""First-order eigenvalue derivatives under boundary motion and under a potential.

Run:  python3 demos/shape_and_potential_derivatives.py
"""
import math

from speclab import make_orthotope, mesh_domain, orthotope_spectrum, stretch_field
from speclab.perturbation import (
    fd_potential_check,
    fd_shape_check,
    hadamard_derivative,
    orthotope_face,
    potential_derivative,
)

square = make_orthotope((1.0, 1.0))
sys_ = orthotope_spectrum(square, 6)
top = orthotope_face(square)  # the face y = pi moving outward at unit speed

print("Hadamard formula on the square, top face, unit outward speed")
for K in [(1, 1), (1, 2), (2, 1), (2, 2)]:
    print(f"  K={K}: {hadamard_derivative(sys_, top, K):+.6f}   closed form {-2 * K[1]**2 / math.pi:+.6f}")

mesh = mesh_domain(square, 0.03)
field = stretch_field(1, 1 / math.pi)
for l in (1, (1, 2)):
    chk = fd_shape_check(mesh, field, l, 1e-3, hadamard_sys=sys_, pert=top)
    print(f"  mode {l}: formula {chk.formula:+.6f}, FEM central difference {chk.fd_slope:+.6f},"
          f" relative error {chk.relative_error:.1e}")

print("potential direction W(x) = x on (0, pi)")
interval = make_orthotope((1.0,))
isys = orthotope_spectrum(interval, 4)
for k in (1, 2, 3):
    chk = fd_potential_check(interval, lambda p: p[:, 0], k, 1e-4)
    print(f"  k={k}: int x phi_k^2 = {potential_derivative(isys, lambda p: p[:, 0], k):.8f},"
          f" finite difference {chk.fd_slope:.8f}")
