"""Move meshes along the flow of a smooth field that is tangent to the unit circle.

The flow maps the unit disk onto itself, so the disk's spectrum is
unchanged (up to the polygonal boundary, whose vertices slide along the
circle), while a domain strictly inside the disk is squashed toward the
fixed point (0, -1) and its eigenvalues grow.

Run:  python3 demos/deformation_flow.py
"""
from speclab import Disk, Polygon, fem_spectrum, flow_deform, mesh_domain, squashing_field

field = squashing_field()
disk = mesh_domain(Disk(1.0), 0.1)
inner = mesh_domain(Polygon(((-0.4, -0.4), (0.4, -0.4), (0.4, 0.4), (-0.4, 0.4))), 0.04)

print(" t     disk area  disk lambda_1   inner area  inner lambda_1")
for t in (0.0, 0.25, 0.5, 1.0):
    d = disk if t == 0 else flow_deform(disk, field, t)
    q = inner if t == 0 else flow_deform(inner, field, t)
    print(f"{t:4.2f}  {d.area:9.5f}  {fem_spectrum(d, 1).lambdas[0]:12.5f}"
          f"  {q.area:10.5f}  {fem_spectrum(q, 1).lambdas[0]:13.5f}")
