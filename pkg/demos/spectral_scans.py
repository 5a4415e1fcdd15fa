"""Bowen parameter, Euler product and zeros of the determinant."""
from schottky_weyl.fixtures import four_disk_factor, four_disk_product
from schottky_weyl.spectral import (
    ComplexWindow,
    ScanGrid,
    bowen_dimension,
    euler_zeta,
    product_det_scan,
    zero_scan,
)
from schottky_weyl.transfer import assemble_factor_operator, chebyshev_basis, fredholm_det

f = four_disk_factor()
r = bowen_dimension(f)
print("delta", r.delta, "cover oracle", r.delta_cover)
print("half radii:", bowen_dimension(four_disk_factor(0.5)).delta)

for s in (0.8, 1.0, 1.5):
    det = fredholm_det(assemble_factor_operator(f, s, chebyshev_basis(f, 24))).value.real
    z = euler_zeta(f, s)
    print(s, det, z.value.real, z.classes)

basis = chebyshev_basis(f, 24)
for z in zero_scan(f, ScanGrid(0, 1, 21), basis):
    print("real zero", z.location.real)
for z in zero_scan(f, ComplexWindow(0, 0.35, 2, 2.5, 16), basis):
    print("complex zero", z.location, "residual", z.residual)

G = four_disk_product(2)
grid = ScanGrid(0.305, 0.315, 11)
table = product_det_scan(G, [grid, grid], [chebyshev_basis(g, 8) for g in G.factors], diagonal=True)
for row in table.rows:
    print(row.s[0], row.det.real)
