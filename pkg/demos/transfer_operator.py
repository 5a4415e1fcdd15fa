"""Collocation matrices, traces over periodic orbits and the Kronecker structure."""
import numpy as np

from schottky_weyl.fixtures import four_disk_factor, four_disk_product
from schottky_weyl.transfer import (
    assemble_factor_operator,
    assemble_product_operator,
    chebyshev_basis,
    fredholm_det,
    periodic_trace,
)

f = four_disk_factor()
s = 1.0
M = assemble_factor_operator(f, s, chebyshev_basis(f, 24)).matrix
P = np.eye(len(M))
for n in range(1, 6):
    P = P @ M
    print(n, np.trace(P).real, periodic_trace(f, s, n).real)

for N in (8, 16, 24, 32):
    print("N =", N, "det(I - M) =", fredholm_det(assemble_factor_operator(f, s, chebyshev_basis(f, N))).value.real)

G = four_disk_product(2)
bases = [chebyshev_basis(g, 6) for g in G.factors]
big = assemble_product_operator(G, (0.6, 1.1), bases).matrix
kron = np.kron(*[assemble_factor_operator(g, t, b).matrix for g, t, b in zip(G.factors, (0.6, 1.1), bases)])
print("product vs Kronecker:", np.abs(big - kron).max())
