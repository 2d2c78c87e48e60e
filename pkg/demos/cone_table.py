"""Stability of the minimal cones over products of spheres.

Prints the first eigenvalue of the link operator next to the threshold
``-(n-2)^2/4`` for every ``1 <= p <= q`` with ``p + q <= 12``, then checks the
Clifford torus link numerically on a mesh.
"""
from stretchlab.cones import (MeshedLink, MinimalCone, classify_stability, meshed_link_spectrum,
                              product_link_spectrum)
from stretchlab.meshes import clifford_torus

for s in range(2, 13):
    for p in range(1, s // 2 + 1):
        v = classify_stability(MinimalCone.product(p, s - p), product_link_spectrum(p, s - p, 4))
        print(f"S^{p} x S^{s - p}: mu1 = {v.mu1:6.1f}, threshold = {v.threshold:7.2f}, "
              f"{v.classification}")

for n in (8, 16, 32):
    mu = meshed_link_spectrum(MeshedLink(clifford_torus(n), 2.0), 5).eigenvalues
    print(f"Clifford torus mesh {n}x{n}: lowest eigenvalues {mu.round(4).tolist()}")
