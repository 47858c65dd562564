"""Local inf-sup constant of the Helmholtz form on the wave space.

For a convex cell the constant beta(h_K k) is expected to stay above the
reference curve 1 - 2 (h_K k)^2 / pi^2.  The computation whitens the form
Gram by the (1,k)-norm Gram; both matrices degenerate violently as
h_K k -> 0, so it runs in extended precision internally.

Run:  python demos/stability_diagnostic.py
"""

import numpy as np

from pwvem import WaveContext, equispaced_directions, infsup_reference, local_infsup_beta
from pwvem.experiments import random_convex_cell

K = 20.0
P = 13

ctx = WaveContext(K, equispaced_directions(P))
rng = np.random.default_rng(42)

print(f"p = {P}; random convex cells, h_K k from 0.1 to 1.5")
print(f"{'h_K k':>7s} {'beta':>9s} {'reference':>10s} {'above?':>7s}")
above = total = 0
for hk in np.linspace(0.1, 1.5, 15):
    cell = random_convex_cell(rng, int(rng.integers(4, 9)), hk / K)
    beta = local_infsup_beta(cell, ctx)
    ref = infsup_reference(hk)
    ok = beta >= ref
    above += ok
    total += 1
    print(f"{hk:7.2f} {beta:9.5f} {ref:10.5f} {str(ok):>7s}")
print(f"\nbeta >= reference on {above}/{total} cells.")
