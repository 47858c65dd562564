"""h-refinement on the Voronoi family at several wave numbers.

Solutions are evaluated through their plane-wave projection (the basis is
virtual on polygons).  Expect an asymptotic rate around m + 1/2 with
p = 2m+1 directions, after a pre-asymptotic range that widens with k.

Run:  python demos/voronoi_h_study.py           (k=20 only, ~1 min)
      python demos/voronoi_h_study.py --all-k   (k=20,40,60, several min)
"""

import math
import sys

from pwvem import (
    WaveContext,
    assemble,
    assemble_rhs,
    equispaced_directions,
    hankel_solution,
    impedance_datum,
    l2_relative_error,
    make_voronoi,
    solve,
)

P = 13
K_VALUES = (20.0, 40.0, 60.0) if "--all-k" in sys.argv[1:] else (20.0,)

meshes = [(2**n, make_voronoi(2**n, seed=1, lloyd_iters=10)) for n in range(3, 10)]

for k in K_VALUES:
    ctx = WaveContext(k, equispaced_directions(P))
    exact = hankel_solution(k)
    datum = impedance_datum(exact, k)
    print(f"\nk = {k}, p = {P} (projection-evaluated errors)")
    print(f"{'cells':>6s} {'h':>10s} {'ndof':>7s} {'L2 rel err':>12s} {'rate':>7s}")
    prev = None
    for cells, mesh in meshes:
        system = assemble(mesh, ctx)
        sol = solve(system, assemble_rhs(system, datum))
        rep = l2_relative_error(sol, exact)
        rate = ("      -" if prev is None else
                f"{math.log(prev.l2_rel_error / rep.l2_rel_error) / math.log(prev.h / rep.h):7.2f}")
        print(f"{cells:6d} {rep.h:10.4f} {rep.ndof:7d} {rep.l2_rel_error:12.4e} {rate}")
        prev = rep
