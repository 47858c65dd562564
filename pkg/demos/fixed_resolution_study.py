"""Pollution: refining h while keeping h*k = 3 does not drive the error down.

Each Voronoi mesh gets the wave number k = 3 / h, i.e. a fixed number of
points per wavelength.  Convergence would require the stronger smallness of
h k^2; with h k fixed the error stagnates (and eventually grows), the
classic pollution effect of the h-version.

Run:  python demos/fixed_resolution_study.py
"""

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

P = 9
HK = 3.0

print(f"p = {P}, h*k = {HK} on Voronoi meshes (k derived from each mesh)")
print(f"{'cells':>6s} {'h':>9s} {'k':>8s} {'h*k^2':>9s} {'L2 rel err':>12s}")
for n in range(3, 10):
    mesh = make_voronoi(2**n, seed=1, lloyd_iters=10)
    k = HK / mesh.h
    ctx = WaveContext(k, equispaced_directions(P))
    exact = hankel_solution(k)
    system = assemble(mesh, ctx)
    sol = solve(system, assemble_rhs(system, impedance_datum(exact, k)))
    rep = l2_relative_error(sol, exact)
    print(f"{2**n:6d} {rep.h:9.4f} {k:8.2f} {rep.h * k**2:9.1f} "
          f"{rep.l2_rel_error:12.4e}")
print("\nNo monotone decrease toward zero: bounded h*k is not enough.")
