"""p-refinement at fixed mesh: exponential decay, then roundoff instability.

Adding directions refines the local wave space; for a smooth reference
field the error decays exponentially in p until the near-dependence of the
wave basis lets roundoff take over (watch the solver residual grow).

Run:  python demos/p_refinement.py
"""

from pwvem import (
    WaveContext,
    assemble,
    assemble_rhs,
    equispaced_directions,
    hankel_solution,
    impedance_datum,
    l2_relative_error,
    make_structured_triangular,
    make_voronoi,
    solve,
)

K = 20.0

for label, mesh in (("32 triangles", make_structured_triangular(4)),
                    ("16 Voronoi cells", make_voronoi(16, seed=1, lloyd_iters=10))):
    print(f"\n{label}, k = {K}, h = {mesh.h:.4f}")
    print(f"{'p':>4s} {'ndof':>6s} {'L2 rel err':>12s} {'factor':>8s} {'residual':>10s}")
    prev = None
    for p in (3, 5, 7, 9, 11, 13, 15, 17):
        ctx = WaveContext(K, equispaced_directions(p))
        exact = hankel_solution(K)
        system = assemble(mesh, ctx)
        sol = solve(system, assemble_rhs(system, impedance_datum(exact, K)))
        rep = l2_relative_error(sol, exact)
        factor = "       -" if prev is None else f"{prev / rep.l2_rel_error:8.2f}"
        print(f"{p:4d} {rep.ndof:6d} {rep.l2_rel_error:12.4e} {factor} "
              f"{sol.residual:10.1e}")
        prev = rep.l2_rel_error
