"""p-refinement for reference fields of limited Sobolev regularity.

The Bessel field J_xi(k r) cos(xi theta), centered on the boundary point
(0, 0.5), is analytic for integer xi but only finitely regular otherwise
(H^2 for xi = 3/2, below H^2 for xi = 2/3).  Exponential p-convergence
survives only in the analytic case; the rough cases converge algebraically,
the rougher the slower.

Run:  python demos/low_regularity_fields.py
"""

from pwvem import (
    WaveContext,
    assemble,
    assemble_rhs,
    bessel_singular_solution,
    equispaced_directions,
    impedance_datum,
    l2_relative_error,
    make_structured_triangular,
    solve,
)

K = 10.0
mesh = make_structured_triangular(4)
P_VALUES = (3, 5, 7, 9, 11, 13)

print(f"k = {K}, 32-triangle mesh, field J_xi(kr) cos(xi theta) at (0, 0.5)")
header = f"{'p':>4s}" + "".join(f"{'xi=' + s:>13s}" for s in ("1", "3/2", "2/3"))
print(header)
errors = {}
for xi in (1.0, 1.5, 2.0 / 3.0):
    exact = bessel_singular_solution(K, xi)
    datum = impedance_datum(exact, K)
    col = []
    for p in P_VALUES:
        ctx = WaveContext(K, equispaced_directions(p))
        system = assemble(mesh, ctx)
        sol = solve(system, assemble_rhs(system, datum))
        col.append(l2_relative_error(sol, exact).l2_rel_error)
    errors[xi] = col
for i, p in enumerate(P_VALUES):
    print(f"{p:4d}" + "".join(f"{errors[xi][i]:13.3e}" for xi in (1.0, 1.5, 2.0 / 3.0)))
