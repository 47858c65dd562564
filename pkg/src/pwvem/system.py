"""Global degrees of freedom, assembly, boundary load, and direct solve.

Global DOFs pair a mesh vertex with a direction: dof(v, l) = v * p + l, so
the conforming space is realized simply by letting neighbouring cells share
vertex DOF blocks.  Assembly accumulates the elemental matrices in ascending
cell order into one sparse complex matrix (fixed summation order, so runs
are bit-reproducible); the load vector integrates the impedance boundary
datum edge by edge with oscillation-aware Gauss rules.  The solve is a
direct sparse LU factorization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .element import LocalOperators, build_local_operators
from .mesh import PolygonalMesh
from .pwcore import WaveContext
from .quadrature import gauss_segment, segment_point_count

RESIDUAL_LIMIT = 1e-6


class SolveError(Exception):
    """Factorization failure or unacceptable residual; reports h, k, p."""


@dataclass(frozen=True)
class DofMap:
    """Bijection between (vertex, direction) pairs and global indices."""

    n_vertices: int
    p: int

    @property
    def n_dofs(self) -> int:
        return self.n_vertices * self.p

    def global_dof(self, vertex: int, direction: int) -> int:
        return vertex * self.p + direction

    def split(self, dof: int) -> tuple[int, int]:
        return divmod(dof, self.p)

    def cell_dofs(self, cell) -> np.ndarray:
        """Global DOFs of a cell in local flat order (j, l)."""
        verts = np.asarray(cell, dtype=int)
        return (verts[:, None] * self.p + np.arange(self.p)[None, :]).ravel()


@dataclass
class GlobalSystem:
    """Assembled matrix plus everything needed to evaluate solutions."""

    mesh: PolygonalMesh
    context: WaveContext
    variant: str
    dofmap: DofMap
    matrix: sp.csc_matrix
    elements: list[LocalOperators] = field(repr=False)

    @property
    def n_dofs(self) -> int:
        return self.dofmap.n_dofs


@dataclass
class DiscreteSolution:
    """Solution coefficients with cached per-element wave projections.

    Inside a cell the solution is evaluated through its projection onto the
    centroid waves, sum_l c_l e^{ik d_l . (x - x_K)} with c = G^{-1} B a_loc
    (the canonical virtual-element surrogate: the basis itself is unknown in
    cell interiors).  On triangles the hats are barycentric, so the exact
    basis expansion is available as well.
    """

    system: GlobalSystem = field(repr=False)
    coefficients: np.ndarray
    projections: list[np.ndarray] = field(repr=False)
    residual: float = 0.0

    def local_coefficients(self, ci: int) -> np.ndarray:
        dofs = self.system.dofmap.cell_dofs(self.system.mesh.cells[ci])
        return self.coefficients[dofs]

    def evaluate_projection(self, ci: int, x: np.ndarray) -> np.ndarray:
        """Projected solution at points ``x`` (q, 2) inside cell ``ci``."""
        ops = self.system.elements[ci]
        ctx = self.system.context
        rel = np.atleast_2d(x) - ops.geometry.centroid
        return np.exp(1j * ctx.k * rel @ ctx.directions.vectors.T) @ self.projections[ci]

    def evaluate_exact(self, ci: int, x: np.ndarray) -> np.ndarray:
        """Exact basis expansion at points ``x``; triangles only."""
        mesh = self.system.mesh
        cell = mesh.cells[ci]
        if len(cell) != 3:
            raise ValueError("exact evaluation requires a triangular cell")
        ctx = self.system.context
        verts = mesh.vertices[list(cell)]
        x = np.atleast_2d(x)
        x1, x2, x3 = verts
        det = (x2[1] - x3[1]) * (x1[0] - x3[0]) + (x3[0] - x2[0]) * (x1[1] - x3[1])
        lam = np.empty((len(x), 3))
        lam[:, 0] = ((x2[1] - x3[1]) * (x[:, 0] - x3[0])
                     + (x3[0] - x2[0]) * (x[:, 1] - x3[1])) / det
        lam[:, 1] = ((x3[1] - x1[1]) * (x[:, 0] - x3[0])
                     + (x1[0] - x3[0]) * (x[:, 1] - x3[1])) / det
        lam[:, 2] = 1.0 - lam[:, 0] - lam[:, 1]
        aloc = self.local_coefficients(ci)
        p = ctx.p
        out = np.zeros(len(x), dtype=complex)
        for j in range(3):
            pw = np.exp(1j * ctx.k * (x - verts[j]) @ ctx.directions.vectors.T)
            out += lam[:, j] * (pw @ aloc[j * p:(j + 1) * p])
        return out


def assemble(mesh: PolygonalMesh, ctx: WaveContext,
             variant: str = "PWVEM") -> GlobalSystem:
    """Assemble the global matrix of the requested variant.

    PUM and GRAD require an all-triangle mesh.  Any numerically singular
    element aborts the assembly with an error naming the cell.
    """
    if variant != "PWVEM" and any(len(c) != 3 for c in mesh.cells):
        raise ValueError(f"variant {variant} requires an all-triangle mesh")
    dofmap = DofMap(mesh.n_vertices, ctx.p)
    elements = []
    rows, cols, vals = [], [], []
    for ci in range(mesh.n_cells):
        ops = build_local_operators(mesh, ci, ctx, variant)
        elements.append(ops)
        dofs = dofmap.cell_dofs(mesh.cells[ci])
        rows.append(np.repeat(dofs, len(dofs)))
        cols.append(np.tile(dofs, len(dofs)))
        vals.append(ops.E.ravel())
    matrix = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dofmap.n_dofs, dofmap.n_dofs),
    ).tocsc()
    return GlobalSystem(mesh=mesh, context=ctx, variant=variant,
                        dofmap=dofmap, matrix=matrix, elements=elements)


def assemble_rhs(system: GlobalSystem, g) -> np.ndarray:
    """Boundary load vector int_dOmega g conj(psi_r) dS.

    ``g(x, normal)`` evaluates the impedance datum at points ``x`` (q, 2)
    on a boundary edge with outward unit ``normal``.  Each edge uses a
    Gauss rule sized for the k-oscillation of the integrand.
    """
    mesh = system.mesh
    ctx = system.context
    dirs = ctx.directions.vectors
    p = ctx.p
    rhs = np.zeros(system.n_dofs, dtype=complex)
    for edge in mesh.boundary_edges:
        pa = mesh.vertices[edge.a]
        pb = mesh.vertices[edge.b]
        tang = pb - pa
        length = float(np.linalg.norm(tang))
        normal = np.array([tang[1], -tang[0]]) / length
        rule = gauss_segment(segment_point_count(ctx.k, length))
        xq = pa[None, :] + rule.nodes[:, None] * tang[None, :]
        gq = np.asarray(g(xq, normal))
        for vid, vx, hat in ((edge.a, pa, 1.0 - rule.nodes),
                             (edge.b, pb, rule.nodes)):
            pw_conj = np.exp(-1j * ctx.k * (xq - vx) @ dirs.T)  # (q, p)
            rhs[vid * p:(vid + 1) * p] += length * (
                (rule.weights * gq * hat) @ pw_conj
            )
    return rhs


def solve(system: GlobalSystem, rhs: np.ndarray) -> DiscreteSolution:
    """Direct sparse solve; caches per-element wave projection coefficients.

    Raises :class:`SolveError` on factorization failure or when the
    relative residual exceeds ``RESIDUAL_LIMIT`` (the plane-wave basis is
    known to become unstable for large p or very fine meshes).
    """
    params = (f"h = {system.mesh.h:.4g}, k = {system.context.k:.4g}, "
              f"p = {system.context.p}")
    try:
        lu = spla.splu(system.matrix)
        x = lu.solve(rhs)
    except RuntimeError as exc:
        raise SolveError(f"sparse factorization failed ({params}): {exc}") from exc
    norm_rhs = float(np.linalg.norm(rhs))
    residual = float(np.linalg.norm(system.matrix @ x - rhs))
    residual = residual / norm_rhs if norm_rhs > 0 else residual
    if not np.isfinite(residual) or residual > RESIDUAL_LIMIT:
        raise SolveError(
            f"solver residual {residual:.2e} exceeds {RESIDUAL_LIMIT:.0e} "
            f"({params}): plane-wave basis too ill-conditioned"
        )
    dofmap = system.dofmap
    projections = [
        ops.proj @ x[dofmap.cell_dofs(system.mesh.cells[ci])]
        for ci, ops in enumerate(system.elements)
    ]
    return DiscreteSolution(system=system, coefficients=x,
                            projections=projections, residual=residual)


def dump_matrix(system: GlobalSystem, path) -> None:
    """Write the global matrix as `row col re im` coordinate text."""
    coo = system.matrix.tocoo()
    with open(path, "w", encoding="ascii") as f:
        f.write(f"% {coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            f.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")
