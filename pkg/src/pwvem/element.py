"""Per-element operators of the plane-wave virtual element discretization.

Every cell K with n_K vertices carries the N = n_K * p basis functions
psi_{(j,l)} = (vertex hat phi_j) * e^{ik d_l . (x - x_j)}.  The local
Helmholtz form a^K(u, v) = (grad u, grad v)_K - k^2 (u, v)_K is split into a
part computed exactly through the projection onto the span of the p centroid
plane waves, plus a stabilization acting on the projection kernel:

- D: coefficients of each centroid wave in the psi basis (N x p);
- B: a^K of every basis function against every centroid wave, assembled from
  edge traces only (p x N);
- G: a^K Gram of the centroid waves (p x p), equal to B D;
- P = D G^{-1} B: projector (composed with inclusion) in the psi basis;
- A_Pi = conj(B)^T G^{-1} B: the projected part of the form;
- M: the scaled vertex-block plane-wave mass matrix; S = (I-P)^H M (I-P);
- R: impedance boundary term ik (u, v) on the cell's share of the domain
  boundary.

All entries come from the closed forms in :mod:`pwvem.pwcore`.  The
projector algebra factorizes the product B @ D rather than the closed-form
G: the two agree to machine precision, but only the product keeps the
identities P^2 = P and (I - P) D = 0 exact in floating point, which the
plane-wave consistency of the method rests on.

On triangles the hat functions are the barycentric coordinates, so the full
volume matrices are computable by quadrature; they furnish the PUM variant
(complete bilinear form) and the GRAD variant (exact-gradient
stabilization) used as references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .mesh import ElementGeometry, PolygonalMesh, element_geometry
from .pwcore import WaveContext, pw_product_gram
from .quadrature import triangle_rule
from .specialfn import phi

VARIANTS = ("PWVEM", "PUM", "GRAD")

#: closed-form G condition number beyond which an element is rejected
COND_LIMIT = 1e14


class SingularElementError(Exception):
    """The plane-wave form Gram of an element is numerically singular."""


class UnsupportedVariantError(Exception):
    """PUM/GRAD volume matrices are only available on triangles."""


@dataclass
class LocalOperators:
    """All local matrices of one element (immutable by convention)."""

    cell: int
    variant: str
    geometry: ElementGeometry
    n_vertices: int
    p: int
    D: np.ndarray
    B: np.ndarray
    G: np.ndarray
    cond_G: float
    P: np.ndarray
    A_Pi: np.ndarray
    M: np.ndarray
    S: np.ndarray
    R: np.ndarray
    E: np.ndarray
    proj: np.ndarray          # (p, N) map from local dofs to wave coefficients
    A_full: np.ndarray | None = None
    M_full: np.ndarray | None = None

    @property
    def n_dofs(self) -> int:
        return self.n_vertices * self.p


def wave_dof_matrix(geom: ElementGeometry, verts: np.ndarray,
                    ctx: WaveContext) -> np.ndarray:
    """Coefficients of the centroid waves in the vertex-wave basis.

    Column l represents e^{ik d_l . (x - x_K)}; by the partition of unity
    its only nonzero coefficients sit at (j, l) with value
    e^{-ik d_l . (x_K - x_j)}.
    """
    p = ctx.p
    n = len(verts)
    c = ctx.vertex_phases(geom.centroid, verts)  # (n, p)
    D = np.zeros((n * p, p), dtype=complex)
    rows = np.arange(n)[:, None] * p + np.arange(p)[None, :]
    D[rows.ravel(), np.tile(np.arange(p), n)] = np.conj(c).ravel()
    return D


def wave_trace_form_matrix(geom: ElementGeometry, verts: np.ndarray,
                           ctx: WaveContext) -> np.ndarray:
    """a^K(psi_r, pw_l) for all basis functions and centroid waves.

    Since the waves solve the homogeneous Helmholtz equation, integration
    by parts turns the volume form into -ik oint d_l . nu psi_r conj(pw_l);
    each basis trace is supported on the two edges at its vertex, and each
    edge integral is a hat-weighted wave product with a closed form.
    """
    k = ctx.k
    dirs = ctx.directions.vectors
    p = ctx.p
    n = len(verts)
    B = np.zeros((p, n * p), dtype=complex)
    for e in range(n):
        i0, i1 = e, (e + 1) % n
        length = geom.edge_lengths[e]
        normal = geom.edge_normals[e]
        dn = dirs @ normal  # (p,)
        for j, vj, other in ((i0, verts[i0], verts[i1]),
                             (i1, verts[i1], verts[i0])):
            proj = dirs @ (other - vj)
            z = 1j * k * (proj[None, :] - proj[:, None])
            hat = phi(2, z)  # (l, m)
            c_j = np.exp(1j * k * (dirs @ (geom.centroid - vj)))
            B[:, j * p:(j + 1) * p] += (
                (-1j * k * length) * (dn * c_j)[:, None] * hat
            )
    return B


def wave_form_matrix(geom: ElementGeometry, verts: np.ndarray,
                     ctx: WaveContext) -> np.ndarray:
    """a^K Gram of the centroid waves, from the closed-form mass integrals.

    Raises :class:`SingularElementError` when the condition number exceeds
    :data:`COND_LIMIT`; the message names h_K * k, the parameter that
    drives the degeneracy.
    """
    J = pw_product_gram(verts, geom.centroid, ctx)
    dd = ctx.directions.vectors @ ctx.directions.vectors.T
    G = ctx.k**2 * (dd - 1.0) * J
    cond = float(np.linalg.cond(G))
    if not math.isfinite(cond) or cond > COND_LIMIT:
        raise SingularElementError(
            f"wave form Gram numerically singular (cond {cond:.2e}) "
            f"at h_K*k = {geom.diameter * ctx.k:.3f}, p = {ctx.p}"
        )
    return G


def projector_matrix(D: np.ndarray, B: np.ndarray, G: np.ndarray) -> np.ndarray:
    """P = D G^{-1} B via a pivoted factorization (never an explicit inverse)."""
    lu = sla.lu_factor(G)
    return D @ sla.lu_solve(lu, B)


def projected_form_matrix(B: np.ndarray, G: np.ndarray) -> np.ndarray:
    """A_Pi = conj(B)^T G^{-1} B, the exactly computable part of the form."""
    lu = sla.lu_factor(G)
    return B.conj().T @ sla.lu_solve(lu, B)


def scaled_wave_mass_matrix(geom: ElementGeometry, verts: np.ndarray,
                            ctx: WaveContext,
                            J: np.ndarray | None = None) -> np.ndarray:
    """Vertex-block-diagonal plane-wave mass matrix scaled by 1/h_K^2.

    Block j is the centroid-wave Gram conjugated by the unit-modulus vertex
    phases, so the matrix is Hermitian positive semidefinite.
    """
    if J is None:
        J = pw_product_gram(verts, geom.centroid, ctx)
    p = ctx.p
    n = len(verts)
    c = ctx.vertex_phases(geom.centroid, verts)
    M = np.zeros((n * p, n * p), dtype=complex)
    inv_h2 = 1.0 / geom.diameter**2
    for j in range(n):
        cj = c[j]
        M[j * p:(j + 1) * p, j * p:(j + 1) * p] = (
            inv_h2 * np.conj(cj)[:, None] * J * cj[None, :]
        )
    return M


def stabilization_matrix(P: np.ndarray, M: np.ndarray) -> np.ndarray:
    """S = (I-P)^H M (I-P): the mass surrogate acting on the projection kernel."""
    IP = np.eye(len(P), dtype=complex) - P
    return IP.conj().T @ M @ IP


def boundary_impedance_matrix(geom: ElementGeometry, verts: np.ndarray,
                              ctx: WaveContext,
                              boundary_local_edges) -> np.ndarray:
    """ik (trial, test) on the element's boundary edges; zero for interior
    cells.  R / (ik) is the Gram of the basis traces, Hermitian PSD.
    """
    k = ctx.k
    dirs = ctx.directions.vectors
    p = ctx.p
    n = len(verts)
    R = np.zeros((n * p, n * p), dtype=complex)
    for e in boundary_local_edges:
        i0, i1 = e, (e + 1) % n
        length = geom.edge_lengths[e]
        for j, vj, other in ((i0, verts[i0], verts[i1]),
                             (i1, verts[i1], verts[i0])):
            # same-vertex block: hat squared, all phases cancel
            proj = dirs @ (other - vj)
            z = 1j * k * (proj[None, :] - proj[:, None])
            R[j * p:(j + 1) * p, j * p:(j + 1) * p] += (
                1j * k * length * phi(3, z)
            )
        # cross blocks: hats of both endpoints
        for j, kk in ((i0, i1), (i1, i0)):
            vj, vk = verts[j], verts[kk]
            proj = dirs @ (vk - vj)
            z = 1j * k * (proj[None, :] - proj[:, None])
            block = 1j * k * length * np.exp(-1j * k * proj)[None, :] * phi(4, z)
            R[j * p:(j + 1) * p, kk * p:(kk + 1) * p] += block
    return R


def triangle_volume_matrices(verts: np.ndarray, ctx: WaveContext,
                             target_degree: int):
    """Full volume stiffness and mass matrices on a triangle, by quadrature.

    The hats are the barycentric coordinates; each basis gradient is
    (grad phi_j + ik phi_j d_l) times the vertex wave.  Returns
    (A_full, M_full), both Hermitian.
    """
    if len(verts) != 3:
        raise UnsupportedVariantError(
            "volume matrices require a triangle (hats known only there)"
        )
    k = ctx.k
    dirs = ctx.directions.vectors
    p = ctx.p
    rule = triangle_rule(target_degree)
    lam = rule.barycentric
    xq = lam @ verts
    e1 = verts[1] - verts[0]
    e2 = verts[2] - verts[0]
    jac = abs(e1[0] * e2[1] - e1[1] * e2[0])
    wq = rule.weights * jac
    x1, x2, x3 = verts
    two_area = (x2[0] - x1[0]) * (x3[1] - x1[1]) - (x3[0] - x1[0]) * (x2[1] - x1[1])
    grad_lam = np.array([
        [x2[1] - x3[1], x3[0] - x2[0]],
        [x3[1] - x1[1], x1[0] - x3[0]],
        [x1[1] - x2[1], x2[0] - x1[0]],
    ]) / two_area
    q = len(xq)
    Psi = np.empty((q, 3 * p), dtype=complex)
    Gx = np.empty((q, 3 * p), dtype=complex)
    Gy = np.empty((q, 3 * p), dtype=complex)
    for j in range(3):
        pw = np.exp(1j * k * (xq - verts[j]) @ dirs.T)  # (q, p)
        sl = slice(j * p, (j + 1) * p)
        Psi[:, sl] = lam[:, j:j + 1] * pw
        Gx[:, sl] = (grad_lam[j, 0] + 1j * k * dirs[:, 0][None, :] * lam[:, j:j + 1]) * pw
        Gy[:, sl] = (grad_lam[j, 1] + 1j * k * dirs[:, 1][None, :] * lam[:, j:j + 1]) * pw
    W = wq[:, None]
    A_full = Gx.conj().T @ (W * Gx) + Gy.conj().T @ (W * Gy)
    M_full = Psi.conj().T @ (W * Psi)
    return A_full, M_full


def volume_quadrature_degree(k: float, diameter: float) -> int:
    """Degree used for the PUM/GRAD volume matrices."""
    return 2 * math.ceil(k * diameter) + 12


def build_local_operators(mesh: PolygonalMesh, ci: int, ctx: WaveContext,
                          variant: str = "PWVEM") -> LocalOperators:
    """Build every local matrix of cell ``ci`` for the requested variant.

    The elemental matrix ``E`` is A_Pi + S + R for PWVEM,
    A_full - k^2 M_full + R for PUM, and A_Pi + (I-P)^H A_full (I-P) + R
    for GRAD (the latter two on triangles only).
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; use one of {VARIANTS}")
    verts = mesh.vertices[list(mesh.cells[ci])]
    geom = element_geometry(mesh, ci)
    p = ctx.p
    n = len(verts)
    J = pw_product_gram(verts, geom.centroid, ctx)
    dd = ctx.directions.vectors @ ctx.directions.vectors.T
    G = ctx.k**2 * (dd - 1.0) * J
    cond = float(np.linalg.cond(G))
    if not math.isfinite(cond) or cond > COND_LIMIT:
        raise SingularElementError(
            f"cell {ci}: wave form Gram numerically singular (cond {cond:.2e}) "
            f"at h_K*k = {geom.diameter * ctx.k:.3f}, p = {p}"
        )
    D = wave_dof_matrix(geom, verts, ctx)
    B = wave_trace_form_matrix(geom, verts, ctx)
    # factor the product B D, not the closed-form G: see module docstring
    lu = sla.lu_factor(B @ D)
    proj = sla.lu_solve(lu, B)
    A_Pi = B.conj().T @ proj
    P = D @ proj
    M = scaled_wave_mass_matrix(geom, verts, ctx, J)
    S = stabilization_matrix(P, M)
    R = boundary_impedance_matrix(geom, verts, ctx, mesh.cell_boundary_edges(ci))
    A_full = M_full = None
    if variant == "PWVEM":
        E = A_Pi + S + R
    else:
        degree = volume_quadrature_degree(ctx.k, geom.diameter)
        A_full, M_full = triangle_volume_matrices(verts, ctx, degree)
        if variant == "PUM":
            E = A_full - ctx.k**2 * M_full + R
        else:
            IP = np.eye(n * p, dtype=complex) - P
            E = A_Pi + IP.conj().T @ A_full @ IP + R
    return LocalOperators(
        cell=ci, variant=variant, geometry=geom, n_vertices=n, p=p,
        D=D, B=B, G=G, cond_G=cond, P=P, A_Pi=A_Pi, M=M, S=S, R=R, E=E,
        proj=proj, A_full=A_full, M_full=M_full,
    )


class InfSupDiagnosticError(Exception):
    """The 1,k-norm Gram is numerically degenerate at this h_K k and p."""


def infsup_reference(t: float) -> float:
    """Reference lower-bound curve 1 - 2 t^2 / pi^2 for convex cells."""
    return 1.0 - 2.0 * t**2 / math.pi**2


def local_infsup_beta(vertices, ctx: WaveContext, dps: int = 50) -> float:
    """Numeric inf-sup constant of the local form on the wave space.

    beta is the smallest singular value of H^{-1/2} G H^{-1/2}, where H is
    the weighted-norm Gram (1, k)-inner product of the centroid waves and G
    the local Helmholtz form Gram.  Both matrices become violently
    ill-conditioned as h_K k -> 0 (the waves degenerate toward low-degree
    polynomials), so this diagnostic evaluates the closed forms and the
    Hermitian eigenproblems in ``dps``-digit arithmetic.
    """
    import mpmath as mp

    pts = np.asarray(vertices, dtype=float)
    k = ctx.k
    dirs = ctx.directions.vectors
    p = ctx.p
    with mp.workdps(dps):
        mpts = [(mp.mpf(float(x)), mp.mpf(float(y))) for x, y in pts]
        n = len(mpts)
        area = mp.mpf(0)
        cx = mp.mpf(0)
        cy = mp.mpf(0)
        for i in range(n):
            x1, y1 = mpts[i]
            x2, y2 = mpts[(i + 1) % n]
            cr = x1 * y2 - x2 * y1
            area += cr
            cx += (x1 + x2) * cr
            cy += (y1 + y2) * cr
        area /= 2
        cx /= 6 * area
        cy /= 6 * area

        def phi1(z):
            if abs(z) < mp.mpf(10) ** (-dps // 2):
                return mp.mpf(1) + z / 2 + z**2 / 6
            return (mp.exp(z) - 1) / z

        def mass(kx, ky):
            if kx == 0 and ky == 0:
                return mp.mpc(area)
            k2 = kx * kx + ky * ky
            tot = mp.mpc(0)
            for i in range(n):
                a = mpts[i]
                b = mpts[(i + 1) % n]
                tx, ty = b[0] - a[0], b[1] - a[1]
                ln = mp.sqrt(tx * tx + ty * ty)
                nx, ny = ty / ln, -tx / ln
                z = 1j * (kx * tx + ky * ty)
                edge = ln * mp.exp(1j * (kx * a[0] + ky * a[1])) * phi1(z)
                tot += (kx * nx + ky * ny) / (1j * k2) * edge
            return tot

        mk = mp.mpf(float(k))
        d = [(mp.mpf(float(v[0])), mp.mpf(float(v[1]))) for v in dirs]
        G = mp.matrix(p, p)
        H = mp.matrix(p, p)
        for l in range(p):
            for m in range(p):
                kx = mk * (d[m][0] - d[l][0])
                ky = mk * (d[m][1] - d[l][1])
                J = mp.exp(-1j * (kx * cx + ky * cy)) * mass(kx, ky)
                dd = d[m][0] * d[l][0] + d[m][1] * d[l][1]
                G[l, m] = mk**2 * (dd - 1) * J
                H[l, m] = mk**2 * (dd + 1) * J
        EH, Q = mp.eighe(H)
        if min(EH) <= 0:
            raise InfSupDiagnosticError(
                f"1,k-norm Gram not positive definite at h_K*k = "
                f"{_diameter(pts) * k:.3f}, p = {p}: wave basis degenerate"
            )
        half = Q * mp.diag([1 / mp.sqrt(e) for e in EH]) * Q.H
        EW, _ = mp.eighe(half * G * half)
        return float(min(abs(e) for e in EW))


def _diameter(pts: np.ndarray) -> float:
    return float(np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)).max())
