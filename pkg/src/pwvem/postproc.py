"""Reference solutions, impedance data, error norms, rates, and CSV output.

The built-in reference fields solve the homogeneous Helmholtz equation on
the unit square:

- a first-kind Hankel source placed outside the domain (the standard smooth
  benchmark field);
- a first-kind Bessel field J_xi(k r) cos(xi theta) in polar coordinates
  around a point on the boundary, analytic for integer xi and of limited
  Sobolev regularity otherwise;
- single plane waves and fixed combinations of the discrete directions
  (these are reproduced exactly by the method: the patch test).

Errors are relative L^2 norms integrated cell by cell with oscillation-aware
quadrature.  On general polygons the discrete field is evaluated through its
plane-wave projection (the basis is virtual: unknown in cell interiors); on
triangles the exact basis expansion is available too and is what the PUM and
GRAD reference variants use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mesh import PolygonalMesh, element_geometry
from .pwcore import WaveContext
from .quadrature import polygon_oscillatory_degree, polygon_quadrature
from .specialfn import bessel_j, bessel_j_prime, hankel1, hankel1_prime
from .system import DiscreteSolution

CSV_HEADER = ("experiment,variant,k,p,h,ndof,l2_rel_error,rate,residual,"
              "offset_angle,mesh_spec")


class InvalidConfigurationError(Exception):
    """Reference solution incompatible with the domain (singularity inside)."""


@dataclass(frozen=True)
class ExactSolution:
    """A reference Helmholtz field with pointwise value and gradient.

    ``u`` maps (q, 2) points to complex values; ``grad`` to (q, 2) complex
    gradients.  ``singular_point`` is where derivatives may blow up (None
    for entire solutions).
    """

    label: str
    k: float
    u: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    singular_point: np.ndarray | None = None


def hankel_solution(k: float, x0=(-0.25, 0.0)) -> ExactSolution:
    """First-kind Hankel field H_0(k |x - x0|) radiating from x0."""
    x0 = np.asarray(x0, dtype=float)

    def u(x):
        r = np.linalg.norm(np.atleast_2d(x) - x0, axis=-1)
        return hankel1(0.0, k * r)

    def grad(x):
        d = np.atleast_2d(x) - x0
        r = np.linalg.norm(d, axis=-1)
        radial = k * hankel1_prime(0.0, k * r) / r
        return radial[..., None] * d

    return ExactSolution(label=f"hankel(x0={tuple(x0)})", k=k, u=u, grad=grad,
                         singular_point=x0)


def bessel_singular_solution(k: float, xi: float, x0=(0.0, 0.5)) -> ExactSolution:
    """J_xi(k r) cos(xi theta) around x0; non-smooth at x0 unless xi is integer."""
    if not 0.0 < xi <= 5.0:
        raise ValueError("xi must lie in (0, 5]")
    x0 = np.asarray(x0, dtype=float)

    def _polar(x):
        d = np.atleast_2d(x) - x0
        r = np.linalg.norm(d, axis=-1)
        theta = np.arctan2(d[..., 1], d[..., 0])
        return d, r, theta

    def u(x):
        _, r, theta = _polar(x)
        return bessel_j(xi, k * r) * np.cos(xi * theta) + 0.0j

    def grad(x):
        d, r, theta = _polar(x)
        du_dr = k * bessel_j_prime(xi, k * r) * np.cos(xi * theta)
        du_dt = -xi * bessel_j(xi, k * r) * np.sin(xi * theta) / r
        e_r = d / r[..., None]
        e_t = np.stack([-e_r[..., 1], e_r[..., 0]], axis=-1)
        return du_dr[..., None] * e_r + du_dt[..., None] * e_t

    return ExactSolution(label=f"bessel(xi={xi})", k=k, u=u, grad=grad,
                         singular_point=x0)


def plane_wave_solution(k: float, direction) -> ExactSolution:
    """The single plane wave e^{ik d . x}."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)

    def u(x):
        return np.exp(1j * k * np.atleast_2d(x) @ d)

    def grad(x):
        return 1j * k * d[None, :] * u(x)[..., None]

    return ExactSolution(label="plane_wave", k=k, u=u, grad=grad)


def plane_wave_combination(ctx: WaveContext, coefficients) -> ExactSolution:
    """A fixed linear combination of the discrete plane-wave directions."""
    coeff = np.asarray(coefficients, dtype=complex)
    if len(coeff) != ctx.p:
        raise ValueError("need one coefficient per direction")
    dirs = ctx.directions.vectors
    k = ctx.k

    def u(x):
        return np.exp(1j * k * np.atleast_2d(x) @ dirs.T) @ coeff

    def grad(x):
        pw = np.exp(1j * k * np.atleast_2d(x) @ dirs.T) * coeff[None, :]
        return 1j * k * pw @ dirs

    return ExactSolution(label="plane_wave_combination", k=k, u=u, grad=grad)


def impedance_datum(exact: ExactSolution, k: float):
    """The boundary function g = grad(u) . nu + ik u of a reference field.

    Returns ``g(x, normal)`` for pointwise evaluation along boundary edges.
    Raises :class:`InvalidConfigurationError` when the field's singular
    point lies strictly inside the unit square (boundary placement is
    allowed: quadrature nodes never hit edge endpoints).
    """
    if exact.singular_point is not None:
        sx, sy = exact.singular_point
        if 0.0 < sx < 1.0 and 0.0 < sy < 1.0:
            raise InvalidConfigurationError(
                f"singular point {exact.singular_point} lies inside the domain"
            )

    def g(x, normal):
        return np.asarray(exact.grad(x)) @ np.asarray(normal) \
            + 1j * k * np.asarray(exact.u(x))

    return g


@dataclass
class ErrorReport:
    """One solve's error record; ``rate`` is filled by :func:`rate_table`."""

    variant: str
    k: float
    p: int
    h: float
    ndof: int
    l2_rel_error: float
    residual: float
    rate: float | None = None


def l2_relative_error(solution: DiscreteSolution, exact: ExactSolution,
                      evaluation: str = "projection",
                      degree_factor: float = 1.0) -> ErrorReport:
    """Relative L^2 error of a discrete solution against a reference field.

    ``evaluation`` selects how the discrete field is sampled in cell
    interiors: ``"projection"`` (works on every polygon) or ``"exact"``
    (triangles only).  Quadrature degree follows the oscillation rule per
    cell; ``degree_factor`` scales it for refinement self-checks.
    """
    if evaluation not in ("projection", "exact"):
        raise ValueError("evaluation must be 'projection' or 'exact'")
    system = solution.system
    mesh = system.mesh
    k = system.context.k
    num = 0.0
    den = 0.0
    for ci in range(mesh.n_cells):
        geo = system.elements[ci].geometry
        degree = max(2, math.ceil(
            degree_factor * polygon_oscillatory_degree(k, geo.diameter)))
        pts = mesh.vertices[list(mesh.cells[ci])]
        xq, wq = polygon_quadrature(pts, degree)
        ue = np.asarray(exact.u(xq))
        if evaluation == "exact":
            uh = solution.evaluate_exact(ci, xq)
        else:
            uh = solution.evaluate_projection(ci, xq)
        num += float(np.sum(wq * np.abs(ue - uh) ** 2))
        den += float(np.sum(wq * np.abs(ue) ** 2))
    return ErrorReport(
        variant=system.variant,
        k=k,
        p=system.context.p,
        h=mesh.h,
        ndof=system.n_dofs,
        l2_rel_error=math.sqrt(num / den),
        residual=solution.residual,
    )


def rate_table(reports: list[ErrorReport]) -> list[ErrorReport]:
    """Attach successive convergence rates to a descending-h series.

    rate_i = log(e_{i-1} / e_i) / log(h_{i-1} / h_i); the first entry has
    none.  Raises ValueError when h is not strictly decreasing.
    """
    out = []
    prev = None
    for rep in reports:
        if prev is not None:
            if rep.h >= prev.h:
                raise ValueError("h must be strictly decreasing for rates")
            rep.rate = math.log(prev.l2_rel_error / rep.l2_rel_error) \
                / math.log(prev.h / rep.h)
        out.append(rep)
        prev = rep
    return out


def csv_row(experiment: str, rep: ErrorReport, offset_angle: float,
            mesh_spec: str) -> str:
    rate = "-" if rep.rate is None else f"{rep.rate:.4f}"
    return (f"{experiment},{rep.variant},{rep.k:.10g},{rep.p},{rep.h:.6e},"
            f"{rep.ndof},{rep.l2_rel_error:.6e},{rate},{rep.residual:.3e},"
            f"{offset_angle:.10g},{mesh_spec}")


def write_csv(path, rows: list[str], timestamp: str | None = None) -> None:
    """Write result rows with the schema header; timestamp line optional."""
    with open(path, "w", encoding="ascii") as f:
        if timestamp:
            f.write(f"# generated {timestamp}\n")
        f.write(CSV_HEADER + "\n")
        for row in rows:
            f.write(row + "\n")


def write_xy(path, xs, ys) -> None:
    """Write an (x, y) series consumable by any plotting tool."""
    with open(path, "w", encoding="ascii") as f:
        for x, y in zip(xs, ys):
            f.write(f"{x:.10e} {y:.10e}\n")
