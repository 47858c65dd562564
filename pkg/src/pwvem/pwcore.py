"""Plane-wave direction sets, basis bookkeeping, and exact wave integrals.

The discrete space attaches, to every mesh vertex x_j, the p plane waves
e^{ik d_l . (x - x_j)} for a shared set of unit directions d_l.  Products of
two plane waves (optionally weighted by the linear edge traces) integrate in
closed form on edges via the moment functions of :mod:`pwvem.specialfn`, and
over polygons via a divergence-theorem reduction to edge integrals.  These
closed forms are the workhorse of the whole discretization; an independent
quadrature route exists solely to cross-check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import integrate_polygon
from .specialfn import phi

#: 2-norm of d_m - d_l below which (scaled by k and the cell size) the
#: divergence reduction of the polygon integral loses digits and quadrature
#: takes over.
SMALL_WAVE_GAP = 1e-3


@dataclass(frozen=True)
class DirectionSet:
    """A set of p = 2m+1 distinct unit propagation directions.

    ``delta`` records the minimum-angle quality: the smallest pairwise
    angle divided by 2*pi/p (1.0 for an equispaced fan).
    """

    angles: np.ndarray
    vectors: np.ndarray = field(init=False)
    delta: float = field(init=False)

    def __post_init__(self):
        ang = np.asarray(self.angles, dtype=float)
        p = len(ang)
        if p < 3 or p % 2 == 0:
            raise ValueError("need an odd number p = 2m+1 >= 3 of directions")
        object.__setattr__(self, "angles", ang)
        object.__setattr__(
            self, "vectors", np.column_stack([np.cos(ang), np.sin(ang)])
        )
        wrapped = np.sort(np.mod(ang, 2.0 * np.pi))
        gaps = np.diff(np.append(wrapped, wrapped[0] + 2.0 * np.pi))
        if gaps.min() < 1e-12:
            raise ValueError("directions must be distinct")
        if gaps.max() >= np.pi:
            raise ValueError("angle between subsequent directions must be < pi")
        min_pair = gaps.min()
        object.__setattr__(self, "delta", float(min_pair / (2.0 * np.pi / p)))
        self.angles.setflags(write=False)
        self.vectors.setflags(write=False)

    @property
    def p(self) -> int:
        return len(self.angles)

    @property
    def m(self) -> int:
        return (self.p - 1) // 2


def equispaced_directions(p: int, offset_angle: float = 0.0) -> DirectionSet:
    """The equispaced direction fan theta_l = offset + 2 pi (l-1)/p."""
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be odd and >= 3 (p = 2m+1)")
    return DirectionSet(offset_angle + 2.0 * np.pi * np.arange(p) / p)


@dataclass(frozen=True)
class WaveContext:
    """Wave number plus direction set; fixed for a whole computation."""

    k: float
    directions: DirectionSet

    def __post_init__(self):
        if self.k <= 0.0:
            raise ValueError("wave number k must be positive")

    @property
    def p(self) -> int:
        return self.directions.p

    @property
    def wavelength(self) -> float:
        return 2.0 * np.pi / self.k

    def vertex_phases(self, anchor: np.ndarray, verts: np.ndarray) -> np.ndarray:
        """Unit-modulus factors c_{jl} = e^{ik d_l . (anchor - x_j)}, (n, p)."""
        rel = np.asarray(anchor, dtype=float) - np.atleast_2d(verts)
        return np.exp(1j * self.k * rel @ self.directions.vectors.T)


def plane_wave(k: float, direction: np.ndarray, anchor: np.ndarray, x: np.ndarray):
    """Evaluate e^{ik d . (x - anchor)} at points ``x`` of shape (..., 2)."""
    return np.exp(1j * k * (np.asarray(x) - anchor) @ np.asarray(direction))


def basis_flat(j: int, l: int, p: int) -> int:
    """Flat local index of (vertex j, direction l), both 0-based."""
    return j * p + l


def basis_split(r: int, p: int) -> tuple[int, int]:
    """Inverse of :func:`basis_flat`."""
    return divmod(r, p)


def edge_pw_integral(a, b, k: float, d_m, d_l) -> complex:
    """Exact integral of e^{ik (d_m - d_l) . x} along the segment [a, b]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    gap = np.asarray(d_m, dtype=float) - np.asarray(d_l, dtype=float)
    length = float(np.linalg.norm(b - a))
    if length == 0.0:
        raise ValueError("segment endpoints coincide")
    z = 1j * k * float(gap @ (b - a))
    return length * complex(np.exp(1j * k * gap @ a)) * phi(1, z)


_HAT_KIND = {"hat": 2, "hat2": 3, "hat_cross": 4}


def edge_hat_pw_integral(variant: str, a, b, k: float, d_m, d_l) -> complex:
    """Exact edge integral of a plane-wave product weighted by hat traces.

    ``variant`` selects the weight along the segment [a, b], parametrized by
    t in [0, 1] from a to b:

    - ``"hat"``:        (1-t)        -- the trace of the hat at vertex a;
    - ``"hat2"``:       (1-t)^2      -- that hat squared;
    - ``"hat_cross"``:  (1-t) t      -- product of the hats at a and b.

    The anchor ``a`` must be the vertex where the hat equals one ("hat",
    "hat2"), respectively where the first factor vanishes ("hat_cross").
    A hat centered at a vertex not on the edge integrates to zero; callers
    handle that case themselves.
    """
    kind = _HAT_KIND[variant]
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    gap = np.asarray(d_m, dtype=float) - np.asarray(d_l, dtype=float)
    length = float(np.linalg.norm(b - a))
    if length == 0.0:
        raise ValueError("segment endpoints coincide")
    z = 1j * k * float(gap @ (b - a))
    return length * complex(np.exp(1j * k * gap @ a)) * phi(kind, z)


def polygon_pw_mass_integral(vertices, k: float, d_m, d_l) -> complex:
    """Exact integral of e^{ik (d_m - d_l) . x} over a polygonal cell.

    Equal directions give the cell area.  Otherwise the volume integral is
    reduced to edge integrals by the divergence theorem; when the reduction
    denominator k |d_m - d_l| h_K is below :data:`SMALL_WAVE_GAP` the
    amplified cancellation is avoided by sub-triangulated quadrature.
    """
    pts = np.asarray(vertices, dtype=float)
    gap = np.asarray(d_m, dtype=float) - np.asarray(d_l, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    area = float((x * np.roll(y, -1) - np.roll(x, -1) * y).sum() / 2.0)
    gap_norm = float(np.linalg.norm(gap))
    if gap_norm == 0.0:
        return complex(area)
    diam = float(
        np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)).max()
    )
    if k * gap_norm * diam < SMALL_WAVE_GAP:
        kg = k * gap
        return integrate_polygon(pts, lambda q: np.exp(1j * (q @ kg)), 10)
    kappa = k * gap
    k2 = float(kappa @ kappa)
    total = 0.0 + 0.0j
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        t = b - a
        length = float(np.linalg.norm(t))
        normal = np.array([t[1], -t[0]]) / length
        z = 1j * float(kappa @ (b - a))
        edge = length * complex(np.exp(1j * kappa @ a)) * phi(1, z)
        total += float(kappa @ normal) / (1j * k2) * edge
    return total


def pw_product_gram(vertices, centroid, context: WaveContext) -> np.ndarray:
    """Gram matrix J(l, m) = int_K pw_m conj(pw_l) dV, waves anchored at
    the centroid.  Hermitian positive semidefinite.

    Vectorized over all direction pairs: each edge contributes a full
    (p, p) block built from one phi evaluation.
    """
    pts = np.asarray(vertices, dtype=float)
    k = context.k
    dirs = context.directions.vectors
    p = context.p
    x, y = pts[:, 0], pts[:, 1]
    area = float((x * np.roll(y, -1) - np.roll(x, -1) * y).sum() / 2.0)
    diam = float(np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)).max())

    # pairwise direction gaps: gaps[l, m] = d_m - d_l (componentwise)
    gx = dirs[None, :, 0] - dirs[:, 0, None]
    gy = dirs[None, :, 1] - dirs[:, 1, None]
    gap2 = gx * gx + gy * gy
    J = np.zeros((p, p), dtype=complex)
    small = k * np.sqrt(gap2) * diam < SMALL_WAVE_GAP
    regular = ~small
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        t = b - a
        length = float(np.linalg.norm(t))
        normal = np.array([t[1], -t[0]]) / length
        z = 1j * k * (gx * (b[0] - a[0]) + gy * (b[1] - a[1]))
        edge = length * np.exp(1j * k * (gx * a[0] + gy * a[1])) * phi(1, z)
        num = gx * normal[0] + gy * normal[1]
        with np.errstate(divide="ignore", invalid="ignore"):
            contrib = num / (1j * k * gap2) * edge
        J[regular] += contrib[regular]
    if small.any():
        for l, m in zip(*np.nonzero(small)):
            if l == m:
                J[l, m] = area
            else:
                kg = k * np.array([gx[l, m], gy[l, m]])
                J[l, m] = integrate_polygon(
                    pts, lambda q: np.exp(1j * (q @ kg)), 10
                )
    # anchor both waves at the centroid
    proj = dirs @ np.asarray(centroid, dtype=float)
    shift = np.exp(-1j * k * (proj[None, :] - proj[:, None]))
    return J * shift
