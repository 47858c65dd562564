"""Gauss-Legendre quadrature on segments, triangles and general polygons.

Segment rules live on [0, 1]; triangle rules on the reference triangle
(0,0)-(1,0)-(0,1) as a collapsed tensor-product (Duffy) rule.  Polygons are
integrated by ear-clipping sub-triangulation, which also covers non-convex
cells.  For oscillatory integrands the point-count helpers size the rules at
roughly pi points per wavelength plus a safety margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class SegmentRule:
    """Gauss-Legendre rule on [0, 1]; exact for polynomials of degree 2n-1."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return 2 * len(self.nodes) - 1


@dataclass(frozen=True)
class TriangleRule:
    """Quadrature on the reference triangle (0,0)-(1,0)-(0,1).

    ``points`` are reference coordinates, ``weights`` sum to 1/2 (the
    reference area); ``barycentric`` holds (1-x-y, x, y) per point for
    direct mapping to physical triangles.
    """

    points: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def barycentric(self) -> np.ndarray:
        x, y = self.points[:, 0], self.points[:, 1]
        return np.column_stack([1.0 - x - y, x, y])


@lru_cache(maxsize=None)
def gauss_segment(n_points: int) -> SegmentRule:
    """n-point Gauss-Legendre rule on [0, 1]."""
    if not 1 <= n_points <= 64:
        raise ValueError("n_points must be between 1 and 64")
    x, w = np.polynomial.legendre.leggauss(n_points)
    rule = SegmentRule(nodes=(x + 1.0) / 2.0, weights=w / 2.0)
    rule.nodes.setflags(write=False)
    rule.weights.setflags(write=False)
    return rule


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> TriangleRule:
    """Collapsed tensor rule on the reference triangle, exact to ``degree``.

    The square [0,1]^2 is mapped by (u, v) -> (u(1-v), uv) with Jacobian u;
    the extra factor of u is absorbed by raising the u-direction count.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    n = min(64, max(1, math.ceil((degree + 2) / 2)))
    seg = gauss_segment(n)
    u, v = np.meshgrid(seg.nodes, seg.nodes, indexing="ij")
    w = np.outer(seg.weights, seg.weights)
    pts = np.column_stack([(u * (1.0 - v)).ravel(), (u * v).ravel()])
    wts = (w * u).ravel()
    rule = TriangleRule(points=pts, weights=wts, order=degree)
    rule.points.setflags(write=False)
    rule.weights.setflags(write=False)
    return rule


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _point_in_triangle(p, a, b, c, eps: float) -> bool:
    d1 = _cross(a, b, p)
    d2 = _cross(b, c, p)
    d3 = _cross(c, a, p)
    return d1 >= -eps and d2 >= -eps and d3 >= -eps


def triangulate_polygon(vertices) -> list[tuple[int, int, int]]:
    """Ear-clipping triangulation of a simple CCW polygon.

    Returns index triples into ``vertices``; handles non-convex polygons.
    Raises ValueError when no ear can be clipped, which happens for
    self-intersecting input.
    """
    pts = np.asarray(vertices, dtype=float)
    n = len(pts)
    if n < 3:
        raise ValueError("polygon needs at least 3 vertices")
    if n == 3:
        return [(0, 1, 2)]
    scale = float(np.abs(pts - pts.mean(axis=0)).max()) ** 2
    eps = 1e-12 * scale
    idx = list(range(n))
    tris: list[tuple[int, int, int]] = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 2 * n * n:
            raise ValueError("polygon appears to be self-intersecting")
        clipped = False
        m = len(idx)
        for i in range(m):
            ia, ib, ic = idx[(i - 1) % m], idx[i], idx[(i + 1) % m]
            a, b, c = pts[ia], pts[ib], pts[ic]
            if _cross(a, b, c) <= eps:
                continue  # reflex or collinear corner, not an ear
            ear = True
            for j in idx:
                if j in (ia, ib, ic):
                    continue
                if _point_in_triangle(pts[j], a, b, c, eps):
                    ear = False
                    break
            if ear:
                tris.append((ia, ib, ic))
                idx.pop(i)
                clipped = True
                break
        if not clipped:
            # only collinear corners left: clip one degenerate ear
            for i in range(m):
                ia, ib, ic = idx[(i - 1) % m], idx[i], idx[(i + 1) % m]
                if abs(_cross(pts[ia], pts[ib], pts[ic])) <= eps:
                    idx.pop(i)
                    clipped = True
                    break
            if not clipped:
                raise ValueError("polygon appears to be self-intersecting")
    tris.append((idx[0], idx[1], idx[2]))
    return [t for t in tris if _cross(pts[t[0]], pts[t[1]], pts[t[2]]) > eps]


def map_triangle_points(rule: TriangleRule, tri_pts: np.ndarray):
    """Physical quadrature points and weights for one triangle."""
    lam = rule.barycentric
    x = lam @ tri_pts
    e1 = tri_pts[1] - tri_pts[0]
    e2 = tri_pts[2] - tri_pts[0]
    jac = abs(e1[0] * e2[1] - e1[1] * e2[0])
    return x, rule.weights * jac


def polygon_quadrature(vertices, degree: int):
    """All quadrature points/weights of the sub-triangulated polygon."""
    pts = np.asarray(vertices, dtype=float)
    rule = triangle_rule(degree)
    xs, ws = [], []
    for (i, j, k) in triangulate_polygon(pts):
        x, w = map_triangle_points(rule, pts[[i, j, k]])
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def integrate_polygon(vertices, f, target_degree: int) -> complex:
    """Integrate ``f`` (vectorized over (q, 2) points) over the polygon."""
    x, w = polygon_quadrature(vertices, target_degree)
    return complex(np.sum(w * np.asarray(f(x))))


def segment_point_count(k: float, length: float) -> int:
    """Gauss point count for segment integrands with phase speed up to 2k.

    Boundary loads pair a k-oscillatory datum with a conjugated basis wave,
    so the product oscillates at up to 2k; n >= k*length covers that with
    Gauss-Legendre (which resolves e^{i w t} once 2n exceeds w) and the +6
    adds safety margin.
    """
    return min(64, max(4, math.ceil(k * length) + 6))


def polygon_oscillatory_degree(k: float, diameter: float) -> int:
    """Quadrature degree resolving plane-wave products over a cell."""
    return 2 * math.ceil(k * diameter) + 10
