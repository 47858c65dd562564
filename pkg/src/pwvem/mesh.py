"""Polygonal meshes of the unit square: data structure, generators, file I/O.

A mesh is a list of simple polygons (counter-clockwise vertex loops) sharing
vertices.  Edge and boundary topology is derived from the cell connectivity
alone, so no geometric tolerance enters the interior/boundary classification.
Meshes are immutable after construction and safe for concurrent read access.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MESH_FORMAT_MAGIC = "# pwvem-mesh 1"


class MeshError(Exception):
    """Invalid mesh topology or geometry."""


class MeshFormatError(MeshError):
    """Malformed mesh file; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Edge:
    """Mesh edge with its adjacent cells.

    ``(a, b)`` is oriented as the edge appears in ``cells[0]``; interior
    edges have two adjacent cells, boundary edges exactly one.
    """

    a: int
    b: int
    cells: tuple[int, ...]

    @property
    def is_boundary(self) -> bool:
        return len(self.cells) == 1


@dataclass(frozen=True)
class ElementGeometry:
    """Per-cell geometric quantities.

    Attributes
    ----------
    centroid : (2,) array
        Mass center of the polygon (signed-area weighted).
    diameter : float
        Maximum pairwise vertex distance.
    area : float
        Polygon area (positive for CCW cells).
    edge_normals : (n, 2) array
        Outward unit normal of each edge ``(v_i, v_{i+1})``.
    edge_lengths : (n,) array
        Length of each edge.
    """

    centroid: np.ndarray
    diameter: float
    area: float
    edge_normals: np.ndarray
    edge_lengths: np.ndarray


@dataclass(frozen=True)
class CellShapeReport:
    """Shape-regularity diagnostics for one cell; informative, never enforced."""

    cell: int
    inscribed_ratio: float
    min_edge_ratio: float
    convex: bool
    lower_bound_only: bool


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return float((x * np.roll(y, -1) - np.roll(x, -1) * y).sum() / 2.0)


class PolygonalMesh:
    """Immutable polygonal mesh with derived edge/boundary topology.

    Parameters
    ----------
    vertices : (nv, 2) array_like
        Vertex coordinates.
    cells : sequence of int sequences
        Per-cell vertex index loops, counter-clockwise.

    Raises
    ------
    MeshError
        If a cell has fewer than 3 vertices, repeats a vertex, is not
        counter-clockwise, or an edge is shared by more than two cells.
    """

    def __init__(self, vertices, cells):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise MeshError("vertices must be an (nv, 2) array")
        self.cells = [tuple(int(v) for v in c) for c in cells]
        nv = len(self.vertices)
        for ci, cell in enumerate(self.cells):
            if len(cell) < 3:
                raise MeshError(f"cell {ci} has fewer than 3 vertices")
            if len(set(cell)) != len(cell):
                raise MeshError(f"cell {ci} repeats a vertex index")
            if min(cell) < 0 or max(cell) >= nv:
                raise MeshError(f"cell {ci} references a vertex out of range")
            if _signed_area(self.vertices[list(cell)]) <= 0.0:
                raise MeshError(f"cell {ci} is not counter-clockwise")
        self.edges, self._edge_of = self._build_edges()
        self.boundary_edges = tuple(e for e in self.edges if e.is_boundary)
        self.vertices.setflags(write=False)

    def _build_edges(self):
        lookup: dict[tuple[int, int], list] = {}
        order: list[tuple[int, int]] = []
        for ci, cell in enumerate(self.cells):
            n = len(cell)
            for i in range(n):
                a, b = cell[i], cell[(i + 1) % n]
                key = (a, b) if a < b else (b, a)
                rec = lookup.get(key)
                if rec is None:
                    lookup[key] = [(a, b), [ci]]
                    order.append(key)
                else:
                    if len(rec[1]) >= 2:
                        raise MeshError(f"edge {key} shared by more than two cells")
                    rec[1].append(ci)
        edges = tuple(
            Edge(lookup[k][0][0], lookup[k][0][1], tuple(lookup[k][1])) for k in order
        )
        edge_of = {
            (e.a, e.b) if e.a < e.b else (e.b, e.a): e for e in edges
        }
        return edges, edge_of

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def edge_between(self, a: int, b: int) -> Edge:
        return self._edge_of[(a, b) if a < b else (b, a)]

    def cell_boundary_edges(self, ci: int) -> list[int]:
        """Local indices i of the boundary edges (v_i, v_{i+1}) of cell ci."""
        cell = self.cells[ci]
        n = len(cell)
        out = []
        for i in range(n):
            if self.edge_between(cell[i], cell[(i + 1) % n]).is_boundary:
                out.append(i)
        return out

    @property
    def h(self) -> float:
        """Mesh width: maximum cell diameter."""
        return max(element_geometry(self, ci).diameter for ci in range(self.n_cells))

    def total_area(self) -> float:
        return sum(_signed_area(self.vertices[list(c)]) for c in self.cells)

    def validate_boundary_loop(self) -> None:
        """Check that the boundary edges form a single closed loop.

        Raises MeshError otherwise.  Interior-edge opposite orientation is
        already implied by the per-cell CCW check plus the two-cell limit.
        """
        succ: dict[int, int] = {}
        for e in self.boundary_edges:
            if e.a in succ:
                raise MeshError(f"boundary vertex {e.a} has two outgoing edges")
            succ[e.a] = e.b
        if not succ:
            raise MeshError("mesh has no boundary edges")
        start = next(iter(succ))
        cur, steps = start, 0
        while True:
            cur = succ.get(cur, None)
            steps += 1
            if cur is None:
                raise MeshError("boundary loop is not closed")
            if cur == start:
                break
            if steps > len(succ):
                raise MeshError("boundary edges form more than one loop")
        if steps != len(succ):
            raise MeshError("boundary edges form more than one loop")


def element_geometry(mesh: PolygonalMesh, ci: int) -> ElementGeometry:
    """Centroid, diameter, area, and outward edge normals of cell ``ci``."""
    pts = mesh.vertices[list(mesh.cells[ci])]
    x, y = pts[:, 0], pts[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cross = x * ys - xs * y
    area = cross.sum() / 2.0
    if area <= 0.0 or not math.isfinite(area):
        raise MeshError(f"cell {ci} has non-positive area")
    cx = ((x + xs) * cross).sum() / (6.0 * area)
    cy = ((y + ys) * cross).sum() / (6.0 * area)
    diff = pts[:, None, :] - pts[None, :, :]
    diameter = float(np.sqrt((diff**2).sum(-1)).max())
    tang = np.roll(pts, -1, axis=0) - pts
    lengths = np.linalg.norm(tang, axis=1)
    if lengths.min() <= 0.0:
        raise MeshError(f"cell {ci} has a zero-length edge")
    normals = np.column_stack([tang[:, 1], -tang[:, 0]]) / lengths[:, None]
    return ElementGeometry(
        centroid=np.array([cx, cy]),
        diameter=diameter,
        area=float(area),
        edge_normals=normals,
        edge_lengths=lengths,
    )


def _is_convex(pts: np.ndarray, tol: float = 1e-12) -> bool:
    n = len(pts)
    d = np.roll(pts, -1, axis=0) - pts
    cr = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
    scale = np.abs(d).max() ** 2
    return bool((cr >= -tol * scale).all())


def shape_diagnostics(mesh: PolygonalMesh) -> list[CellShapeReport]:
    """Per-cell inscribed-ball and edge-length ratios.

    The inscribed radius is estimated as the minimum distance from the
    centroid to the cell edges, which is exact for convex cells and only a
    lower bound for non-convex ones (flagged ``lower_bound_only``).
    """
    reports = []
    for ci in range(mesh.n_cells):
        geo = element_geometry(mesh, ci)
        pts = mesh.vertices[list(mesh.cells[ci])]
        tang = np.roll(pts, -1, axis=0) - pts
        # distance from centroid to the line through each edge
        rel = geo.centroid[None, :] - pts
        dist = np.abs(tang[:, 0] * rel[:, 1] - tang[:, 1] * rel[:, 0]) / geo.edge_lengths
        convex = _is_convex(pts)
        reports.append(
            CellShapeReport(
                cell=ci,
                inscribed_ratio=float(dist.min() / geo.diameter),
                min_edge_ratio=float(geo.edge_lengths.min() / geo.diameter),
                convex=convex,
                lower_bound_only=not convex,
            )
        )
    return reports


def make_structured_triangular(n: int) -> PolygonalMesh:
    """Structured triangulation of the unit square.

    The square is divided into an ``n x n`` Cartesian grid and each small
    square is cut by the diagonal from its lower-left to upper-right corner,
    giving ``2 n^2`` triangles with mesh width ``sqrt(2)/n``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    xs = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    cells = []
    for j in range(n):
        for i in range(n):
            ll = j * (n + 1) + i
            lr = ll + 1
            ur = ll + n + 2
            ul = ll + n + 1
            cells.append((ll, lr, ur))
            cells.append((ll, ur, ul))
    return PolygonalMesh(verts, cells)


_UNIT_SQUARE = (
    np.array([0.0, 0.0]),
    np.array([1.0, 0.0]),
    np.array([1.0, 1.0]),
    np.array([0.0, 1.0]),
)


def _clip_halfplane(poly: list[np.ndarray], point: np.ndarray, normal: np.ndarray):
    """Keep the part of CCW polygon ``poly`` with (x - point).normal <= 0."""
    out: list[np.ndarray] = []
    d = [float((q - point) @ normal) for q in poly]
    n = len(poly)
    for i in range(n):
        j = (i + 1) % n
        di, dj = d[i], d[j]
        if di <= 0.0:
            out.append(poly[i])
            if dj > 0.0:
                t = di / (di - dj)
                out.append(poly[i] + t * (poly[j] - poly[i]))
        elif dj <= 0.0:
            t = di / (di - dj)
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return out


def _voronoi_cells(gen: np.ndarray) -> list[np.ndarray]:
    """Voronoi cells of the generators clipped to the unit square.

    Each cell is obtained by clipping the square against the perpendicular
    bisector of its generator with the other generators, nearest first;
    clipping stops once no remaining bisector can reach the current cell.
    Simple and robust at the desk scales used here; all cells are convex.
    """
    cells = []
    for i, gi in enumerate(gen):
        poly = list(_UNIT_SQUARE)
        dist = np.sqrt(((gen - gi) ** 2).sum(1))
        order = np.argsort(dist)
        reach = max(float(np.linalg.norm(q - gi)) for q in poly)
        for j in order:
            if j == i:
                continue
            # a bisector at distance d/2 cannot cut a cell contained in
            # the ball of radius `reach` around the generator
            if dist[j] / 2.0 > reach:
                break
            gj = gen[j]
            clipped = _clip_halfplane(poly, (gi + gj) / 2.0, gj - gi)
            if len(clipped) < 3:
                raise MeshError("generator produced an empty Voronoi cell")
            if len(clipped) != len(poly) or any(
                q is not r for q, r in zip(clipped, poly)
            ):
                poly = clipped
                reach = max(float(np.linalg.norm(q - gi)) for q in poly)
        cells.append(np.asarray(poly))
    return cells


def _poly_centroid(poly: np.ndarray) -> np.ndarray:
    x, y = poly[:, 0], poly[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cr = x * ys - xs * y
    a = cr.sum() / 2.0
    return np.array([((x + xs) * cr).sum(), ((y + ys) * cr).sum()]) / (6.0 * a)


class _VertexPool:
    """Merges floating-point vertices that coincide up to a snap tolerance."""

    def __init__(self, snap: float = 1e-9):
        self._scale = 1.0 / snap
        self._table: dict[tuple[int, int], int] = {}
        self.points: list[np.ndarray] = []

    def index_of(self, q: np.ndarray) -> int:
        kx = round(q[0] * self._scale)
        ky = round(q[1] * self._scale)
        for dx in (0, -1, 1):
            for dy in (0, -1, 1):
                idx = self._table.get((kx + dx, ky + dy))
                if idx is not None:
                    return idx
        self._table[(kx, ky)] = len(self.points)
        self.points.append(q)
        return len(self.points) - 1


def make_voronoi(n_cells: int, seed: int, lloyd_iters: int) -> PolygonalMesh:
    """Voronoi mesh of the unit square with optional Lloyd relaxation.

    Deterministic for fixed ``(n_cells, seed, lloyd_iters)``.  Generators are
    drawn uniformly in the square; each Lloyd sweep replaces every generator
    by the centroid of its cell.  All cells are convex.
    """
    if n_cells < 4:
        raise ValueError("n_cells must be at least 4")
    if lloyd_iters < 0:
        raise ValueError("lloyd_iters must be non-negative")
    rng = np.random.default_rng(seed)
    gen = rng.random((n_cells, 2))
    for attempt in range(8):
        d2 = ((gen[:, None, :] - gen[None, :, :]) ** 2).sum(-1)
        np.fill_diagonal(d2, np.inf)
        if d2.min() > 1e-24:
            break
        # duplicate generators: nudge deterministically and retry
        gen = gen + rng.normal(scale=1e-9, size=gen.shape)
        gen = np.clip(gen, 0.0, 1.0)
    else:
        raise MeshError("could not separate duplicate Voronoi generators")
    for _ in range(lloyd_iters):
        gen = np.array([_poly_centroid(c) for c in _voronoi_cells(gen)])
    raw = _voronoi_cells(gen)
    pool = _VertexPool()
    cells = []
    for poly in raw:
        keep: list[np.ndarray] = []
        for q in poly:
            if not keep or np.linalg.norm(q - keep[-1]) > 1e-12:
                keep.append(q)
        if len(keep) > 1 and np.linalg.norm(keep[0] - keep[-1]) <= 1e-12:
            keep.pop()
        idx = [pool.index_of(q) for q in keep]
        dedup = [v for i, v in enumerate(idx) if v != idx[(i + 1) % len(idx)]]
        cells.append(dedup)
    return PolygonalMesh(np.asarray(pool.points), cells)


def write_mesh(mesh: PolygonalMesh, path) -> None:
    """Write a mesh in the text format (see module docs: format v1)."""
    with open(path, "w", encoding="ascii") as f:
        f.write(MESH_FORMAT_MAGIC + "\n")
        f.write(f"{mesh.n_vertices} {mesh.n_cells}\n")
        for x, y in mesh.vertices:
            f.write(f"{x:.17g} {y:.17g}\n")
        for cell in mesh.cells:
            f.write(str(len(cell)) + " " + " ".join(str(v) for v in cell) + "\n")


def read_mesh(path) -> PolygonalMesh:
    """Read a mesh written by :func:`write_mesh`.

    Format v1: line 1 is the magic header, line 2 ``nv nc``, then ``nv``
    vertex lines ``x y`` and ``nc`` cell lines ``m i1 ... im`` with 0-based
    CCW vertex indices.  Raises :class:`MeshFormatError` with the offending
    line number on malformed input.
    """
    with open(path, "r", encoding="ascii") as f:
        lines = f.read().splitlines()
    if not lines or lines[0].strip() != MESH_FORMAT_MAGIC:
        raise MeshFormatError(f"expected header {MESH_FORMAT_MAGIC!r}", 1)
    try:
        nv_s, nc_s = lines[1].split()
        nv, nc = int(nv_s), int(nc_s)
        if nv < 3 or nc < 1:
            raise ValueError
    except (IndexError, ValueError):
        raise MeshFormatError("expected 'nv nc' with nv >= 3, nc >= 1", 2) from None
    if len(lines) < 2 + nv + nc:
        raise MeshFormatError("file truncated", len(lines) + 1)
    verts = np.empty((nv, 2))
    for i in range(nv):
        ln = 2 + i
        try:
            xs, ys = lines[ln].split()
            verts[i] = (float(xs), float(ys))
        except ValueError:
            raise MeshFormatError("expected 'x y'", ln + 1) from None
    cells = []
    for c in range(nc):
        ln = 2 + nv + c
        parts = lines[ln].split()
        try:
            m = int(parts[0])
            idx = [int(s) for s in parts[1:]]
            if len(idx) != m:
                raise ValueError
        except (IndexError, ValueError):
            raise MeshFormatError("expected 'm i1 ... im'", ln + 1) from None
        if m < 3:
            raise MeshFormatError(f"cell {c} has fewer than 3 vertices", ln + 1)
        if len(set(idx)) != m:
            raise MeshFormatError(f"cell {c} repeats a vertex index", ln + 1)
        if min(idx) < 0 or max(idx) >= nv:
            raise MeshFormatError(f"cell {c} has a vertex index out of range", ln + 1)
        if _signed_area(verts[idx]) <= 0.0:
            raise MeshFormatError(f"cell {c} is not counter-clockwise", ln + 1)
        cells.append(idx)
    return PolygonalMesh(verts, cells)
