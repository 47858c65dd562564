import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwvem import (
    MeshError,
    MeshFormatError,
    PolygonalMesh,
    element_geometry,
    make_structured_triangular,
    make_voronoi,
    read_mesh,
    shape_diagnostics,
    write_mesh,
)

from conftest import nonconvex_cell


class TestStructuredTriangular:
    def test_counts_and_h_n2(self):
        mesh = make_structured_triangular(2)
        assert mesh.n_cells == 8
        assert mesh.h == pytest.approx(7.0711e-01, rel=1e-4)

    def test_smallest_grid(self):
        mesh = make_structured_triangular(1)
        assert mesh.n_cells == 2
        assert mesh.n_vertices == 4

    def test_counts_and_h_n8(self):
        mesh = make_structured_triangular(8)
        assert mesh.n_cells == 128
        assert mesh.h == pytest.approx(1.7678e-01, rel=1e-4)

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            make_structured_triangular(0)

    def test_partition_of_unit_square(self):
        for n in (1, 3, 5):
            assert make_structured_triangular(n).total_area() == pytest.approx(
                1.0, abs=1e-12)


class TestVoronoi:
    def test_convex_tessellation(self):
        mesh = make_voronoi(16, seed=1, lloyd_iters=10)
        assert mesh.n_cells == 16
        assert mesh.total_area() == pytest.approx(1.0, abs=1e-12)
        assert all(r.convex for r in shape_diagnostics(mesh))

    def test_partition_64(self):
        mesh = make_voronoi(64, seed=1, lloyd_iters=10)
        assert mesh.total_area() == pytest.approx(1.0, abs=1e-12)

    def test_unrelaxed_still_valid(self):
        mesh = make_voronoi(8, seed=2, lloyd_iters=0)
        mesh.validate_boundary_loop()
        assert mesh.total_area() == pytest.approx(1.0, abs=1e-12)

    def test_determinism_bit_identical(self):
        a = make_voronoi(32, seed=5, lloyd_iters=4)
        b = make_voronoi(32, seed=5, lloyd_iters=4)
        assert np.array_equal(a.vertices, b.vertices)
        assert a.cells == b.cells

    def test_too_few_cells(self):
        with pytest.raises(ValueError):
            make_voronoi(3, seed=1, lloyd_iters=0)

    @settings(max_examples=10, deadline=None)
    @given(n=st.integers(4, 30), seed=st.integers(0, 10_000),
           lloyd=st.integers(0, 3))
    def test_topology_property(self, n, seed, lloyd):
        mesh = make_voronoi(n, seed=seed, lloyd_iters=lloyd)
        mesh.validate_boundary_loop()
        assert mesh.total_area() == pytest.approx(1.0, abs=1e-12)
        # interior edges appear in exactly two cells, traversed oppositely
        seen = {}
        for ci, cell in enumerate(mesh.cells):
            m = len(cell)
            for i in range(m):
                a, b = cell[i], cell[(i + 1) % m]
                seen.setdefault((min(a, b), max(a, b)), []).append((a, b))
        for key, uses in seen.items():
            assert len(uses) in (1, 2)
            if len(uses) == 2:
                assert uses[0] == uses[1][::-1]


class TestElementGeometry:
    def test_unit_square_cell(self):
        mesh = PolygonalMesh(
            [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], [[0, 1, 2, 3]])
        geo = element_geometry(mesh, 0)
        assert geo.centroid == pytest.approx([0.5, 0.5])
        assert geo.area == pytest.approx(1.0)
        assert geo.diameter == pytest.approx(math.sqrt(2.0))

    def test_right_triangle(self):
        mesh = PolygonalMesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 1, 2]])
        geo = element_geometry(mesh, 0)
        assert geo.centroid == pytest.approx([1 / 3, 1 / 3])
        assert geo.area == pytest.approx(0.5)

    def test_closed_polygon_identity(self, voronoi16):
        for ci in range(voronoi16.n_cells):
            geo = element_geometry(voronoi16, ci)
            resultant = (geo.edge_lengths[:, None] * geo.edge_normals).sum(axis=0)
            assert np.abs(resultant).max() < 1e-14

    def test_normals_unit_and_outward(self, tri2):
        geo = element_geometry(tri2, 0)
        assert np.linalg.norm(geo.edge_normals, axis=1) == pytest.approx(
            np.ones(3), abs=1e-14)
        verts = tri2.vertices[list(tri2.cells[0])]
        mids = (verts + np.roll(verts, -1, axis=0)) / 2
        # outward means pointing away from the centroid
        assert (((mids - geo.centroid) * geo.edge_normals).sum(axis=1) > 0).all()

    def test_zero_area_cell_rejected(self):
        with pytest.raises(MeshError):
            PolygonalMesh([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [[0, 1, 2]])


class TestShapeDiagnostics:
    def test_unit_square(self):
        mesh = PolygonalMesh(
            [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], [[0, 1, 2, 3]])
        rep = shape_diagnostics(mesh)[0]
        assert rep.inscribed_ratio == pytest.approx(0.35355339059327376, rel=1e-12)
        assert not rep.lower_bound_only

    def test_equilateral_triangle(self):
        s3 = math.sqrt(3.0)
        mesh = PolygonalMesh([[0.0, 0.0], [1.0, 0.0], [0.5, s3 / 2]], [[0, 1, 2]])
        rep = shape_diagnostics(mesh)[0]
        assert rep.inscribed_ratio == pytest.approx(0.28867513459481288, rel=1e-12)

    def test_nonconvex_flagged(self):
        cell = nonconvex_cell()
        mesh = PolygonalMesh(cell, [list(range(len(cell)))])
        rep = shape_diagnostics(mesh)[0]
        assert rep.lower_bound_only
        assert not rep.convex


class TestMeshIO:
    def test_roundtrip(self, tmp_path):
        mesh = make_structured_triangular(2)
        path = tmp_path / "m.mesh"
        write_mesh(mesh, path)
        back = read_mesh(path)
        assert np.array_equal(back.vertices, mesh.vertices)
        assert back.cells == mesh.cells

    def test_roundtrip_voronoi(self, tmp_path, voronoi16):
        path = tmp_path / "v.mesh"
        write_mesh(voronoi16, path)
        back = read_mesh(path)
        assert np.array_equal(back.vertices, voronoi16.vertices)
        assert back.cells == voronoi16.cells

    def test_clockwise_cell_rejected(self, tmp_path):
        path = tmp_path / "cw.mesh"
        path.write_text("# pwvem-mesh 1\n3 1\n0 0\n1 0\n0 1\n3 0 2 1\n")
        with pytest.raises(MeshFormatError, match="cell 0.*counter-clockwise"):
            read_mesh(path)

    def test_out_of_range_index(self, tmp_path):
        path = tmp_path / "oob.mesh"
        path.write_text("# pwvem-mesh 1\n3 1\n0 0\n1 0\n0 1\n3 0 1 3\n")
        with pytest.raises(MeshFormatError, match="out of range"):
            read_mesh(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.mesh"
        path.write_text("nonsense\n")
        with pytest.raises(MeshFormatError, match="line 1"):
            read_mesh(path)

    def test_malformed_counts(self, tmp_path):
        path = tmp_path / "cnt.mesh"
        path.write_text("# pwvem-mesh 1\n3\n")
        with pytest.raises(MeshFormatError, match="line 2"):
            read_mesh(path)


class TestTopology:
    def test_boundary_loop_closed(self, tri4, voronoi16):
        tri4.validate_boundary_loop()
        voronoi16.validate_boundary_loop()

    def test_interior_edges_opposite_orientation(self, tri4):
        for edge in tri4.edges:
            if not edge.is_boundary:
                c0, c1 = edge.cells
                assert _oriented_in(tri4.cells[c0], edge.a, edge.b)
                assert _oriented_in(tri4.cells[c1], edge.b, edge.a)

    def test_edge_shared_three_times_rejected(self):
        with pytest.raises(MeshError, match="more than two"):
            PolygonalMesh(
                [[0, 0], [1, 0], [0, 1], [1, 1], [-1, 0.5]],
                [[0, 1, 2], [1, 3, 2], [0, 1, 2]],
            )

    def test_repeated_vertex_rejected(self):
        with pytest.raises(MeshError, match="repeats"):
            PolygonalMesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 1, 2]])


def _oriented_in(cell, a, b):
    m = len(cell)
    return any(cell[i] == a and cell[(i + 1) % m] == b for i in range(m))
