import math

import numpy as np
import pytest

from pwvem.quadrature import (
    gauss_segment,
    integrate_polygon,
    polygon_quadrature,
    triangle_rule,
    triangulate_polygon,
)

from conftest import nonconvex_cell

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class TestGaussSegment:
    def test_midpoint(self):
        rule = gauss_segment(1)
        assert rule.nodes == pytest.approx([0.5])
        assert rule.weights == pytest.approx([1.0])

    def test_two_point(self):
        rule = gauss_segment(2)
        ref = [(1 - 1 / math.sqrt(3)) / 2, (1 + 1 / math.sqrt(3)) / 2]
        assert sorted(rule.nodes) == pytest.approx(ref)
        assert rule.weights == pytest.approx([0.5, 0.5])

    def test_cubic_exactness(self):
        rule = gauss_segment(2)
        assert np.sum(rule.weights * rule.nodes**3) == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("n", [0, 65, -3])
    def test_out_of_range(self, n):
        with pytest.raises(ValueError):
            gauss_segment(n)

    def test_weights_sum_to_measure(self):
        for n in (1, 5, 17, 64):
            assert gauss_segment(n).weights.sum() == pytest.approx(1.0, abs=1e-14)


class TestTriangleRule:
    def test_weights_sum_to_half(self):
        for deg in (0, 3, 10, 25):
            assert triangle_rule(deg).weights.sum() == pytest.approx(0.5, abs=1e-14)

    @pytest.mark.parametrize("a,b", [(0, 0), (2, 1), (3, 2), (4, 4)])
    def test_monomial_exactness(self, a, b):
        deg = a + b
        rule = triangle_rule(deg)
        x, y = rule.points[:, 0], rule.points[:, 1]
        got = np.sum(rule.weights * x**a * y**b)
        exact = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)
        assert got == pytest.approx(exact, rel=1e-13)


class TestTriangulate:
    def test_convex_quad(self):
        tris = triangulate_polygon(UNIT_SQUARE)
        assert len(tris) == 2

    def test_l_shape(self):
        cell = nonconvex_cell()
        tris = triangulate_polygon(cell)
        assert len(tris) == 4
        areas = [_tri_area(cell[list(t)]) for t in tris]
        assert all(a > 0 for a in areas)
        assert sum(areas) == pytest.approx(_poly_area(cell), abs=1e-13)

    def test_triangle_identity(self):
        tris = triangulate_polygon(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        assert tris == [(0, 1, 2)]

    def test_area_sum_random_convex(self, rng):
        for _ in range(20):
            ang = np.sort(rng.uniform(0, 2 * np.pi, rng.integers(4, 9)))
            if np.diff(ang).min() < 0.1:
                continue
            pts = np.column_stack([np.cos(ang), np.sin(ang)]) * rng.uniform(0.2, 2.0)
            tris = triangulate_polygon(pts)
            total = sum(_tri_area(pts[list(t)]) for t in tris)
            assert total == pytest.approx(_poly_area(pts), rel=1e-13)

    def test_self_intersecting_rejected(self):
        bowtie = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            triangulate_polygon(bowtie)


class TestIntegratePolygon:
    def test_constant_over_unit_square(self):
        assert integrate_polygon(UNIT_SQUARE, lambda x: np.ones(len(x)), 2) \
            == pytest.approx(1.0, abs=1e-14)

    def test_linear_over_right_triangle(self):
        tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        val = integrate_polygon(tri, lambda x: x[:, 0] + x[:, 1], 3)
        assert val == pytest.approx(1 / 3, abs=1e-14)

    def test_plane_wave_kernel_cross_check(self):
        # closed form from the divergence reduction vs direct quadrature
        from pwvem import polygon_pw_mass_integral

        k = 20.0
        tri = np.array([[0.05, 0.0], [0.3, 0.1], [0.1, 0.28]])
        d_m = np.array([1.0, 0.0])
        d_l = np.array([0.0, 1.0])
        kh = k * 0.3266
        degree = 2 * math.ceil(kh) + 10
        gap = k * (d_m - d_l)
        quad = integrate_polygon(tri, lambda x: np.exp(1j * x @ gap), degree)
        closed = polygon_pw_mass_integral(tri, k, d_m, d_l)
        assert abs(quad - closed) / abs(closed) < 1e-12

    def test_refinement_consistency(self):
        f = lambda x: np.exp(1j * 3.0 * x[:, 0]) * np.cos(2.0 * x[:, 1])
        coarse = integrate_polygon(UNIT_SQUARE, f, 20)
        fine = integrate_polygon(UNIT_SQUARE, f, 40)
        assert abs(coarse - fine) / abs(fine) < 1e-12

    def test_nonconvex_cell(self):
        cell = nonconvex_cell()
        val = integrate_polygon(cell, lambda x: np.ones(len(x)), 2)
        assert val == pytest.approx(_poly_area(cell), abs=1e-13)


def _tri_area(p):
    return 0.5 * abs((p[1, 0] - p[0, 0]) * (p[2, 1] - p[0, 1])
                     - (p[2, 0] - p[0, 0]) * (p[1, 1] - p[0, 1]))


def _poly_area(p):
    x, y = p[:, 0], p[:, 1]
    return 0.5 * abs((x * np.roll(y, -1) - np.roll(x, -1) * y).sum())
