import numpy as np
import pytest

from fluvius_navem.mesh import polygon_geometry
from fluvius_navem.solver import build_edge_quadrature, build_quadrature, ear_clipping
from fluvius_navem.validation import check_quadrature

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]
ARROW = [[0, 0], [2, 0], [2, 2], [1.0, 0.3], [0, 2]]


def _moment(rule, a, b):
    return rule.integrate(rule.points[:, 0] ** a * rule.points[:, 1] ** b)


def test_square_monomials():
    rule = build_quadrature(polygon_geometry(SQUARE), 8)
    for a, b in [(0, 0), (1, 0), (3, 5), (8, 0), (4, 4)]:
        assert _moment(rule, a, b) == pytest.approx(1.0 / ((a + 1) * (b + 1)), rel=1e-13)


def test_exactness_suite():
    result = check_quadrature(degree=8)
    assert result.passed, str(result)


def test_non_star_shaped_polygon_falls_back_to_ear_clipping():
    geom = polygon_geometry(ARROW)
    triangles = ear_clipping(geom.vertices)
    assert len(triangles) == 3
    rule = build_quadrature(geom, 4)
    assert rule.weights.sum() == pytest.approx(geom.area, rel=1e-13)
    assert _moment(rule, 1, 0) / geom.area == pytest.approx(geom.centroid[0], rel=1e-12)


def test_edge_quadrature():
    geom = polygon_geometry(SQUARE)
    rule = build_edge_quadrature(geom, 4)
    assert rule.points.shape == (4, 4, 2)
    np.testing.assert_allclose(rule.weights.sum(axis=1), 1.0)
    # ∫ over the bottom edge of x³
    assert rule.weights[0] @ rule.points[0, :, 0] ** 3 == pytest.approx(0.25)
