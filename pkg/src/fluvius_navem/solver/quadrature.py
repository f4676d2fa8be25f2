from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .. import config, logger
from ..exceptions import DegenerateElementError
from ..mesh import ElementGeometry


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray

    def integrate(self, values):
        """ Σ w_q values[q, ...] """
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass(frozen=True)
class EdgeQuadrature:
    """ Gauss points per edge: ``points`` (k, n, 2), ``weights`` (k, n) including the edge length,
    ``params`` (n,) the position t ∈ (0, 1) along each edge. """
    points: np.ndarray
    weights: np.ndarray
    params: np.ndarray


@lru_cache(maxsize=None)
def gauss_interval(n_points):
    """ Gauss–Legendre points and weights on [0, 1]. """
    z, w = roots_legendre(n_points)
    return 0.5 * (z + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def collapsed_triangle_rule(degree):
    """
    Collapsed Gauss rule on the triangle (0,0), (1,0), (0,1), exact up to ``degree``.
    Points (ξ, η) = (s, t(1 − s)) with weight w_s w_t (1 − s).
    """
    n = (degree + 3) // 2
    s, ws = gauss_interval(n)
    S, T = np.meshgrid(s, s, indexing='ij')
    W = np.outer(ws, ws) * (1.0 - S)
    points = np.column_stack([S.ravel(), (T * (1.0 - S)).ravel()])
    return points, W.ravel()


def _triangle_area(a, b, c):
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))


def _point_in_triangle(p, a, b, c):
    return _triangle_area(a, b, p) > 0 and _triangle_area(b, c, p) > 0 and _triangle_area(c, a, p) > 0


def ear_clipping(vertices):
    """ Triangulate a simple counter-clockwise polygon, returning vertex-index triples. """
    remaining = list(range(len(vertices)))
    triangles = []
    while len(remaining) > 3:
        for k in range(len(remaining)):
            i, j, m = remaining[k - 1], remaining[k], remaining[(k + 1) % len(remaining)]
            a, b, c = vertices[i], vertices[j], vertices[m]
            if _triangle_area(a, b, c) <= 0:
                continue
            if any(_point_in_triangle(vertices[p], a, b, c) for p in remaining if p not in (i, j, m)):
                continue
            triangles.append((i, j, m))
            remaining.pop(k)
            break
        else:
            raise DegenerateElementError('S01101', 'Ear clipping failed: polygon is not simple')
    triangles.append(tuple(remaining))
    return triangles


def triangulate(geom: ElementGeometry):
    """ Centroid fan, or ear clipping when the polygon is not star-shaped with respect to its centroid. """
    vertices, centroid = geom.vertices, geom.centroid
    fan = [(centroid, vertices[i], vertices[(i + 1) % geom.n_vertices]) for i in range(geom.n_vertices)]
    if all(_triangle_area(*tri) > 0 for tri in fan):
        return fan

    logger.debug('Cell [%s] is not star-shaped from its centroid, using ear clipping', geom.label)
    return [tuple(vertices[list(t)]) for t in ear_clipping(vertices)]


def build_quadrature(geom: ElementGeometry, degree: int = None) -> QuadratureRule:
    degree = config.QUADRATURE_DEGREE if degree is None else degree
    ref_points, ref_weights = collapsed_triangle_rule(degree)

    points, weights = [], []
    for a, b, c in triangulate(geom):
        area = _triangle_area(a, b, c)
        jac = np.column_stack([b - a, c - a])
        points.append(a + ref_points @ jac.T)
        weights.append(2.0 * area * ref_weights)

    return QuadratureRule(points=np.vstack(points), weights=np.concatenate(weights))


def build_edge_quadrature(geom: ElementGeometry, n_points: int = None) -> EdgeQuadrature:
    n_points = config.EDGE_QUADRATURE_POINTS if n_points is None else n_points
    t, w = gauss_interval(n_points)
    start = geom.vertices
    delta = np.roll(geom.vertices, -1, axis=0) - start
    points = start[:, None, :] + t[None, :, None] * delta[:, None, :]
    weights = geom.edge_lengths[:, None] * w[None, :]
    return EdgeQuadrature(points=points, weights=weights, params=t)
