import numpy as np

from .model import PolygonalMesh


def _inside(polygon, points):
    """ Crossing-number test, half-open in x₂ so shared edges belong to exactly one cell. """
    px, py = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    for (x0, y0), (x1, y1) in zip(polygon, np.roll(polygon, -1, axis=0)):
        straddles = (y0 > py) != (y1 > py)
        with np.errstate(divide='ignore', invalid='ignore'):
            x_cross = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        inside ^= straddles & (px < x_cross)
    return inside


def locate_points(mesh: PolygonalMesh, points) -> np.ndarray:
    """
    Index of the cell containing each point. Points on the outer boundary that the half-open
    test leaves out are given to the nearest cell centroid among cells whose bounding box holds them;
    points outside every bounding box get -1.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    owner = np.full(len(points), -1, dtype=int)
    tolerance = 1e-12 * mesh.domain_diameter
    fallback = np.full(len(points), np.inf)
    fallback_owner = np.full(len(points), -1, dtype=int)

    for index in range(mesh.n_cells):
        polygon = mesh.cell_vertices(index)
        lo, hi = polygon.min(axis=0) - tolerance, polygon.max(axis=0) + tolerance
        candidates = np.flatnonzero(np.all((points >= lo) & (points <= hi), axis=1) & (owner < 0))
        if not len(candidates):
            continue

        hit = _inside(polygon, points[candidates])
        owner[candidates[hit]] = index

        distance = np.linalg.norm(points[candidates] - polygon.mean(axis=0), axis=1)
        closer = distance < fallback[candidates]
        fallback[candidates[closer]] = distance[closer]
        fallback_owner[candidates[closer]] = index

    missing = owner < 0
    owner[missing] = fallback_owner[missing]
    return owner


def slice_points(height: float, n_points: int) -> np.ndarray:
    """ Equispaced points on the horizontal line x₂ = height across the unit square. """
    return np.column_stack([np.linspace(0.0, 1.0, n_points), np.full(n_points, height)])
