import numpy as np
from scipy.spatial import QhullError, Voronoi, cKDTree
from scipy.sparse.csgraph import connected_components
from scipy.sparse import coo_matrix

from .. import config, logger
from ..exceptions import MeshValidationError
from .model import PolygonalMesh, signed_area

MAX_RESAMPLING = 100
SNAP_TOLERANCE = 1e-10


def _grid_vertices(n):
    xs = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(xs, xs)
    return np.column_stack([X.ravel(), Y.ravel()])


def _grid_index(n, i, j):
    return j * (n + 1) + i


def _cell_areas(vertices, cells):
    poly = vertices[cells]
    x, y = poly[..., 0], poly[..., 1]
    return 0.5 * (x * np.roll(y, -1, axis=-1) - np.roll(x, -1, axis=-1) * y).sum(axis=-1)


def generate_distorted_quad_mesh(n: int, distortion: float = None, seed: int = 0) -> PolygonalMesh:
    """
    n×n quadrilateral grid on (0,1)² with randomly displaced vertices.

    Interior vertices move by at most ``distortion·(1/n)/2`` per coordinate, boundary vertices
    only along their side and corners stay fixed. Grids with a non-positive cell are resampled.
    """
    distortion = config.QUAD_DISTORTION if distortion is None else distortion
    if n < 2:
        raise MeshValidationError('M01401', f'Grid size must be at least 2, got {n}')
    if not 0.0 <= distortion < 1.0:
        raise MeshValidationError('M01402', f'Distortion must lie in [0, 1), got {distortion}')

    base = _grid_vertices(n)
    cells = np.array([
        [_grid_index(n, i, j), _grid_index(n, i + 1, j), _grid_index(n, i + 1, j + 1), _grid_index(n, i, j + 1)]
        for j in range(n) for i in range(n)
    ])

    ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n + 1))
    movable = np.column_stack([
        ((ii > 0) & (ii < n)).ravel(),
        ((jj > 0) & (jj < n)).ravel(),
    ]).astype(float)

    rng = np.random.default_rng(seed)
    amplitude = distortion * 0.5 / n
    for attempt in range(MAX_RESAMPLING):
        vertices = base + rng.uniform(-amplitude, amplitude, size=base.shape) * movable
        if np.all(_cell_areas(vertices, cells) > 0):
            try:
                return PolygonalMesh(vertices, cells)
            except MeshValidationError as e:
                logger.warning('Rejected distorted grid [%d]: %s', attempt, e)
                continue
        logger.warning('Rejected distorted grid [%d]: non-positive cell area', attempt)

    raise MeshValidationError('M01403', f'Unable to draw a valid {n}x{n} grid with distortion {distortion}')


def generate_cartesian_mesh(n: int) -> PolygonalMesh:
    return generate_distorted_quad_mesh(n, distortion=0.0)


def generate_triangle_mesh(n: int) -> PolygonalMesh:
    """ n×n grid with every square split along its diagonal into 2n² triangles. """
    cells = []
    for j in range(n):
        for i in range(n):
            a, b = _grid_index(n, i, j), _grid_index(n, i + 1, j)
            c, d = _grid_index(n, i + 1, j + 1), _grid_index(n, i, j + 1)
            cells.append((a, b, c))
            cells.append((a, c, d))
    return PolygonalMesh(_grid_vertices(n), cells)


def _mirror(points):
    x, y = points[:, 0], points[:, 1]
    return np.vstack([
        points,
        np.column_stack([-x, y]),
        np.column_stack([2.0 - x, y]),
        np.column_stack([x, -y]),
        np.column_stack([x, 2.0 - y]),
    ])


def _voronoi_regions(seeds):
    diagram = Voronoi(_mirror(seeds))
    regions = []
    for index in range(len(seeds)):
        region = diagram.regions[diagram.point_region[index]]
        if -1 in region or not region:
            raise MeshValidationError('M01404', f'Unbounded Voronoi region for seed [{index}]')
        regions.append(list(region))
    return diagram.vertices, regions


def _region_centroid(polygon):
    x, y = polygon[:, 0], polygon[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6.0 * area)


def _lloyd(seeds, iterations):
    for _ in range(iterations):
        vertices, regions = _voronoi_regions(seeds)
        seeds = np.array([_region_centroid(vertices[r]) for r in regions])
    return seeds


def _merge_vertices(vertices, regions):
    """ Merge coincident Voronoi vertices and renumber the used ones compactly. """
    used = np.unique(np.concatenate([np.asarray(r) for r in regions]))
    points = vertices[used]
    tolerance = SNAP_TOLERANCE * max(1.0, np.ptp(points, axis=0).max())
    pairs = np.array(sorted(cKDTree(points).query_pairs(tolerance)), dtype=int).reshape(-1, 2)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(points), len(points)))
    _, labels = connected_components(graph, directed=False)

    merged = np.zeros((labels.max() + 1, 2))
    np.add.at(merged, labels, points)
    merged /= np.bincount(labels)[:, None]

    lookup = dict(zip(used.tolist(), labels.tolist()))
    cells = []
    for region in regions:
        loop = [lookup[v] for v in region]
        loop = [v for k, v in enumerate(loop) if v != loop[k - 1]]
        if signed_area(merged[loop]) < 0:
            loop = loop[::-1]
        cells.append(loop)
    return merged, cells


def _sine_distortion(vertices, amplitude):
    x, y = vertices[:, 0], vertices[:, 1]
    interior = np.minimum.reduce([x, 1.0 - x, y, 1.0 - y]) > SNAP_TOLERANCE
    shift = amplitude * np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y) * interior
    return vertices + shift[:, None]


def generate_voronoi_mesh(
        n_seeds: int, lloyd_iters: int = 0, seed: int = 0, amplitude: float = None, seeds=None) -> PolygonalMesh:
    """
    Voronoi tessellation of (0,1)² clipped by mirroring the seeds across the four sides.

    Seeds are drawn uniformly unless given explicitly, relaxed by ``lloyd_iters`` Lloyd
    iterations, and the interior vertices of the result are moved by the sine map of
    amplitude ``amplitude``.
    """
    amplitude = config.SINE_AMPLITUDE if amplitude is None else amplitude
    if n_seeds < 4:
        raise MeshValidationError('M01405', f'At least 4 seeds are required, got {n_seeds}')

    rng = np.random.default_rng(seed)
    for attempt in range(MAX_RESAMPLING):
        points = np.asarray(seeds, dtype=float) if seeds is not None else rng.uniform(0.0, 1.0, size=(n_seeds, 2))
        if cKDTree(points).query_pairs(SNAP_TOLERANCE):
            if seeds is not None:
                raise MeshValidationError('M01406', 'Duplicate Voronoi seeds')
            logger.warning('Resampling Voronoi seeds [%d]: duplicate seeds', attempt)
            continue

        try:
            points = _lloyd(points, lloyd_iters)
            vertices, regions = _voronoi_regions(points)
        except QhullError as e:
            if seeds is not None:
                raise MeshValidationError('M01407', f'Degenerate Voronoi diagram: {e}')
            logger.warning('Resampling Voronoi seeds [%d]: %s', attempt, e)
            continue

        vertices, cells = _merge_vertices(vertices, regions)
        vertices = np.where(np.abs(vertices) < SNAP_TOLERANCE, 0.0, vertices)
        vertices = np.where(np.abs(vertices - 1.0) < SNAP_TOLERANCE, 1.0, vertices)
        vertices = _sine_distortion(vertices, amplitude)
        return PolygonalMesh(vertices, cells)

    raise MeshValidationError('M01408', f'Unable to build a Voronoi mesh from {n_seeds} seeds')
