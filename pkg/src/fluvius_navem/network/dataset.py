from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

from .. import config, logger
from ..exceptions import ConfigurationError, DegenerateElementError, ModelFormatError, ReferenceContainmentError
from ..harmonic import ElementSpace, HarmonicBasis, PhiFit
from ..mesh import build_reference_map, generate_voronoi_mesh, polygon_geometry
from ..status import NetworkTarget
from .encoding import encode_element
from .trace import CompressedTrace, TraceSystem, compress, trace_systems

POLYSET_HEADER = "poly-set 1"
UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
CONVEXITY_TOLERANCE = 1e-8
MAX_HARVEST_MESHES = 1000


def is_strictly_convex(vertices):
    """ Counter-clockwise with every interior angle strictly below π. """
    vertices = np.asarray(vertices, dtype=float)
    before = vertices - np.roll(vertices, 1, axis=0)
    after = np.roll(vertices, -1, axis=0) - vertices
    cross = before[:, 0] * after[:, 1] - before[:, 1] * after[:, 0]
    scale = np.ptp(vertices, axis=0).max() ** 2
    return bool(np.all(cross > CONVEXITY_TOLERANCE * scale))


def generate_rdqm(size: int = None, seed: int = 0, distortion: float = None) -> List[np.ndarray]:
    """ Unit squares with every corner coordinate moved uniformly by at most ``distortion``; strictly convex only. """
    size = config.DATASET_SIZE if size is None else size
    distortion = config.QUAD_DISTORTION if distortion is None else distortion
    rng = np.random.default_rng(seed)
    polygons, rejected = [], 0
    while len(polygons) < size:
        quad = UNIT_SQUARE + rng.uniform(-distortion, distortion, size=(4, 2))
        if is_strictly_convex(quad):
            polygons.append(quad)
        else:
            rejected += 1

    if rejected:
        logger.warning('RDQM dataset: rejected %d quadrilaterals that are not strictly convex', rejected)
    logger.info('Generated RDQM dataset of %d quadrilaterals (seed %d)', size, seed)
    return polygons


def generate_vm(n_vertices: int, size: int = None, seed: int = 0, n_seeds: int = 64,
                lloyd_iters: int = 0) -> List[np.ndarray]:
    """ Cells with exactly ``n_vertices`` vertices harvested from successive undistorted Voronoi meshes. """
    size = config.DATASET_SIZE if size is None else size
    polygons = []
    for offset in range(MAX_HARVEST_MESHES):
        mesh = generate_voronoi_mesh(n_seeds, lloyd_iters=lloyd_iters, seed=seed + offset, amplitude=0.0)
        for k in range(mesh.n_cells):
            if len(mesh.cells[k]) != n_vertices:
                continue
            cell = mesh.cell_vertices(k)
            if is_strictly_convex(cell):
                polygons.append(cell.copy())
            if len(polygons) == size:
                logger.info('Generated VM dataset of %d polygons with %d vertices from %d meshes',
                            size, n_vertices, offset + 1)
                return polygons

    raise ConfigurationError(
        'N01202', f'Only {len(polygons)} of {size} Voronoi cells with {n_vertices} vertices '
                  f'found in {MAX_HARVEST_MESHES} meshes')


def generate_dataset(n_vertices: int, size: int = None, seed: int = 0, **kwargs) -> List[np.ndarray]:
    """ RDQM for quadrilaterals, VM for larger classes. """
    if n_vertices == 4:
        return generate_rdqm(size, seed, **kwargs)
    if n_vertices > 4:
        return generate_vm(n_vertices, size, seed, **kwargs)
    raise ConfigurationError('N01203', f'No training dataset for polygons with {n_vertices} vertices')


def save_polygons(polygons, path):
    lines = [POLYSET_HEADER, str(len(polygons))]
    for polygon in polygons:
        polygon = np.asarray(polygon, dtype=float)
        lines.append(" ".join([str(len(polygon))] + [f"{v:.17g}" for v in polygon.ravel()]))
    Path(path).write_text("\n".join(lines) + "\n")


def load_polygons(path) -> List[np.ndarray]:
    lines = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines or " ".join(lines[0]) != POLYSET_HEADER:
        raise ModelFormatError('N01501', f'Line 1: expected header {POLYSET_HEADER!r}')
    try:
        count = int(lines[1][0])
        polygons = []
        for lineno, tokens in enumerate(lines[2:], start=3):
            n = int(tokens[0])
            if len(tokens) != 2 * n + 1:
                raise ModelFormatError(
                    'N01502', f'Line {lineno}: polygon declares {n} vertices, lists {len(tokens) - 1} values')
            polygons.append(np.array([float(v) for v in tokens[1:]]).reshape(n, 2))
    except (IndexError, ValueError) as e:
        raise ModelFormatError('N01503', f'Malformed polygon set {path}: {e}')

    if len(polygons) != count:
        raise ModelFormatError('N01504', f'Polygon set declares {count} polygons, contains {len(polygons)}')
    return polygons


@dataclass(frozen=True)
class TrainingSet:
    """
    One sample per (vertex, polygon): the encoding of the vertex and the compressed boundary
    misfit systems of the φ and q targets.
    """
    n_vertices: int
    max_order: int
    polygons: List[np.ndarray]
    inputs: np.ndarray
    value: CompressedTrace
    gradient: CompressedTrace
    polygon_index: np.ndarray

    @property
    def size(self):
        return len(self.inputs)

    def trace(self, target):
        return self.value if NetworkTarget(target) == NetworkTarget.VALUE else self.gradient

    def take(self, index):
        index = np.asarray(index)
        return TrainingSet(
            n_vertices=self.n_vertices, max_order=self.max_order, polygons=self.polygons,
            inputs=self.inputs[index], value=self.value.take(index), gradient=self.gradient.take(index),
            polygon_index=self.polygon_index[index])


def build_training_set(polygons, phi: PhiFit, basis: HarmonicBasis = None, n_points: int = None,
                       normalize: bool = True) -> TrainingSet:
    """
    Encodings and misfit systems of every vertex of every polygon. With ``normalize`` the polygons are
    first mapped to the reference frame, so that losses are measured on the shapes the network sees.
    """
    basis = basis or HarmonicBasis()
    if not polygons:
        raise ConfigurationError('N01204', 'Empty polygon set')
    n_vertices = len(polygons[0])

    kept, inputs, phi_systems, q_systems, owners = [], [], [], [], []
    for index, polygon in enumerate(polygons):
        if len(polygon) != n_vertices:
            raise ConfigurationError(
                'N01205', f'Polygon [{index}] has {len(polygon)} vertices in a set of {n_vertices}-gons')
        try:
            geom = polygon_geometry(polygon, label=index)
            if normalize:
                geom = polygon_geometry(build_reference_map(geom).to_reference(geom.vertices), label=index)
            rmap = build_reference_map(geom)
            space = ElementSpace(geom, rmap, phi, basis)
            phi_system, q_system = trace_systems(space, n_points)
        except (DegenerateElementError, ReferenceContainmentError) as e:
            logger.warning('Skipping polygon [%d]: %s', index, e)
            continue

        kept.append(np.asarray(polygon, dtype=float))
        inputs.append(encode_element(geom, rmap))
        phi_systems.append(phi_system)
        q_systems.append(q_system)
        owners.append(np.full(n_vertices, len(kept) - 1))

    if not kept:
        raise ConfigurationError('N01206', 'No usable polygon in the set')

    def stacked(systems):
        matrix = np.concatenate([s.matrix for s in systems])
        target = np.concatenate([s.target for s in systems])
        return compress(TraceSystem(matrix, target))

    logger.info('Built training set: %d polygons with %d vertices, %d samples',
                len(kept), n_vertices, len(kept) * n_vertices)
    return TrainingSet(
        n_vertices=n_vertices, max_order=basis.max_order, polygons=kept, inputs=np.vstack(inputs),
        value=stacked(phi_systems), gradient=stacked(q_systems), polygon_index=np.concatenate(owners))
