from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .. import config, logger
from ..exceptions import DegenerateElementError, MeshValidationError
from ..status import BoundaryMarker

DUPLICATE_TOLERANCE = 1e-12
AREA_TOLERANCE = 1e-14


def edge_key(a, b):
    return (a, b) if a < b else (b, a)


def signed_area(vertices):
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def _is_simple(vertices):
    k = len(vertices)
    for a in range(k):
        for b in range(a + 2, k):
            if a == 0 and b == k - 1:
                continue
            if _segments_cross(vertices[a], vertices[(a + 1) % k], vertices[b], vertices[(b + 1) % k]):
                return False
    return True


@dataclass(frozen=True)
class PolygonalMesh:
    """
    Tessellation of a planar domain into counter-clockwise polygonal cells.

    Boundary edges without an explicit marker are Neumann edges. Marker keys are
    vertex-index pairs in ascending order.
    """
    vertices: np.ndarray
    cells: tuple
    boundary_markers: Mapping = field(default_factory=dict)

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float).reshape(-1, 2)
        vertices.setflags(write=False)
        cells = tuple(tuple(int(i) for i in cell) for cell in self.cells)
        markers = {edge_key(int(a), int(b)): BoundaryMarker(m) for (a, b), m in dict(self.boundary_markers).items()}

        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'cells', cells)
        object.__setattr__(self, 'boundary_markers', markers)
        self._validate()

    def _validate(self):
        n_vertices = len(self.vertices)
        for index, cell in enumerate(self.cells):
            if len(cell) < 3:
                raise MeshValidationError(
                    'M01101', f'Cell [{index}] has {len(cell)} vertices, at least 3 are required')

            if len(set(cell)) != len(cell):
                raise MeshValidationError('M01102', f'Cell [{index}] repeats a vertex: {cell}')

            if min(cell) < 0 or max(cell) >= n_vertices:
                raise MeshValidationError('M01103', f'Cell [{index}] references an unknown vertex: {cell}')

            polygon = self.vertices[list(cell)]
            if signed_area(polygon) <= AREA_TOLERANCE * self.domain_diameter ** 2:
                raise MeshValidationError('M01104', f'Cell [{index}] is not counter-clockwise or has no area')

            if len(cell) > 3 and not _is_simple(polygon):
                raise MeshValidationError('M01105', f'Cell [{index}] is self-intersecting')

        for edge, owners in self.edge_cells.items():
            if len(owners) > 2:
                raise MeshValidationError('M01106', f'Edge {edge} is shared by {len(owners)} cells')

        for edge in self.boundary_markers:
            if len(self.edge_cells.get(edge, ())) != 1:
                raise MeshValidationError('M01107', f'Marker on edge {edge} which is not a boundary edge')

        pairs = cKDTree(self.vertices).query_pairs(DUPLICATE_TOLERANCE * self.domain_diameter)
        if pairs:
            raise MeshValidationError('M01108', f'Duplicate vertices: {sorted(pairs)[:5]}')

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_cells(self):
        return len(self.cells)

    @cached_property
    def domain_diameter(self):
        # Bounding-box diagonal, an upper bound of the true diameter.
        return float(np.hypot(*np.ptp(self.vertices, axis=0))) or 1.0

    @cached_property
    def edge_cells(self):
        owners = {}
        for index, cell in enumerate(self.cells):
            for a, b in zip(cell, cell[1:] + cell[:1]):
                owners.setdefault(edge_key(a, b), []).append(index)
        return owners

    @cached_property
    def boundary_edges(self):
        """ Boundary edges oriented as in their owning cell, i.e. with the domain on the left. """
        edges = []
        for cell in self.cells:
            for a, b in zip(cell, cell[1:] + cell[:1]):
                if len(self.edge_cells[edge_key(a, b)]) == 1:
                    edges.append((a, b))
        return tuple(edges)

    def marker(self, a, b):
        return self.boundary_markers.get(edge_key(a, b), BoundaryMarker.NEUMANN)

    @cached_property
    def boundary_vertices(self):
        return np.unique(np.array(self.boundary_edges, dtype=int).ravel())

    @cached_property
    def dirichlet_vertices(self):
        marked = [e for e in self.boundary_edges if self.marker(*e) == BoundaryMarker.DIRICHLET]
        if not marked:
            return np.zeros(0, dtype=int)
        return np.unique(np.array(marked, dtype=int).ravel())

    def neumann_edges(self):
        return [e for e in self.boundary_edges if self.marker(*e) == BoundaryMarker.NEUMANN]

    def cell_vertices(self, index):
        return self.vertices[list(self.cells[index])]

    @cached_property
    def mesh_size(self):
        return max(element_geometry(self, k).diameter for k in range(self.n_cells))

    def with_dirichlet(self, predicate: Optional[Callable] = None):
        """
        Return a copy with boundary edges marked Dirichlet where ``predicate(midpoint)`` holds
        (all boundary edges when no predicate is given) and Neumann elsewhere.
        """
        markers = {}
        for a, b in self.boundary_edges:
            midpoint = 0.5 * (self.vertices[a] + self.vertices[b])
            dirichlet = True if predicate is None else bool(predicate(midpoint))
            markers[edge_key(a, b)] = BoundaryMarker.DIRICHLET if dirichlet else BoundaryMarker.NEUMANN
        return PolygonalMesh(self.vertices, self.cells, markers)


@dataclass(frozen=True)
class ElementGeometry:
    vertices: np.ndarray
    diameter: float
    centroid: np.ndarray
    area: float
    edge_lengths: np.ndarray
    normals: np.ndarray
    tangents: np.ndarray
    label: Optional[int] = None

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def perimeter(self):
        return float(self.edge_lengths.sum())


def polygon_geometry(vertices, label=None) -> ElementGeometry:
    vertices = np.array(vertices, dtype=float)
    x, y = vertices[:, 0], vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()

    diameter = float(pdist(vertices).max()) if len(vertices) > 1 else 0.0
    if len(vertices) < 3 or diameter <= 0.0 or area <= AREA_TOLERANCE * diameter ** 2:
        raise DegenerateElementError('M01201', f'Degenerate cell [{label}]: area {area:.3e}, diameter {diameter:.3e}')

    centroid = np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6.0 * area)

    edges = np.roll(vertices, -1, axis=0) - vertices
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    if lengths.min() <= DUPLICATE_TOLERANCE * diameter:
        raise DegenerateElementError('M01202', f'Degenerate cell [{label}]: zero-length edge')

    tangents = edges / lengths[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])
    for arr in (vertices, centroid, lengths, tangents, normals):
        arr.setflags(write=False)

    return ElementGeometry(
        vertices=vertices, diameter=diameter, centroid=centroid, area=float(area),
        edge_lengths=lengths, normals=normals, tangents=tangents, label=label)


def element_geometry(mesh: PolygonalMesh, cell_index: int) -> ElementGeometry:
    if not 0 <= cell_index < mesh.n_cells:
        raise MeshValidationError('M01203', f'Invalid cell index [{cell_index}] for a mesh of {mesh.n_cells} cells')
    return polygon_geometry(mesh.cell_vertices(cell_index), label=cell_index)


@dataclass(frozen=True)
class ReferenceMap:
    """ x̂ = rotation · (x − translation) · scale """
    scale: float
    rotation: np.ndarray
    translation: np.ndarray

    @property
    def jacobian(self):
        return self.scale * self.rotation

    def to_reference(self, points):
        return self.scale * (np.asarray(points, dtype=float) - self.translation) @ self.rotation.T

    def to_physical(self, points):
        return np.asarray(points, dtype=float) @ self.rotation / self.scale + self.translation


def build_reference_map(geom: ElementGeometry, half_width=None) -> ReferenceMap:
    half_width = config.REFERENCE_HALF_WIDTH if half_width is None else half_width
    rmap = ReferenceMap(scale=2.0 / geom.diameter, rotation=np.eye(2), translation=geom.centroid.copy())
    image = rmap.to_reference(geom.vertices)
    if np.abs(image).max() > half_width:
        logger.warning('Reference image of cell [%s] leaves the reference square: %.3f',
                       geom.label, np.abs(image).max())
    return rmap
