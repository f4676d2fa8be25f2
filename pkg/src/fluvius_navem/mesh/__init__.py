from .. import logger, config

from .model import (
    PolygonalMesh, ElementGeometry, ReferenceMap,
    element_geometry, polygon_geometry, build_reference_map, signed_area, edge_key)
from .generator import (
    generate_distorted_quad_mesh, generate_cartesian_mesh, generate_triangle_mesh, generate_voronoi_mesh)
from .io import load_mesh, save_mesh
from .locate import locate_points, slice_points

__all__ = [
    "build_reference_map",
    "edge_key",
    "element_geometry",
    "ElementGeometry",
    "generate_cartesian_mesh",
    "generate_distorted_quad_mesh",
    "generate_triangle_mesh",
    "generate_voronoi_mesh",
    "load_mesh",
    "locate_points",
    "polygon_geometry",
    "PolygonalMesh",
    "ReferenceMap",
    "save_mesh",
    "signed_area",
    "slice_points",
]
