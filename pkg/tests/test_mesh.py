import numpy as np
import pytest

from fluvius_navem.exceptions import DegenerateElementError, MeshFormatError, MeshValidationError
from fluvius_navem.mesh import (
    PolygonalMesh, build_reference_map, element_geometry, generate_cartesian_mesh, generate_distorted_quad_mesh,
    generate_voronoi_mesh, load_mesh, locate_points, polygon_geometry, save_mesh, slice_points)
from fluvius_navem.status import BoundaryMarker


def _areas(mesh):
    return np.array([element_geometry(mesh, k).area for k in range(mesh.n_cells)])


def test_cartesian_mesh(square_mesh):
    assert square_mesh.n_cells == 16
    assert square_mesh.n_vertices == 25
    assert square_mesh.mesh_size == pytest.approx(np.sqrt(2) / 4)
    np.testing.assert_allclose(_areas(square_mesh), 1.0 / 16)
    assert len(square_mesh.boundary_edges) == 16


def test_unit_square_geometry():
    geom = polygon_geometry([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert geom.area == pytest.approx(1.0)
    assert geom.diameter == pytest.approx(np.sqrt(2))
    assert geom.perimeter == pytest.approx(4.0)
    np.testing.assert_allclose(geom.centroid, [0.5, 0.5])
    np.testing.assert_allclose(geom.normals[0], [0.0, -1.0])


def test_distorted_quads_keep_the_domain(quad_mesh):
    vertices = quad_mesh.vertices
    assert _areas(quad_mesh).sum() == pytest.approx(1.0)
    assert np.all(_areas(quad_mesh) > 0)
    for corner in ([0, 0], [1, 0], [1, 1], [0, 1]):
        assert np.min(np.linalg.norm(vertices - corner, axis=1)) == 0.0

    boundary = vertices[quad_mesh.boundary_vertices]
    on_side = np.minimum.reduce([boundary[:, 0], 1 - boundary[:, 0], boundary[:, 1], 1 - boundary[:, 1]])
    np.testing.assert_allclose(on_side, 0.0, atol=1e-15)


def test_distorted_quads_are_reproducible():
    a = generate_distorted_quad_mesh(5, seed=11)
    b = generate_distorted_quad_mesh(5, seed=11)
    np.testing.assert_array_equal(a.vertices, b.vertices)
    assert not np.array_equal(a.vertices, generate_distorted_quad_mesh(5, seed=12).vertices)


def test_zero_distortion_is_cartesian():
    np.testing.assert_array_equal(generate_distorted_quad_mesh(4, distortion=0.0, seed=5).vertices,
                                  generate_cartesian_mesh(4).vertices)


def test_voronoi_mesh_tiles_the_square(voronoi_mesh):
    assert voronoi_mesh.n_cells == 16
    assert _areas(voronoi_mesh).sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all(voronoi_mesh.vertices >= -1e-12) and np.all(voronoi_mesh.vertices <= 1 + 1e-12)


def test_triangle_mesh(triangle_mesh):
    assert triangle_mesh.n_cells == 32
    assert all(len(cell) == 3 for cell in triangle_mesh.cells)


def test_invalid_cells():
    vertices = [[0, 0], [1, 0], [1, 1], [0, 1]]
    with pytest.raises(MeshValidationError):
        PolygonalMesh(vertices, [(0, 3, 2, 1)])
    with pytest.raises(MeshValidationError):
        PolygonalMesh(vertices, [(0, 1)])
    with pytest.raises(MeshValidationError):
        PolygonalMesh(vertices, [(0, 1, 4)])
    with pytest.raises(DegenerateElementError):
        polygon_geometry([[0, 0], [1, 0], [2, 0]])


def test_grid_parameters_are_checked():
    with pytest.raises(MeshValidationError):
        generate_distorted_quad_mesh(1)
    with pytest.raises(MeshValidationError):
        generate_distorted_quad_mesh(4, distortion=1.5)
    with pytest.raises(MeshValidationError):
        generate_voronoi_mesh(2)


def test_dirichlet_markers(square_mesh):
    mesh = square_mesh.with_dirichlet(lambda m: m[0] < 1e-12)
    assert sum(1 for m in mesh.boundary_markers.values() if m == BoundaryMarker.DIRICHLET) == 4
    assert len(mesh.neumann_edges()) == 12
    np.testing.assert_allclose(mesh.vertices[mesh.dirichlet_vertices][:, 0], 0.0)


def test_mesh_file(tmp_path, voronoi_mesh):
    mesh = voronoi_mesh.with_dirichlet(lambda m: m[1] < 1e-12)
    path = tmp_path / "mesh.txt"
    save_mesh(mesh, path)
    loaded = load_mesh(path)
    np.testing.assert_array_equal(loaded.vertices, mesh.vertices)
    assert loaded.cells == mesh.cells
    assert loaded.boundary_markers == mesh.boundary_markers


def test_malformed_mesh_file(tmp_path):
    path = tmp_path / "mesh.txt"
    path.write_text("poly-mesh 1\n3 1 0\n0 0\n1 0\n0 1\n4 0 1 2\n")
    with pytest.raises(MeshFormatError):
        load_mesh(path)

    path.write_text("mesh\n")
    with pytest.raises(MeshFormatError):
        load_mesh(path)


def test_reference_map(quad_mesh):
    geom = element_geometry(quad_mesh, 5)
    rmap = build_reference_map(geom)
    reference = rmap.to_reference(geom.vertices)
    assert np.max(np.linalg.norm(reference[:, None] - reference[None], axis=-1)) == pytest.approx(2.0)
    np.testing.assert_allclose(rmap.to_physical(reference), geom.vertices, atol=1e-14)


def test_locate_points(voronoi_mesh):
    centroids = np.array([element_geometry(voronoi_mesh, k).centroid for k in range(voronoi_mesh.n_cells)])
    np.testing.assert_array_equal(locate_points(voronoi_mesh, centroids), np.arange(voronoi_mesh.n_cells))

    owner = locate_points(voronoi_mesh, slice_points(0.5, 50))
    assert np.all(owner >= 0)
    assert locate_points(voronoi_mesh, [[2.0, 2.0]])[0] == -1
