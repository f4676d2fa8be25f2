import numpy as np
import pytest

from fluvius_navem.exceptions import ExpansionSizeError, PhiFitError
from fluvius_navem.harmonic import (
    ElementSpace, HarmonicBasis, build_local_space, eval_expansion, eval_expansion_gradient, eval_harmonic, fit_phi,
    load_phi, save_phi, vertex_frame)
from fluvius_navem.mesh import build_reference_map, polygon_geometry

PENTAGON = [[0.0, 0.0], [1.0, 0.1], [1.3, 0.9], [0.5, 1.4], [-0.2, 0.8]]


def _fd_gradient(func, points, step=1e-6):
    columns = []
    for axis in range(2):
        shift = np.zeros(2)
        shift[axis] = step
        columns.append((func(points + shift) - func(points - shift)) / (2 * step))
    return np.stack(columns, axis=-1)


def _laplacian(func, point, step=1e-3):
    total = -4 * func(point[None])
    for shift in ([step, 0], [-step, 0], [0, step], [0, -step]):
        total = total + func(point[None] + np.array(shift))
    return total / step ** 2


def test_harmonic_basis_members():
    basis = HarmonicBasis(max_order=4, half_width=3.0)
    assert basis.size == 9
    values, _ = basis.evaluate([[1.5, 0.0]])
    np.testing.assert_allclose(values[0, :3], [1.0, 0.5, 0.0])
    np.testing.assert_allclose(values[0, 3:5], [0.25, 0.0])

    with pytest.raises(ExpansionSizeError):
        eval_harmonic(basis, 9, [0.0, 0.0])


def test_harmonic_basis_gradients():
    basis = HarmonicBasis(max_order=6)
    points = np.random.default_rng(0).uniform(-1.5, 1.5, size=(10, 2))
    _, gradients = basis.evaluate(points)
    numeric = _fd_gradient(lambda p: basis.evaluate(p)[0], points)
    np.testing.assert_allclose(gradients, numeric, atol=1e-8)


def test_harmonic_members_are_harmonic():
    basis = HarmonicBasis(max_order=5)
    point = np.array([0.4, -0.7])
    np.testing.assert_allclose(_laplacian(lambda p: basis.evaluate(p)[0], point), 0.0, atol=1e-5)


def test_phi_matches_the_hat(phi):
    assert phi.boundary_residual < 1e-2
    points = np.array([[1.0, 0.5], [1.0, -0.25], [0.3, 1.0], [-1.0, 0.2], [0.0, -1.0]])
    np.testing.assert_allclose(phi(points), [0.5, 0.75, 0.0, 0.0, 0.0], atol=1e-2)


def test_phi_gradient(phi):
    points = np.array([[0.2, 0.3], [-0.5, 0.1], [0.6, -0.6]])
    _, gradients = phi.evaluate(points)
    np.testing.assert_allclose(gradients, _fd_gradient(phi, points, step=1e-5), rtol=1e-5, atol=1e-5)


def test_phi_file(tmp_path, phi):
    path = tmp_path / "phi.txt"
    save_phi(phi, path)
    loaded = load_phi(path)
    np.testing.assert_array_equal(loaded.coefficients, phi.coefficients)
    assert loaded.n_poles == phi.n_poles

    path.write_text("phi-fit 1\n2\n1\n0.5\n")
    with pytest.raises(PhiFitError):
        load_phi(path)


def test_phi_needs_enough_samples():
    with pytest.raises(PhiFitError):
        fit_phi(n_poles=20, n_polys=10, n_samples=30)


def test_vertex_frame_points_to_the_centroid():
    reference = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2)
    for j in range(4):
        rotated = vertex_frame(reference, j) @ (-reference[j])
        np.testing.assert_allclose(rotated, [1.0, 0.0], atol=1e-15)


def test_element_space_gradients(phi):
    geom = polygon_geometry(PENTAGON)
    space = ElementSpace(geom, build_reference_map(geom), phi, HarmonicBasis(max_order=5))
    points = geom.centroid + np.array([[0.1, 0.05], [-0.2, 0.1], [0.05, -0.3]])

    _, h_gradients = space.harmonic(points, 2)
    np.testing.assert_allclose(h_gradients, _fd_gradient(lambda p: space.harmonic(p, 2)[0], points), atol=1e-7)

    _, a_gradients = space.auxiliary(points)
    np.testing.assert_allclose(a_gradients, _fd_gradient(lambda p: space.auxiliary(p)[0], points, step=1e-5),
                               rtol=1e-5, atol=1e-5)


def test_auxiliary_functions_follow_their_anchor(phi):
    geom = polygon_geometry(PENTAGON)
    space = ElementSpace(geom, build_reference_map(geom), phi)
    values, _ = space.auxiliary(geom.vertices)
    np.testing.assert_allclose(np.diag(values), 1.0, atol=1e-2)


def test_local_space(phi):
    geom = polygon_geometry(PENTAGON)
    rmap = build_reference_map(geom)
    space = build_local_space(geom, rmap, 1, phi, HarmonicBasis(max_order=4))
    assert space.dim == 9 + 3
    assert space.anchors == [0, 1, 2]

    coeffs = np.zeros(space.dim)
    coeffs[0] = 2.0
    points = geom.vertices
    np.testing.assert_allclose(eval_expansion(space, coeffs, points), 2.0)
    np.testing.assert_allclose(eval_expansion_gradient(space, coeffs, points), 0.0)

    with pytest.raises(ExpansionSizeError):
        eval_expansion(space, np.zeros(3), points)
    with pytest.raises(ExpansionSizeError):
        build_local_space(geom, rmap, 5, phi)
