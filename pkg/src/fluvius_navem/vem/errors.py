import numpy as np

from ..mesh import PolygonalMesh, element_geometry
from ..solver.quadrature import build_quadrature
from .operators import build_element_operators


def vem_l2_and_h1_error(mesh: PolygonalMesh, u_exact, grad_u_exact, displacement, degree=None):
    """
    err₀ = ‖u − Π∇₁u_h‖ and err₁ = ‖∇u − Π⁰₀∇u_h‖ summed over the elements. Π∇₁ stands in
    for the L² projection of the enhanced space. ``displacement`` holds vertex values (n_vertices, 2).
    """
    displacement = np.asarray(displacement, dtype=float)
    err0 = err1 = 0.0
    for k in range(mesh.n_cells):
        ops = build_element_operators(element_geometry(mesh, k))
        rule = build_quadrature(ops.geom, degree)
        u_local = displacement[list(mesh.cells[k])].T.ravel()

        value_gap = u_exact(rule.points) - ops.projection(u_local, rule.points)
        gradient_gap = grad_u_exact(rule.points) - ops.constant_gradient(u_local)
        err0 += rule.weights @ np.sum(value_gap ** 2, axis=1)
        err1 += rule.weights @ np.sum(gradient_gap ** 2, axis=(1, 2))
    return float(np.sqrt(err0)), float(np.sqrt(err1))
