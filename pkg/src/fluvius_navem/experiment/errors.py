import numpy as np

from ..mesh import PolygonalMesh, element_geometry
from ..solver import NavemKernel, Solution, build_quadrature
from ..vem import vem_l2_and_h1_error


def navem_errors(mesh: PolygonalMesh, bases, displacement, u_exact, grad_u_exact, degree=None):
    """
    err₀ = ‖u − u_h‖ and err₁ = ‖∇u − ∇u_h‖ by element quadrature, with u_h from the c^φ
    expansions and ∇u_h from the c^q expansions. ``displacement`` holds vertex values (n_vertices, 2).
    """
    displacement = np.asarray(displacement, dtype=float)
    err0 = err1 = 0.0
    for k in range(mesh.n_cells):
        rule = build_quadrature(element_geometry(mesh, k), degree)
        values, gradients = bases[k].evaluate(rule.points)
        U = displacement[list(mesh.cells[k])]
        u_h = values @ U
        grad_u_h = np.einsum('ic,qib->qcb', U, gradients)
        err0 += rule.weights @ np.sum((u_exact(rule.points) - u_h) ** 2, axis=1)
        err1 += rule.weights @ np.sum((grad_u_exact(rule.points) - grad_u_h) ** 2, axis=(1, 2))
    return float(np.sqrt(err0)), float(np.sqrt(err1))


def solution_errors(solution: Solution, u_exact, grad_u_exact, degree=None):
    """ The error pair matching the method of the solution's kernel. """
    if isinstance(solution.kernel, NavemKernel):
        bases = [data.basis for data in solution.kernel.elements]
        return navem_errors(solution.mesh, bases, solution.displacement, u_exact, grad_u_exact, degree)
    return vem_l2_and_h1_error(solution.mesh, u_exact, grad_u_exact, solution.displacement, degree)
