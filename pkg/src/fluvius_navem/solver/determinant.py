import numpy as np

from ..exceptions import NonPositiveJacobian
from ..vem.local import vem_determinant


def navem_determinant(grad_u, element=None):
    """ J = det(I + ∇u) at every quadrature point; the point with the smallest J ≤ 0 is named in the error. """
    J = np.linalg.det(np.eye(2) + np.asarray(grad_u, dtype=float))
    if np.any(J <= 0):
        point = int(np.argmin(J))
        worst = float(J.flat[point])
        where = '' if element is None else f' in element [{element}] at quadrature point [{point}]'
        raise NonPositiveJacobian(
            'S01202', f'Non-positive Jacobian J = {worst:.6e}{where}', jacobian=worst, element=element)
    return J


__all__ = ["navem_determinant", "vem_determinant"]
