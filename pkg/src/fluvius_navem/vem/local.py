import numpy as np

from ..exceptions import NonPositiveJacobian
from ..material import ConstitutiveLaw
from ..status import DeterminantMode, EvaluationState, StabilizationKind
from .operators import VemElementOperators
from .stabilization import StabilizationPolicy, stabilization_scale


def displaced_area(ops: VemElementOperators, u_local):
    """ Area of the polygon of displaced vertices and its derivative with respect to the local dofs. """
    u = np.asarray(u_local, dtype=float).reshape(2, ops.n_vertices)
    x = ops.geom.vertices[:, 0] + u[0]
    y = ops.geom.vertices[:, 1] + u[1]
    area = 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    derivative = 0.5 * np.concatenate([np.roll(y, -1) - np.roll(y, 1), np.roll(x, 1) - np.roll(x, -1)])
    return area, derivative


def vem_determinant(mode: DeterminantMode, ops: VemElementOperators, u_local):
    """ J ≈ det(I + Π⁰₀∇u) or the mean value |Ẽ|/|E| over the element. """
    if mode == DeterminantMode.MEAN_VALUE:
        J = displaced_area(ops, u_local)[0] / ops.geom.area
    else:
        J = float(np.linalg.det(np.eye(2) + ops.constant_gradient(u_local)))

    if J <= 0:
        raise NonPositiveJacobian('S01201', f'Non-positive Jacobian J = {J:.6e}', jacobian=J, element=ops.geom.label)
    return J


def _consistency(ops, law, gradient, jacobian):
    pg = ops.projected_gradient
    area = ops.geom.area
    stress = law.stress(gradient, jacobian=jacobian)
    modulus = law.tangent(gradient, jacobian=jacobian)
    residual = area * (stress @ pg.T).ravel()
    tangent = area * np.einsum('cbdl,ib,jl->cidj', modulus, pg, pg).reshape(2 * ops.n_vertices, 2 * ops.n_vertices)
    return residual, tangent, modulus


def vem_local_tangent(
        ops: VemElementOperators, law: ConstitutiveLaw, u_local, stab: StabilizationPolicy, w_local=None,
        determinant: DeterminantMode = DeterminantMode.PROJECTED_CONSTANT):
    """
    Local tangent and internal residual of the VEM form: the consistency part at Π⁰₀∇u plus
    α_E(w_h) S^E applied to both displacement components.
    """
    n = ops.n_vertices
    u_local = np.asarray(u_local, dtype=float)
    mean_value = determinant == DeterminantMode.MEAN_VALUE and law.uses_jacobian
    gradient = ops.constant_gradient(u_local)

    jacobian = None
    if mean_value:
        jacobian = vem_determinant(DeterminantMode.MEAN_VALUE, ops, u_local)

    try:
        residual, tangent, _ = _consistency(ops, law, gradient, jacobian)
    except NonPositiveJacobian as e:
        raise NonPositiveJacobian('V01201', str(e), jacobian=e.jacobian, element=ops.geom.label) from e

    if mean_value:
        _, d_area = displaced_area(ops, u_local)
        FinvT = law.inverse_transpose(gradient)
        coupling = ops.geom.area * (FinvT @ ops.projected_gradient.T).ravel()
        slope = law.volumetric_stiffness(jacobian)
        tangent = tangent + slope * np.outer(coupling, d_area / ops.geom.area)

    if stab.evaluation_state == EvaluationState.ZERO or w_local is None:
        w_local = np.zeros(2 * n)
    w_gradient = ops.constant_gradient(w_local)
    w_jacobian = vem_determinant(DeterminantMode.MEAN_VALUE, ops, w_local) if mean_value else None
    if stab.kind == StabilizationKind.STIFFNESS_BASED:
        _, w_tangent, w_modulus = _consistency(ops, law, w_gradient, w_jacobian)
    else:
        w_tangent, w_modulus = None, law.tangent(w_gradient, jacobian=w_jacobian)
    alpha = stabilization_scale(stab, w_modulus, w_tangent)

    stabilizer = np.kron(np.eye(2), ops.stabilization)
    return tangent + alpha * stabilizer, residual + alpha * stabilizer @ u_local


def vem_load(ops: VemElementOperators, force_integral):
    """ (f, Π⁰₀φ_i) for every local dof, given ∫_E f of shape (2,). """
    return np.outer(np.asarray(force_integral, dtype=float), ops.projector[0]).ravel()
