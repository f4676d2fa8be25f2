from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.sparse import coo_matrix

from .. import config, logger
from ..exceptions import NonPositiveJacobian
from ..material import ConstitutiveLaw
from ..mesh import PolygonalMesh, build_reference_map, element_geometry
from ..status import DeterminantMode
from ..vem.local import vem_load, vem_local_tangent
from ..vem.operators import build_element_operators
from ..vem.stabilization import StabilizationPolicy
from .determinant import navem_determinant
from .quadrature import build_quadrature, gauss_interval


@dataclass(frozen=True)
class ElasticityProblem:
    """
    −∇·σ(∇u) = f in Ω, u = g on Γ_D, σ(∇u)·n = t on Γ_N.

    ``body_force(points)`` → (n, 2), ``traction(points, normals)`` → (n, 2) and
    ``dirichlet(points)`` → (n, 2); missing callables mean zero data.
    """
    mesh: PolygonalMesh
    law: ConstitutiveLaw
    body_force: Optional[Callable] = None
    traction: Optional[Callable] = None
    dirichlet: Optional[Callable] = None


class DofMap:
    """ Two dofs per free vertex, numbered 2·free_index + component. """

    def __init__(self, mesh: PolygonalMesh):
        self.mesh = mesh
        fixed = np.zeros(mesh.n_vertices, dtype=bool)
        fixed[mesh.dirichlet_vertices] = True
        self.fixed = fixed
        self.free_vertices = np.flatnonzero(~fixed)
        self.vertex_index = np.full(mesh.n_vertices, -1, dtype=int)
        self.vertex_index[self.free_vertices] = np.arange(len(self.free_vertices))

    @property
    def n_dofs(self):
        return 2 * len(self.free_vertices)

    def element_dofs(self, cell):
        """ Global dofs of the local x-block then y-block, -1 for eliminated ones. """
        index = self.vertex_index[list(cell)]
        dofs = np.concatenate([2 * index, 2 * index + 1])
        dofs[np.concatenate([index, index]) < 0] = -1
        return dofs

    def expand(self, u_free, dirichlet=None):
        """ Vertex displacements (n_vertices, 2) from the free dofs and the Dirichlet data. """
        displacement = np.zeros((self.mesh.n_vertices, 2))
        if dirichlet is not None and self.fixed.any():
            displacement[self.fixed] = dirichlet(self.mesh.vertices[self.fixed])
        displacement[self.free_vertices] = np.asarray(u_free, dtype=float).reshape(-1, 2)
        return displacement

    def restrict(self, displacement):
        return np.asarray(displacement, dtype=float)[self.free_vertices].ravel()


@dataclass
class GlobalSystem:
    matrix: object
    residual: np.ndarray
    dofmap: DofMap


def _raise_with_element(e, k):
    raise NonPositiveJacobian('S01301', f'{e} in element [{k}]', jacobian=e.jacobian, element=k) from e


class ElementKernel:
    """ Local tangent and residual, loads included, of one element for a given method. """

    def __init__(self, problem: ElasticityProblem, degree=None):
        self.problem = problem
        self.degree = degree

    @property
    def mesh(self):
        return self.problem.mesh

    def local_system(self, k, u_local, w_local, scale):
        raise NotImplementedError


@dataclass(frozen=True)
class NavemElementData:
    basis: object
    weights: np.ndarray
    points: np.ndarray
    values: np.ndarray
    gradients: np.ndarray
    force: np.ndarray


class NavemKernel(ElementKernel):
    """
    Pointwise assembly with explicit basis functions: values from the c^φ expansion test the
    load, gradients from the c^q expansion enter the stress and the tangent.
    """

    def __init__(self, problem: ElasticityProblem, predictor, degree=None, threads=1):
        super().__init__(problem, degree)
        self.predictor = predictor
        self.threads = threads

    def _element_data(self, k):
        geom = element_geometry(self.mesh, k)
        basis = self.predictor.predict_element(geom, build_reference_map(geom))
        rule = build_quadrature(geom, self.degree)
        values, gradients = basis.evaluate(rule.points)
        force = np.zeros((len(rule.points), 2))
        if self.problem.body_force is not None:
            force = np.asarray(self.problem.body_force(rule.points), dtype=float)
        return NavemElementData(basis, rule.weights, rule.points, values, gradients, force)

    @cached_property
    def elements(self):
        return _map_elements(self._element_data, self.mesh.n_cells, self.threads)

    def gradient_at(self, k, u_local):
        data = self.elements[k]
        return np.einsum('ci,qib->qcb', np.reshape(u_local, (2, -1)), data.gradients)

    def local_system(self, k, u_local, w_local, scale):
        data = self.elements[k]
        n = data.values.shape[1]
        gradient = self.gradient_at(k, u_local)
        law = self.problem.law
        if law.uses_jacobian:
            navem_determinant(gradient, element=k)
        try:
            stress = law.stress(gradient)
            modulus = law.tangent(gradient)
        except NonPositiveJacobian as e:
            _raise_with_element(e, k)

        w, Q = data.weights, data.gradients
        residual = np.einsum('q,qcb,qib->ci', w, stress, Q)
        residual -= scale * np.einsum('q,qc,qi->ci', w, data.force, data.values)
        tangent = np.einsum('q,qcbdl,qib,qjl->cidj', w, modulus, Q, Q)
        return tangent.reshape(2 * n, 2 * n), residual.ravel()


class VemKernel(ElementKernel):

    def __init__(self, problem: ElasticityProblem, policy: StabilizationPolicy,
                 determinant=DeterminantMode.PROJECTED_CONSTANT, degree=None, threads=1):
        super().__init__(problem, degree)
        self.policy = policy
        self.determinant = determinant
        self.threads = threads

    def _element_data(self, k):
        ops = build_element_operators(element_geometry(self.mesh, k))
        force = np.zeros(2)
        if self.problem.body_force is not None:
            rule = build_quadrature(ops.geom, self.degree)
            force = rule.integrate(np.asarray(self.problem.body_force(rule.points), dtype=float))
        return ops, force

    @cached_property
    def elements(self):
        return _map_elements(self._element_data, self.mesh.n_cells, self.threads)

    def local_system(self, k, u_local, w_local, scale):
        ops, force = self.elements[k]
        tangent, residual = vem_local_tangent(
            ops, self.problem.law, u_local, self.policy, w_local, determinant=self.determinant)
        return tangent, residual - scale * vem_load(ops, force)


def _map_elements(func, n_cells, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(func, range(n_cells)))
    return [func(k) for k in range(n_cells)]


def traction_load(problem: ElasticityProblem, n_points=None):
    """ Nodal loads of the traction on Neumann edges tested with the linear edge trace. """
    mesh = problem.mesh
    loads = np.zeros((mesh.n_vertices, 2))
    if problem.traction is None:
        return loads

    t, w = gauss_interval(config.EDGE_QUADRATURE_POINTS if n_points is None else n_points)
    for a, b in mesh.neumann_edges():
        pa, pb = mesh.vertices[a], mesh.vertices[b]
        edge = pb - pa
        length = np.hypot(*edge)
        normal = np.array([edge[1], -edge[0]]) / length
        points = pa + t[:, None] * edge
        values = np.asarray(problem.traction(points, np.tile(normal, (len(t), 1))), dtype=float)
        loads[a] += length * (w * (1.0 - t)) @ values
        loads[b] += length * (w * t) @ values
    return loads


def assemble(kernel: ElementKernel, dofmap: DofMap, displacement, w_displacement, scale,
             nodal_loads=None, threads=1) -> GlobalSystem:
    """
    Global tangent and residual r = internal − scale·(body + traction loads) on the free dofs.
    Local contributions are merged in element order for any thread count.
    """
    mesh = kernel.mesh
    displacement = np.asarray(displacement, dtype=float)
    w_displacement = displacement if w_displacement is None else np.asarray(w_displacement, dtype=float)

    def local(k):
        cell = list(mesh.cells[k])
        u_local = displacement[cell].T.ravel()
        w_local = w_displacement[cell].T.ravel()
        return kernel.local_system(k, u_local, w_local, scale)

    results = _map_elements(local, mesh.n_cells, threads)

    rows, cols, data = [], [], []
    residual = np.zeros(dofmap.n_dofs)
    for k, (tangent, local_residual) in enumerate(results):
        dofs = dofmap.element_dofs(mesh.cells[k])
        keep = dofs >= 0
        kept = dofs[keep]
        np.add.at(residual, kept, local_residual[keep])
        block = tangent[np.ix_(keep, keep)]
        rows.append(np.repeat(kept, len(kept)))
        cols.append(np.tile(kept, len(kept)))
        data.append(block.ravel())

    if nodal_loads is not None:
        residual -= scale * dofmap.restrict(nodal_loads)

    matrix = coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dofmap.n_dofs, dofmap.n_dofs)).tocsr()
    logger.debug('Assembled %d dofs over %d cells at scale %.3f', dofmap.n_dofs, mesh.n_cells, scale)
    return GlobalSystem(matrix=matrix, residual=residual, dofmap=dofmap)
