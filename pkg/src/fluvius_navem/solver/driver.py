from dataclasses import dataclass

import numpy as np

from .. import logger
from ..mesh import locate_points
from .assembly import DofMap, ElasticityProblem, ElementKernel, NavemKernel, assemble, traction_load
from .newton import NewtonDriver, SolveReport, newton_solve


@dataclass
class Solution:
    problem: ElasticityProblem
    kernel: ElementKernel
    dofmap: DofMap
    displacement: np.ndarray
    report: SolveReport

    @property
    def mesh(self):
        return self.problem.mesh

    def local_dofs(self, k):
        return self.displacement[list(self.mesh.cells[k])]

    def evaluate(self, points):
        """ Discrete displacement at arbitrary points: the NAVEM expansion, or Π∇₁u_h for VEM. """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        owner = locate_points(self.mesh, points)
        values = np.full((len(points), 2), np.nan)
        for k in np.unique(owner[owner >= 0]):
            mask = owner == k
            U = self.local_dofs(k)
            if isinstance(self.kernel, NavemKernel):
                basis_values, _ = self.kernel.elements[k].basis.evaluate(points[mask])
                values[mask] = basis_values @ U
            else:
                ops, _ = self.kernel.elements[k]
                values[mask] = ops.projection(U.T.ravel(), points[mask])
        return values


def solve(problem: ElasticityProblem, kernel: ElementKernel, driver: NewtonDriver = None, threads=1) -> Solution:
    driver = driver or NewtonDriver()
    dofmap = DofMap(problem.mesh)
    loads = traction_load(problem)

    def assemble_system(u, w, scale):
        system = assemble(
            kernel, dofmap, dofmap.expand(u, problem.dirichlet), dofmap.expand(w, problem.dirichlet),
            scale, nodal_loads=loads, threads=threads)
        return system.matrix, system.residual

    logger.info('Solving %s on %d cells with %d dofs', type(kernel).__name__, problem.mesh.n_cells, dofmap.n_dofs)
    report = newton_solve(driver, assemble_system, np.zeros(dofmap.n_dofs))
    return Solution(problem, kernel, dofmap, dofmap.expand(report.dofs, problem.dirichlet), report)
