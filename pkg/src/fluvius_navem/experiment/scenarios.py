from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .. import config
from ..material import (
    BubbleField, ConstitutiveLaw, DisplacementField, LinearLame, NeoHookean, StrainDependent, boundary_traction,
    manufactured_body_force)
from ..mesh import (
    PolygonalMesh, generate_cartesian_mesh, generate_distorted_quad_mesh, generate_triangle_mesh,
    generate_voronoi_mesh)
from ..solver import ElasticityProblem
from ..status import DeterminantMode, EvaluationState, MeshFamily, Scenario, StabilizationKind
from ..vem import StabilizationPolicy

EDGE_TOLERANCE = 1e-12
VORONOI_SEEDS = (16, 64, 256, 1024)
GRID_SIZES = (4, 8, 16, 32)


@dataclass(frozen=True)
class ScenarioSetup:
    """ Material, data and default discretization of one test. """
    scenario: Scenario
    law: ConstitutiveLaw
    solution: Optional[DisplacementField]
    body_force: Callable
    dirichlet_edges: Optional[Callable]
    n_increments: int
    tol: float
    mesh_family: MeshFamily
    mesh_sizes: Tuple[int, ...]
    stabilization: StabilizationPolicy
    determinant: DeterminantMode = DeterminantMode.PROJECTED_CONSTANT
    mesh_lloyd: int = 0
    slice_component: Optional[int] = None
    with_traction: bool = False

    @property
    def has_exact_solution(self):
        return self.solution is not None

    def problem(self, mesh: PolygonalMesh, keep_markers: bool = False) -> ElasticityProblem:
        """ With ``keep_markers`` the boundary markers stored on ``mesh`` win over the test's own. """
        if not (keep_markers and mesh.boundary_markers):
            mesh = mesh.with_dirichlet(self.dirichlet_edges)
        return ElasticityProblem(
            mesh=mesh,
            law=self.law,
            body_force=self.body_force,
            traction=boundary_traction(self.law, self.solution) if self.with_traction else None,
            dirichlet=self.solution.value if self.solution is not None else None)

    def default_sizes(self, family: MeshFamily):
        if family == MeshFamily.TRIANGLE and not self.has_exact_solution:
            return (config.FEM_REFERENCE_GRID,)
        if family == self.mesh_family:
            return self.mesh_sizes
        return VORONOI_SEEDS if family == MeshFamily.VORONOI else GRID_SIZES


def _bottom_or_left(midpoint):
    return midpoint[1] < EDGE_TOLERANCE or midpoint[0] < EDGE_TOLERANCE


def _left(midpoint):
    return midpoint[0] < EDGE_TOLERANCE


def _cubic_shear_load(points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return np.column_stack([100.0 * points[:, 1] ** 3, np.zeros(len(points))])


def linear_setup():
    law = LinearLame(mu=1.5, lam=3.0)
    solution = BubbleField(amplitude=16.0, offset=1.1, direction=(1.0, 5.0))
    return ScenarioSetup(
        scenario=Scenario.TEST1, law=law, solution=solution,
        body_force=manufactured_body_force(law, solution), dirichlet_edges=_bottom_or_left,
        n_increments=1, tol=config.NEWTON_TOL, mesh_family=MeshFamily.DISTORTED_QUAD, mesh_sizes=GRID_SIZES,
        stabilization=StabilizationPolicy(kind=StabilizationKind.FIXED_SCALAR, value=2.0 * law.mu),
        with_traction=True)


def strain_dependent_setup(amplitude, scenario):
    law = StrainDependent()
    solution = BubbleField(amplitude=amplitude, direction=(1.0, 1.0))
    return ScenarioSetup(
        scenario=scenario, law=law, solution=solution,
        body_force=manufactured_body_force(law, solution), dirichlet_edges=None,
        n_increments=20, tol=config.NEWTON_TOL, mesh_family=MeshFamily.CARTESIAN, mesh_sizes=GRID_SIZES,
        stabilization=StabilizationPolicy(
            kind=StabilizationKind.NORM_BASED, evaluation_state=EvaluationState.PREVIOUS_INCREMENT),
        mesh_lloyd=5, slice_component=0)


def neo_hookean_setup():
    return ScenarioSetup(
        scenario=Scenario.TEST3, law=NeoHookean(mu=1.0, lam=5.1), solution=None,
        body_force=_cubic_shear_load, dirichlet_edges=_left,
        n_increments=50, tol=1e-9, mesh_family=MeshFamily.VORONOI, mesh_sizes=(256,),
        stabilization=StabilizationPolicy(
            kind=StabilizationKind.NORM_BASED, evaluation_state=EvaluationState.PREVIOUS_INCREMENT),
        determinant=DeterminantMode.MEAN_VALUE, mesh_lloyd=5, slice_component=1)


def scenario_setup(scenario: Scenario) -> ScenarioSetup:
    scenario = Scenario(scenario)
    if scenario == Scenario.TEST1:
        return linear_setup()
    if scenario == Scenario.TEST2_CASE1:
        return strain_dependent_setup(1.0, scenario)
    if scenario == Scenario.TEST2_CASE2:
        return strain_dependent_setup(80.0, scenario)
    return neo_hookean_setup()


def build_mesh(family: MeshFamily, size: int, seed: int = 0, distortion: float = None,
               lloyd_iters: int = 0) -> PolygonalMesh:
    """ ``size`` is the number of cells per side for grids and the number of seeds for Voronoi meshes. """
    family = MeshFamily(family)
    if family == MeshFamily.DISTORTED_QUAD:
        return generate_distorted_quad_mesh(size, distortion=distortion, seed=seed)
    if family == MeshFamily.CARTESIAN:
        return generate_cartesian_mesh(size)
    if family == MeshFamily.TRIANGLE:
        return generate_triangle_mesh(size)
    return generate_voronoi_mesh(size, lloyd_iters=lloyd_iters, seed=seed)
