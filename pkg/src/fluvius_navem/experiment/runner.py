import time
from pathlib import Path

import numpy as np
from fluvius.error import UnprocessableError

from .. import config, logger
from ..harmonic import PhiFit, fit_phi, load_phi
from ..mesh import generate_triangle_mesh, slice_points
from ..network import ModelBank, NetworkPredictor, TraceFitPredictor, TrianglePredictor
from ..solver import NavemKernel, NewtonDriver, Solution, VemKernel, solve
from ..status import BasisSource, EvaluationState, MeshFamily, Method, Scenario
from ..vem import StabilizationPolicy
from .config import ExperimentSpec
from .errors import solution_errors
from .report import ErrorReport, RefinementRecord, write_report_csv, write_rows_csv
from .scenarios import ScenarioSetup, build_mesh, scenario_setup

PHI_FILENAME = "phi-fit.txt"


def load_or_fit_phi(models_dir=None) -> PhiFit:
    """ The Φ fit stored next to the models, or a fresh fit with the configured sizes. """
    path = Path(config.MODELS_DIR if models_dir is None else models_dir) / PHI_FILENAME
    if path.exists():
        return load_phi(path)
    return fit_phi()


def stabilization_policy(spec: ExperimentSpec, setup: ScenarioSetup, n_increments: int) -> StabilizationPolicy:
    """ Scenario defaults overridden by the experiment keys. One increment means w_h = 0 unless stated otherwise. """
    policy = setup.stabilization
    data = {
        "kind": spec.stab_kind or policy.kind,
        "evaluation_state": spec.stab_w_policy or (
            EvaluationState.ZERO if n_increments == 1 and setup.n_increments > 1 else policy.evaluation_state),
        "value": spec.stab_value if spec.stab_value is not None else policy.value,
        "formula": policy.formula,
    }
    return StabilizationPolicy(**data)


def make_kernel(spec: ExperimentSpec, setup: ScenarioSetup, problem, n_increments: int, phi=None, predictor=None,
                threads=1):
    if spec.method == Method.VEM:
        return VemKernel(
            problem, stabilization_policy(spec, setup, n_increments), spec.determinant or setup.determinant,
            degree=spec.quadrature_degree, threads=threads)

    if predictor is None:
        if spec.method == Method.FEM_P1:
            predictor = TrianglePredictor(phi)
        elif spec.basis_source == BasisSource.TRACE_FIT:
            predictor = TraceFitPredictor(phi)
        else:
            predictor = NetworkPredictor(ModelBank(spec.models_dir), phi)
    return NavemKernel(problem, predictor, degree=spec.quadrature_degree, threads=threads)


def mesh_family(spec: ExperimentSpec, setup: ScenarioSetup) -> MeshFamily:
    if spec.mesh_family is not None:
        return spec.mesh_family
    return MeshFamily.TRIANGLE if spec.method == Method.FEM_P1 else setup.mesh_family


def slice_samples(solution: Solution, setup: ScenarioSetup, n_points=None, height=None):
    """ Rows (x₁, u_h, u) of the slice component along x₂ = height; u is nan without an exact solution. """
    points = slice_points(config.SLICE_HEIGHT if height is None else height,
                          config.SLICE_POINTS if n_points is None else n_points)
    component = setup.slice_component
    discrete = solution.evaluate(points)[:, component]
    exact = setup.solution.value(points)[:, component] if setup.has_exact_solution else np.full(len(points), np.nan)
    return np.column_stack([points[:, 0], discrete, exact])


def slice_deviation(samples):
    """ max |u_h − u| along the slice. """
    return float(np.max(np.abs(samples[:, 1] - samples[:, 2])))


def reference_deviation(solution: Solution, reference: Solution, component=1):
    """ Vertex-wise RMS difference of one component relative to the reference maximum. """
    vertices = solution.mesh.vertices
    ours = solution.displacement[:, component]
    theirs = reference.evaluate(vertices)[:, component]
    scale = float(np.max(np.abs(reference.displacement[:, component])))
    return float(np.sqrt(np.mean((ours - theirs) ** 2))) / scale if scale > 0 else float("nan")


def fem_reference(setup: ScenarioSetup, driver: NewtonDriver, grid=None, degree=None, threads=1) -> Solution:
    """ P₁ finite elements on a triangulated ``grid`` × ``grid`` mesh. """
    mesh = generate_triangle_mesh(config.FEM_REFERENCE_GRID if grid is None else grid)
    problem = setup.problem(mesh)
    logger.info('Computing the P1 reference on %d triangles', mesh.n_cells)
    return solve(problem, NavemKernel(problem, TrianglePredictor(None), degree=degree, threads=threads), driver,
                 threads=threads)


def run_refinement(spec: ExperimentSpec, setup: ScenarioSetup, family: MeshFamily, size: int, driver: NewtonDriver,
                   phi=None, predictor=None, threads=1):
    started = time.perf_counter()
    mesh = build_mesh(family, size, seed=spec.seed, distortion=spec.mesh_distortion,
                      lloyd_iters=setup.mesh_lloyd if spec.mesh_lloyd is None else spec.mesh_lloyd)
    problem = setup.problem(mesh)
    kernel = make_kernel(spec, setup, problem, driver.n_increments, phi, predictor, threads)
    solution = solve(problem, kernel, driver, threads=threads)

    record = RefinementRecord(
        size=size, h=float(mesh.mesh_size), ndof=solution.dofmap.n_dofs,
        newton_steps_total=solution.report.total_newton_steps)
    if not solution.report.converged:
        record.failure = 'newton-not-converged'
    if setup.has_exact_solution:
        record.err0, record.err1 = solution_errors(
            solution, setup.solution.value, setup.solution.gradient, spec.quadrature_degree)
    record.wall_time = time.perf_counter() - started
    logger.info('%s/%s size %d: h %.4e, err0 %.4e, err1 %.4e, %d Newton steps',
                setup.scenario.value, spec.method.value, size, record.h, record.err0, record.err1,
                record.newton_steps_total)
    return record, solution


def run_experiment(spec: ExperimentSpec, output_dir=None, threads=1, predictor=None) -> ErrorReport:
    """
    Solve the test on every refinement of the mesh family and write ``<output>/<test>/<stem>.csv``.

    Tests with a slice component also write the slice of the finest solution; the Neo-Hookean test
    writes the vertex displacements and, when requested, compares them with the P₁ reference.
    Failed refinements are kept in the report with their error.
    """
    setup = scenario_setup(spec.test)
    family = mesh_family(spec, setup)
    sizes = spec.mesh_sizes or setup.default_sizes(family)
    driver = NewtonDriver(
        n_increments=spec.n_increments or setup.n_increments, tol=spec.tol or setup.tol,
        max_steps=spec.max_steps or config.NEWTON_MAX_STEPS)
    phi = None
    if predictor is None and spec.method == Method.NAVEM:
        phi = load_or_fit_phi(spec.models_dir)

    output = Path(config.RESULTS_DIR if output_dir is None else output_dir) / setup.scenario.value
    report = ErrorReport(test=setup.scenario.value, method=spec.method.value)
    finest = None
    for size in sizes:
        try:
            record, solution = run_refinement(spec, setup, family, size, driver, phi, predictor, threads)
            finest = solution
        except UnprocessableError as e:
            logger.warning('%s/%s size %d failed: %s', setup.scenario.value, spec.method.value, size, e)
            record = RefinementRecord(size=size, h=float("nan"), ndof=0, failure=str(e))
        report.records.append(record)

    write_report_csv(report, output / f"{spec.stem}.csv")

    if finest is not None and setup.slice_component is not None:
        samples = slice_samples(finest, setup)
        write_rows_csv(output / f"{spec.stem}-slice.csv", ["x1", "u_h", "u"], samples)
        if setup.has_exact_solution:
            report.metrics["slice_deviation"] = slice_deviation(samples)

    if finest is not None and setup.scenario == Scenario.TEST3:
        rows = np.hstack([finest.mesh.vertices, finest.displacement])
        write_rows_csv(output / f"{spec.stem}-field.csv", ["x1", "x2", "u1", "u2"], rows)
        report.metrics["newton_steps_per_increment"] = max(
            record.iterations for record in finest.report.increments)
        if spec.reference_compare and spec.method != Method.FEM_P1:
            reference = fem_reference(setup, driver, degree=spec.quadrature_degree, threads=threads)
            report.metrics["reference_deviation"] = reference_deviation(finest, reference)

    if report.rates is not None:
        rates = report.rates
        logger.info('%s/%s rates: L2 %.3f, H1 %.3f', report.test, report.method, rates.order0, rates.order1)
    return report
