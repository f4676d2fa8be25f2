import sys
from pathlib import Path

import click
import numpy as np
from fluvius.error import NotFoundError, UnprocessableError

from . import config, logger
from .experiment import (
    ExperimentSpec, load_or_fit_phi, load_spec, run_experiment, scenario_setup, solution_errors, write_rows_csv)
from .experiment.runner import PHI_FILENAME, make_kernel
from .harmonic import HarmonicBasis, fit_phi, load_phi, save_phi
from .mesh import (
    generate_cartesian_mesh, generate_distorted_quad_mesh, generate_triangle_mesh, generate_voronoi_mesh, load_mesh,
    save_mesh)
from .network import (
    TraceLoss, TrainerConfig, build_training_set, generate_dataset, init_model, load_model, load_optimizer_state,
    load_polygons, model_filename, save_model, save_optimizer_state, save_polygons, train)
from .solver import NewtonDriver, solve
from .status import BasisSource, MeshFamily, Method, NetworkTarget, Scenario
from .validation import SUITES, run_validation


def _choice(enum_cls):
    return click.Choice([item.value for item in enum_cls])


class NavemGroup(click.Group):
    """ Domain errors become a one-line message and exit status 1. """

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (UnprocessableError, NotFoundError) as e:
            logger.error('%s failed: %s', ctx.invoked_subcommand, e)
            raise click.ClickException(str(e))


def _phi(phi_path, models_dir):
    return load_phi(phi_path) if phi_path else load_or_fit_phi(models_dir)


@click.group(cls=NavemGroup)
def cli():
    """ Neural approximated virtual elements for polygonal elasticity. """


@cli.command("fit-phi")
@click.option("--poles", type=int, default=config.PHI_POLES, show_default=True)
@click.option("--polys", type=int, default=config.PHI_POLYNOMIALS, show_default=True)
@click.option("--samples", type=int, default=config.PHI_SAMPLES, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Defaults to phi-fit.txt in the models directory.")
def fit_phi_command(poles, polys, samples, output):
    phi = fit_phi(poles, polys, samples)
    path = Path(output or Path(config.MODELS_DIR) / PHI_FILENAME)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_phi(phi, path)
    click.echo(f"boundary residual {phi.boundary_residual:.3e} -> {path}")


@cli.command("gen-dataset")
@click.option("--n-vertices", type=click.IntRange(min=4), required=True)
@click.option("--size", type=click.IntRange(min=1), default=config.DATASET_SIZE, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def gen_dataset_command(n_vertices, size, seed, output):
    polygons = generate_dataset(n_vertices, size, seed=seed)
    save_polygons(polygons, output)
    click.echo(f"{len(polygons)} polygons with {n_vertices} vertices -> {output}")


@cli.command("train")
@click.option("--polygons", "polygons_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--target", type=click.Choice([t.value for t in NetworkTarget] + ["both"]), default="both",
              show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--layers", type=click.IntRange(min=1), default=config.MLP_LAYERS, show_default=True)
@click.option("--width", type=click.IntRange(min=1), default=config.MLP_WIDTH, show_default=True)
@click.option("--order", type=click.IntRange(min=1), default=config.HARMONIC_ORDER, show_default=True)
@click.option("--adam-epochs", type=click.IntRange(min=0), default=config.ADAM_EPOCHS, show_default=True)
@click.option("--bfgs-steps", type=click.IntRange(min=0), default=config.BFGS_STEPS, show_default=True)
@click.option("--lr", type=float, default=config.ADAM_LR, show_default=True)
@click.option("--l2", type=float, default=config.L2_REG, show_default=True)
@click.option("--state", "state_path", type=click.Path(dir_okay=False), default=None,
              help="Optimizer state to resume from; written back when the run stops.")
@click.option("--stop-after", type=click.IntRange(min=1), default=None)
@click.option("--phi", "phi_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("-o", "--models-dir", type=click.Path(file_okay=False), default=config.MODELS_DIR, show_default=True)
def train_command(polygons_path, target, seed, layers, width, order, adam_epochs, bfgs_steps, lr, l2, state_path,
                  stop_after, phi_path, models_dir):
    """
    Train the value and/or gradient network of one polygon class. With --state, a previous run of a single
    target continues from the stored optimizer state and the model already in the models directory.
    """
    targets = list(NetworkTarget) if target == "both" else [NetworkTarget(target)]
    if state_path and len(targets) > 1:
        raise click.UsageError("--state needs a single --target")

    models_dir = Path(models_dir)
    models_dir.mkdir(parents=True, exist_ok=True)
    phi = _phi(phi_path, models_dir)
    if not (models_dir / PHI_FILENAME).exists():
        save_phi(phi, models_dir / PHI_FILENAME)

    training_set = build_training_set(load_polygons(polygons_path), phi, HarmonicBasis(order))
    trainer = TrainerConfig(adam_epochs=adam_epochs, bfgs_steps=bfgs_steps, adam_lr=lr, l2_reg=l2, seed=seed)
    for network_target in targets:
        path = models_dir / model_filename(training_set.n_vertices, network_target)
        state = None
        if state_path and Path(state_path).exists():
            model, state = load_model(path), load_optimizer_state(state_path)
        else:
            model = init_model(training_set.n_vertices, network_target, layers, width, order, seed)
        result = train(model, TraceLoss(model, training_set, l2), trainer, state, stop_after)
        save_model(result.model, path)
        if state_path:
            save_optimizer_state(result.state, state_path)
        loss = "n/a" if result.final_loss is None else f"{result.final_loss:.6e}"
        click.echo(f"{network_target.value}: loss {loss} ({result.state.phase}) -> {path}")


@cli.command("gen-mesh")
@click.option("--family", type=_choice(MeshFamily), required=True)
@click.option("--n", "size", type=click.IntRange(min=1), required=True,
              help="Cells per side for grids, seeds for Voronoi meshes.")
@click.option("--distortion", type=click.FloatRange(min=0), default=None)
@click.option("--lloyd", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--amplitude", type=click.FloatRange(min=0), default=None)
@click.option("--seed", type=int, required=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def gen_mesh_command(family, size, distortion, lloyd, amplitude, seed, output):
    family = MeshFamily(family)
    if family == MeshFamily.DISTORTED_QUAD:
        mesh = generate_distorted_quad_mesh(size, distortion=distortion, seed=seed)
    elif family == MeshFamily.CARTESIAN:
        mesh = generate_cartesian_mesh(size)
    elif family == MeshFamily.TRIANGLE:
        mesh = generate_triangle_mesh(size)
    else:
        mesh = generate_voronoi_mesh(size, lloyd_iters=lloyd, seed=seed, amplitude=amplitude)
    save_mesh(mesh, output)
    click.echo(f"{mesh.n_cells} cells, {mesh.n_vertices} vertices -> {output}")


@cli.command("solve")
@click.argument("mesh_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--test", type=_choice(Scenario), required=True)
@click.option("--method", type=_choice(Method), default=Method.NAVEM.value, show_default=True)
@click.option("--basis-source", type=_choice(BasisSource), default=BasisSource.NETWORK.value, show_default=True)
@click.option("--models-dir", type=click.Path(file_okay=False), default=config.MODELS_DIR, show_default=True)
@click.option("--increments", type=click.IntRange(min=1), default=None)
@click.option("--tol", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="CSV of the vertex displacements.")
def solve_command(mesh_path, test, method, basis_source, models_dir, increments, tol, threads, output):
    """ One solve of a test problem on a stored mesh; boundary markers in the file are kept. """
    spec = ExperimentSpec(test=test, method=method, basis_source=basis_source, models_dir=models_dir,
                          n_increments=increments, tol=tol)
    setup = scenario_setup(spec.test)
    problem = setup.problem(load_mesh(mesh_path), keep_markers=True)
    driver = NewtonDriver(n_increments=spec.n_increments or setup.n_increments, tol=spec.tol or setup.tol)
    phi = load_or_fit_phi(models_dir) if spec.method == Method.NAVEM else None
    kernel = make_kernel(spec, setup, problem, driver.n_increments, phi, threads=threads)
    solution = solve(problem, kernel, driver, threads=threads)

    message = f"{solution.report.total_newton_steps} Newton steps, converged: {solution.report.converged}"
    if setup.has_exact_solution:
        err0, err1 = solution_errors(solution, setup.solution.value, setup.solution.gradient, spec.quadrature_degree)
        message += f", err0 {err0:.6e}, err1 {err1:.6e}"
    click.echo(message)
    if output:
        write_rows_csv(output, ["x1", "x2", "u1", "u2"], np.hstack([problem.mesh.vertices, solution.displacement]))


@cli.command("experiment")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE")
@click.option("-o", "--output", type=click.Path(file_okay=False), default=config.RESULTS_DIR, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
def experiment_command(config_path, overrides, output, threads):
    report = run_experiment(load_spec(config_path, overrides), output, threads=threads)
    for record in report.records:
        status = record.failure or "ok"
        click.echo(f"h {record.h:.4e}  err0 {record.err0:.4e}  err1 {record.err1:.4e}  "
                   f"ndof {record.ndof}  newton {record.newton_steps_total}  {status}")
    if report.rates is not None:
        click.echo(f"rates: L2 {report.rates.order0:.3f}, H1 {report.rates.order1:.3f}")
    for name, value in sorted(report.metrics.items()):
        click.echo(f"{name}: {value:.6e}")


@cli.command("validate")
@click.option("--suite", "suites", type=click.Choice(list(SUITES)), multiple=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def validate_command(ctx, suites, seed):
    results = run_validation(suites or None, seed)
    for result in results:
        click.echo(str(result))
    if not all(result.passed for result in results):
        ctx.exit(1)


def run(argv=None) -> int:
    """ Exit status 0 on success, 1 on a domain error, 2 on a usage error. """
    try:
        code = cli.main(args=argv, prog_name="navem", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        return 1
    return code if isinstance(code, int) else 0


def main():
    sys.exit(run())
