import numpy as np
import pytest

from fluvius_navem.exceptions import ConfigurationError
from fluvius_navem.experiment import (
    ErrorReport, RefinementRecord, build_mesh, fit_convergence_rate, load_spec, navem_errors, run_experiment,
    scenario_setup, solution_errors, write_report_csv)
from fluvius_navem.network import TrianglePredictor
from fluvius_navem.solver import ElasticityProblem, VemKernel, solve
from fluvius_navem.status import MeshFamily, Method, Scenario, StabilizationKind
from fluvius_navem.vem import StabilizationPolicy


def _report(h, err0, err1):
    records = [RefinementRecord(size=i, h=a, ndof=10 * i, err0=b, err1=c)
               for i, (a, b, c) in enumerate(zip(h, err0, err1))]
    return ErrorReport(test="test1", method="vem", records=records)


def test_rates_of_exact_power_laws():
    h = np.array([0.25, 0.125, 0.0625, 0.03125])
    rates = fit_convergence_rate(_report(h, 3.0 * h ** 2, 0.5 * h))
    assert rates.order0 == pytest.approx(2.0, abs=1e-12)
    assert rates.order1 == pytest.approx(1.0, abs=1e-12)
    assert rates.monotone


def test_rates_need_three_usable_refinements():
    report = _report([0.5, 0.25], [1.0, 0.25], [1.0, 0.5])
    assert report.rates is None
    with pytest.raises(ConfigurationError):
        fit_convergence_rate(report)

    with pytest.raises(ConfigurationError):
        fit_convergence_rate(_report([0.5, 0.5, 0.25], [1.0, 0.5, 0.25], [1.0, 0.5, 0.25]))
    with pytest.raises(ConfigurationError):
        fit_convergence_rate(_report([0.5, 0.25, 0.125], [1.0, 0.0, 0.25], [1.0, 0.5, 0.25]))


def test_failed_refinements_are_left_out():
    report = _report([0.5, 0.25, 0.125, 0.0625], [1.0, 0.25, 0.0625, 0.015625], [1.0, 0.5, 0.25, 0.125])
    report.records.insert(2, RefinementRecord(size=9, h=float("nan"), ndof=0, failure="S01401"))
    assert len(report.successful()) == 4
    assert report.rates.order0 == pytest.approx(2.0)


def test_non_monotone_errors_are_flagged():
    rates = fit_convergence_rate(_report([0.5, 0.25, 0.125], [1.0, 2.0, 0.1], [1.0, 0.5, 0.25]))
    assert not rates.monotone


def test_report_csv(tmp_path):
    report = _report([0.5, 0.25], [1.0, 0.25], [1.0, 0.5])
    report.records.append(RefinementRecord(size=3, h=0.125, ndof=0, failure="newton-not-converged"))
    path = write_report_csv(report, tmp_path / "test1" / "vem.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "h,err0,err1,ndof,newton_steps_total,failure"
    assert lines[1] == "0.5,1,1,0,0,"
    assert lines[3].endswith(",newton-not-converged")


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "experiment.cfg"
    path.write_text("# Voronoi run\ntest = test3\nmethod = vem\nmesh.sizes = 64, 256\n\nstab.kind = trace\n")
    spec = load_spec(path, ["method=navem", "driver.N = 10"])
    assert spec.test == Scenario.TEST3
    assert spec.method == Method.NAVEM
    assert spec.mesh_sizes == (64, 256)
    assert spec.n_increments == 10
    assert spec.stab_kind == StabilizationKind.TRACE_BASED
    assert spec.stem == "navem"


@pytest.mark.parametrize("overrides", [
    ["test=test1", "mesh.seeds=16"],
    ["test=test1", "method"],
    ["method=vem"],
    ["test=test1", "method=fem-p2"],
    ["test=test1", "driver.N=0"],
])
def test_invalid_configurations(overrides):
    with pytest.raises(ConfigurationError):
        load_spec(None, overrides)


def test_scenario_defaults():
    linear = scenario_setup("test1")
    assert linear.n_increments == 1 and linear.with_traction
    assert linear.stabilization.value == pytest.approx(3.0)
    assert scenario_setup(Scenario.TEST2_CASE2).solution.amplitude == 80.0

    neo = scenario_setup(Scenario.TEST3)
    assert not neo.has_exact_solution
    assert neo.default_sizes(MeshFamily.VORONOI) == (256,)
    assert neo.default_sizes(MeshFamily.TRIANGLE) == (64,)
    assert linear.default_sizes(MeshFamily.VORONOI) == (16, 64, 256, 1024)


def test_build_mesh():
    assert build_mesh(MeshFamily.CARTESIAN, 3).n_cells == 9
    assert build_mesh("triangle", 3).n_cells == 18
    assert build_mesh("voronoi", 16, seed=1).n_cells == 16


def test_error_norms_vanish_on_linear_fields(triangle_mesh, voronoi_mesh, linear_lame, linear_field):
    bases = TrianglePredictor(None).predict_mesh(triangle_mesh)
    err0, err1 = navem_errors(triangle_mesh, bases, linear_field(triangle_mesh.vertices),
                              linear_field.value, linear_field.gradient)
    assert err0 < 1e-13 and err1 < 1e-13

    mesh = voronoi_mesh.with_dirichlet()
    problem = ElasticityProblem(mesh=mesh, law=linear_lame, dirichlet=linear_field.value)
    policy = StabilizationPolicy(kind=StabilizationKind.FIXED_SCALAR, value=3.0)
    solution = solve(problem, VemKernel(problem, policy))
    err0, err1 = solution_errors(solution, linear_field.value, linear_field.gradient)
    assert err0 < 1e-11 and err1 < 1e-11


def test_slice_output(tmp_path):
    spec = load_spec(None, ["test=test2-case1", "method=vem", "mesh.sizes=4", "driver.N=2"])
    report = run_experiment(spec, output_dir=tmp_path)
    assert len(report.records) == 1 and not report.records[0].failed
    assert report.rates is None

    slice_csv = (tmp_path / "test2-case1" / "vem-slice.csv").read_text().splitlines()
    assert slice_csv[0] == "x1,u_h,u"
    assert np.isfinite(report.metrics["slice_deviation"])
    assert (tmp_path / "test2-case1" / "vem.csv").exists()


@pytest.mark.slow
def test_vem_convergence_on_distorted_quads(tmp_path):
    spec = load_spec(None, ["test=test1", "method=vem", "mesh.sizes=8,16,32", "label=vem-quads"])
    report = run_experiment(spec, output_dir=tmp_path)
    rates = report.rates
    assert 1.7 <= rates.order0 <= 2.3
    assert 0.85 <= rates.order1 <= 1.2
    assert (tmp_path / "test1" / "vem-quads.csv").exists()


@pytest.mark.slow
def test_navem_convergence_on_distorted_quads(tmp_path, trace_fit):
    spec = load_spec(None, ["test=test1", "method=navem", "mesh.sizes=4,8,16", "label=navem-quads"])
    report = run_experiment(spec, output_dir=tmp_path, predictor=trace_fit)
    assert not any(record.failed for record in report.records)
    rates = report.rates
    assert 1.6 <= rates.order0 <= 2.4
    assert 0.8 <= rates.order1 <= 1.3
    assert (tmp_path / "test1" / "navem-quads.csv").exists()


@pytest.mark.slow
def test_neo_hookean_newton_steps(tmp_path, trace_fit):
    reports = {}
    for method in ("vem", "navem"):
        spec = load_spec(None, ["test=test3", f"method={method}", "mesh.sizes=64", "driver.N=20"])
        reports[method] = run_experiment(spec, output_dir=tmp_path, predictor=trace_fit)

    for report in reports.values():
        assert not report.records[0].failed
        assert report.metrics["newton_steps_per_increment"] <= 10
    assert reports["navem"].records[0].newton_steps_total <= reports["vem"].records[0].newton_steps_total
    assert (tmp_path / "test3" / "navem-field.csv").exists()
