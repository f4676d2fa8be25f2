import numpy as np
import pytest
from click.testing import CliRunner

from fluvius_navem.cli import cli, run
from fluvius_navem.harmonic import save_phi
from fluvius_navem.mesh import generate_cartesian_mesh, load_mesh
from fluvius_navem.network import load_polygons


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def models_dir(tmp_path, phi):
    directory = tmp_path / "models"
    directory.mkdir()
    save_phi(phi, directory / "phi-fit.txt")
    return directory


@pytest.fixture
def quad_mesh_file(tmp_path, runner):
    path = tmp_path / "quads.txt"
    result = runner.invoke(cli, ["gen-mesh", "--family", "quad", "--n", "3", "--seed", "2", "-o", str(path)])
    assert result.exit_code == 0, result.output
    return path


def test_gen_mesh(runner, tmp_path):
    path = tmp_path / "mesh.txt"
    result = runner.invoke(
        cli, ["gen-mesh", "--family", "quad", "--n", "4", "--distortion", "0", "--seed", "1", "-o", str(path)])
    assert result.exit_code == 0, result.output
    assert "16 cells" in result.output
    np.testing.assert_array_equal(load_mesh(path).vertices, generate_cartesian_mesh(4).vertices)


def test_missing_seed_is_a_usage_error(runner, tmp_path):
    result = runner.invoke(cli, ["gen-mesh", "--family", "voronoi", "--n", "16", "-o", str(tmp_path / "m.txt")])
    assert result.exit_code == 2
    assert run(["gen-mesh", "--family", "voronoi"]) == 2


def test_gen_dataset(runner, tmp_path):
    path = tmp_path / "quads.poly"
    result = runner.invoke(cli, ["gen-dataset", "--n-vertices", "4", "--size", "5", "--seed", "0", "-o", str(path)])
    assert result.exit_code == 0, result.output
    assert len(load_polygons(path)) == 5

    result = runner.invoke(cli, ["gen-dataset", "--n-vertices", "3", "--seed", "0", "-o", str(path)])
    assert result.exit_code == 2


def test_solve_with_vem(runner, tmp_path, quad_mesh_file):
    output = tmp_path / "u.csv"
    result = runner.invoke(
        cli, ["solve", str(quad_mesh_file), "--test", "test1", "--method", "vem", "-o", str(output)])
    assert result.exit_code == 0, result.output
    assert "converged: True" in result.output
    assert "err0" in result.output
    rows = output.read_text().splitlines()
    assert rows[0] == "x1,x2,u1,u2"
    assert len(rows) == 1 + 16


def test_solve_without_a_model_names_the_polygon_class(runner, models_dir, quad_mesh_file):
    result = runner.invoke(cli, ["solve", str(quad_mesh_file), "--test", "test1", "--models-dir", str(models_dir)])
    assert result.exit_code == 1
    assert "polygon class 4" in result.output


def test_train_and_resume(runner, tmp_path, models_dir):
    polygons = tmp_path / "quads.poly"
    runner.invoke(cli, ["gen-dataset", "--n-vertices", "4", "--size", "2", "--seed", "0", "-o", str(polygons)])
    state = tmp_path / "state.txt"
    common = ["train", "--polygons", str(polygons), "--target", "value", "--seed", "0", "--layers", "2",
              "--width", "4", "--order", "2", "--adam-epochs", "3", "--bfgs-steps", "2", "-o", str(models_dir),
              "--state", str(state)]

    first = runner.invoke(cli, common + ["--stop-after", "2"])
    assert first.exit_code == 0, first.output
    assert "(adam)" in first.output
    assert (models_dir / "mlp-nv4-value.txt").exists()
    assert state.exists()

    second = runner.invoke(cli, common)
    assert second.exit_code == 0, second.output
    assert "(done)" in second.output

    both = runner.invoke(cli, ["train", "--polygons", str(polygons), "--seed", "0", "--state", str(state)])
    assert both.exit_code == 2


def test_experiment_command(runner, tmp_path):
    args = ["experiment", "--set", "test=test2-case1", "--set", "method=vem", "--set", "mesh.sizes=4",
            "--set", "driver.N=2", "-o", str(tmp_path)]
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    assert "slice_deviation" in result.output
    assert (tmp_path / "test2-case1" / "vem.csv").exists()

    result = runner.invoke(cli, ["experiment", "--set", "test=test1", "--set", "mesh.seeds=16"])
    assert result.exit_code == 1
    assert "mesh.seeds" in result.output


def test_validate(runner):
    result = runner.invoke(cli, ["validate", "--suite", "quadrature", "--suite", "law-tangents"])
    assert result.exit_code == 0, result.output
    assert "PASS  quadrature" in result.output
    assert "PASS  law-tangents" in result.output
    assert run(["validate", "--suite", "quadrature"]) == 0
