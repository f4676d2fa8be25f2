import numpy as np
import pytest

from fluvius_navem.exceptions import ConfigurationError, ModelFormatError, ModelNotFoundError
from fluvius_navem.harmonic import HarmonicBasis
from fluvius_navem.mesh import build_reference_map, polygon_geometry
from fluvius_navem.network import (
    ModelBank, NetworkPredictor, OptimizerState, TraceLoss, TrainerConfig, TrianglePredictor, build_training_set,
    encode_element, encode_input, generate_dataset, generate_rdqm, generate_vm, init_model, is_strictly_convex,
    load_model, load_optimizer_state, load_polygons, loss_gradient_target, loss_value, model_filename,
    optimizer_arrays_path, save_model, save_optimizer_state, save_polygons, train)
from fluvius_navem.network.dataset import UNIT_SQUARE
from fluvius_navem.status import NetworkTarget

PENTAGON = np.array([[0.0, 0.0], [1.0, 0.1], [1.3, 0.9], [0.5, 1.4], [-0.2, 0.8]])


def _rotate(points, angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.asarray(points) @ np.array([[c, -s], [s, c]]).T


def _encode(vertices, j):
    geom = polygon_geometry(vertices)
    return encode_input(geom, build_reference_map(geom), j)


def _quadratic(size, seed=0):
    rng = np.random.default_rng(seed)
    curvature, center = rng.uniform(1.0, 10.0, size), rng.normal(size=size)

    def objective(params):
        d = params - center
        return 0.5 * float(np.sum(curvature * d ** 2)), curvature * d

    return objective


def test_backward_matches_finite_differences():
    model = init_model(5, NetworkTarget.VALUE, layers=3, width=6, max_order=2, seed=1)
    inputs = np.random.default_rng(0).normal(size=(7, model.input_size))

    def loss(params):
        model.set_parameters(params)
        return 0.5 * np.sum(model.forward(inputs) ** 2)

    params = model.parameters()
    model.set_parameters(params)
    activations = model.forward(inputs, keep_activations=True)
    analytic = model.backward(activations, activations[-1])

    step = 1e-6
    numeric = np.array([(loss(params + step * e) - loss(params - step * e)) / (2 * step)
                        for e in np.eye(len(params))])
    np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-8)


def test_model_shape():
    model = init_model(6, "gradient", layers=4, width=10, max_order=5)
    assert model.input_size == 10
    assert model.output_size == 14
    assert model.n_parameters == len(model.parameters()) == 10 * 10 + 10 + 2 * (10 * 10 + 10) + 14 * 10 + 14
    with pytest.raises(ConfigurationError):
        model.forward(np.zeros((2, 8)))
    with pytest.raises(ConfigurationError):
        init_model(2, "value")


def test_zero_model_losses_on_the_unit_square(phi, small_basis):
    training_set = build_training_set([UNIT_SQUARE], phi, small_basis)
    assert training_set.size == 4

    value = init_model(4, NetworkTarget.VALUE, layers=2, width=4, max_order=3)
    gradient = init_model(4, NetworkTarget.GRADIENT, layers=2, width=4, max_order=3)
    for model in (value, gradient):
        model.set_parameters(np.zeros(model.n_parameters))

    assert loss_value(value, training_set, l2_reg=0.0) == pytest.approx(np.sqrt(np.sqrt(2) / 3 + 2 * np.sqrt(2)))
    assert loss_gradient_target(gradient, training_set, l2_reg=0.0) == pytest.approx(2 ** 0.25)

    with pytest.raises(ConfigurationError):
        loss_value(gradient, training_set)
    with pytest.raises(ConfigurationError):
        TraceLoss(init_model(5, NetworkTarget.VALUE, max_order=3), training_set)


def test_l2_penalty_only_touches_weights(phi, small_basis):
    training_set = build_training_set([UNIT_SQUARE], phi, small_basis)
    model = init_model(4, NetworkTarget.VALUE, layers=2, width=4, max_order=3, seed=2)
    plain, with_l2 = TraceLoss(model, training_set, 0.0), TraceLoss(model, training_set, 0.1)
    params = model.parameters()
    weights = params * model.weight_mask()
    assert with_l2.value(params) - plain.value(params) == pytest.approx(0.1 * np.sum(weights ** 2))


def test_encoding_is_invariant_under_similarities():
    moved = 3.0 * _rotate(PENTAGON, 0.7) + [5.0, -2.0]
    for j in range(5):
        np.testing.assert_allclose(_encode(moved, j), _encode(PENTAGON, j), atol=1e-13)

    # cyclic relabelling only permutes the rows
    rolled = np.roll(PENTAGON, -2, axis=0)
    for j in range(5):
        np.testing.assert_allclose(_encode(rolled, j), _encode(PENTAGON, (j + 2) % 5), atol=1e-13)

    geom = polygon_geometry(PENTAGON)
    encoded = encode_element(geom, build_reference_map(geom))
    assert encoded.shape == (5, 8)
    # the largest distance to an anchor is the reference diameter
    np.testing.assert_allclose(np.linalg.norm(encoded.reshape(5, 4, 2), axis=-1).max(), 2.0, atol=1e-12)


def _bank(classes, max_order=3):
    models = [init_model(n, target, layers=2, width=5, max_order=max_order, seed=n)
              for n in classes for target in NetworkTarget]
    return ModelBank(models=models)


def test_network_predictor_is_invariant_under_rotation(phi):
    predictor = NetworkPredictor(_bank([5]), phi, HarmonicBasis(max_order=3))
    original = predictor.predict_element(polygon_geometry(PENTAGON))
    rotated = predictor.predict_element(polygon_geometry(_rotate(PENTAGON, 1.1)))
    np.testing.assert_allclose(rotated.c_phi, original.c_phi, atol=1e-12)
    np.testing.assert_allclose(rotated.c_q, original.c_q, atol=1e-12)


def test_batched_prediction_matches_elementwise(phi, voronoi_mesh):
    predictor = NetworkPredictor(_bank(range(4, 13)), phi, HarmonicBasis(max_order=3))
    batched = predictor.predict_mesh(voronoi_mesh)
    for k in (0, 5, 11):
        single = predictor.predict_element(batched[k].space.geom)
        np.testing.assert_allclose(batched[k].c_phi, single.c_phi, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(batched[k].c_q, single.c_q, rtol=1e-12, atol=1e-14)


def test_network_order_must_match_the_basis(phi):
    predictor = NetworkPredictor(_bank([5], max_order=2), phi, HarmonicBasis(max_order=3))
    with pytest.raises(ModelFormatError):
        predictor.predict_element(polygon_geometry(PENTAGON))


def test_triangle_hats():
    triangle = np.array([[0.1, 0.0], [1.0, 0.3], [0.4, 0.9]])
    basis = TrianglePredictor(None).predict_element(polygon_geometry(triangle))
    values, gradients = basis.evaluate(triangle)
    np.testing.assert_allclose(values, np.eye(3), atol=1e-12)

    hats = np.linalg.solve(np.column_stack([np.ones(3), triangle]), np.eye(3))
    np.testing.assert_allclose(gradients[0], hats[1:].T, atol=1e-12)

    with pytest.raises(ModelNotFoundError):
        TrianglePredictor(None).predict_element(polygon_geometry(PENTAGON))


def test_trace_fit_basis_interpolates_at_vertices(trace_fit):
    basis = trace_fit.predict_element(polygon_geometry(PENTAGON))
    values, _ = basis.evaluate(PENTAGON)
    np.testing.assert_allclose(values, np.eye(5), atol=0.05)
    np.testing.assert_array_equal(basis.c_q, basis.c_phi)


def test_model_file(tmp_path):
    model = init_model(5, NetworkTarget.GRADIENT, layers=3, width=4, max_order=2, seed=9)
    path = tmp_path / model_filename(5, "gradient")
    assert path.name == "mlp-nv5-gradient.txt"
    save_model(model, path)
    loaded = load_model(path)
    np.testing.assert_array_equal(loaded.parameters(), model.parameters())
    assert (loaded.target, loaded.n_vertices, loaded.max_order) == (model.target, 5, 2)

    path.write_text("navem-mlp 1\nvalue\n")
    with pytest.raises(ModelFormatError):
        load_model(path)
    path.write_text("mlp\n")
    with pytest.raises(ModelFormatError):
        load_model(path)


def test_model_bank_loads_lazily(tmp_path):
    model = init_model(4, NetworkTarget.VALUE, layers=2, width=3, max_order=2)
    save_model(model, tmp_path / model_filename(4, NetworkTarget.VALUE))
    bank = ModelBank(tmp_path)
    np.testing.assert_array_equal(bank.get(4, "value").parameters(), model.parameters())

    with pytest.raises(ModelNotFoundError) as excinfo:
        bank.get(7, NetworkTarget.GRADIENT)
    assert "polygon class 7" in str(excinfo.value)


def test_bfgs_minimizes_a_quadratic():
    model = init_model(3, NetworkTarget.VALUE, layers=1, max_order=1)
    assert model.n_parameters == 30
    result = train(model, _quadratic(30), TrainerConfig(adam_epochs=0, bfgs_steps=80))
    assert result.final_loss < 1e-8
    assert all(b <= a for a, b in zip(result.history, result.history[1:]))
    assert result.state.phase == "done"


def test_adam_decreases_the_loss():
    model = init_model(3, NetworkTarget.VALUE, layers=1, max_order=1)
    result = train(model, _quadratic(30), TrainerConfig(adam_epochs=200, bfgs_steps=0, adam_lr=0.05))
    assert result.history[-1] < 0.1 * result.history[0]
    assert result.state.phase == "done"


def test_interrupted_training_resumes_the_same_trajectory(tmp_path):
    trainer = TrainerConfig(adam_epochs=5, bfgs_steps=5, adam_lr=0.1)
    objective = _quadratic(30, seed=4)

    straight = init_model(3, NetworkTarget.VALUE, layers=1, max_order=1, seed=2)
    train(straight, objective, trainer)

    interrupted = init_model(3, NetworkTarget.VALUE, layers=1, max_order=1, seed=2)
    first = train(interrupted, objective, trainer, stop_after=7)
    assert (first.state.phase, first.state.step) == ("bfgs", 2)
    save_model(interrupted, tmp_path / "model.txt")
    save_optimizer_state(first.state, tmp_path / "state.txt")

    resumed = load_model(tmp_path / "model.txt")
    state = load_optimizer_state(tmp_path / "state.txt")
    train(resumed, objective, trainer, state=state)
    np.testing.assert_allclose(resumed.parameters(), straight.parameters(), rtol=1e-12, atol=1e-14)


def test_optimizer_state_file(tmp_path):
    path = tmp_path / "state.txt"
    save_optimizer_state(OptimizerState().ensure(3), path)
    state = load_optimizer_state(path)
    assert (state.phase, state.step, state.hessian) == ("adam", 0, None)
    np.testing.assert_array_equal(state.adam_m, np.zeros(3))

    path.write_text("navem-optim 1\nlbfgs\n0\n0\n0\n")
    with pytest.raises(ModelFormatError):
        load_optimizer_state(path)


def test_optimizer_state_keeps_the_hessian_out_of_the_header(tmp_path):
    rng = np.random.default_rng(5)
    size = 40
    upper = np.triu(rng.normal(size=(size, size)))
    lower_noise = np.tril(rng.normal(size=(size, size)), -1)
    state = OptimizerState(phase="bfgs", step=3).ensure(size)
    state.adam_m = rng.normal(size=size)
    state.hessian = np.asfortranarray(upper + lower_noise)

    path = tmp_path / "state.txt"
    save_optimizer_state(state, path)
    assert len(path.read_text().splitlines()) == 5
    assert optimizer_arrays_path(path).exists()

    loaded = load_optimizer_state(path)
    assert (loaded.phase, loaded.step) == ("bfgs", 3)
    np.testing.assert_array_equal(loaded.adam_m, state.adam_m)
    np.testing.assert_array_equal(loaded.hessian, upper + np.triu(upper, 1).T)

    optimizer_arrays_path(path).unlink()
    with pytest.raises(ModelFormatError):
        load_optimizer_state(path)
    assert (state.phase, state.step, state.hessian) == ("adam", 0, None)
    np.testing.assert_array_equal(state.adam_m, np.zeros(3))

    path.write_text("navem-optim 1\nlbfgs\n0\n0\n0\n")
    with pytest.raises(ModelFormatError):
        load_optimizer_state(path)


def test_rdqm_dataset():
    polygons = generate_rdqm(40, seed=3, distortion=0.2)
    assert len(polygons) == 40
    assert all(is_strictly_convex(p) for p in polygons)
    assert all(np.abs(p - UNIT_SQUARE).max() <= 0.2 for p in polygons)
    np.testing.assert_array_equal(polygons[7], generate_rdqm(40, seed=3, distortion=0.2)[7])


def test_voronoi_dataset():
    polygons = generate_vm(5, size=3, seed=1)
    assert len(polygons) == 3
    assert all(len(p) == 5 and is_strictly_convex(p) for p in polygons)
    assert len(generate_dataset(4, size=2, seed=0)) == 2
    with pytest.raises(ConfigurationError):
        generate_dataset(3, size=2)


def test_polygon_file(tmp_path):
    polygons = generate_rdqm(3, seed=0)
    path = tmp_path / "polygons.txt"
    save_polygons(polygons, path)
    for a, b in zip(load_polygons(path), polygons):
        np.testing.assert_array_equal(a, b)

    path.write_text("poly-set 1\n2\n4 0 0 1 0 1 1 0 1\n")
    with pytest.raises(ModelFormatError):
        load_polygons(path)
