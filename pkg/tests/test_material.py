import numpy as np
import pytest

from fluvius_navem.exceptions import ConstitutiveEvaluationError, NonPositiveJacobian
from fluvius_navem.material import (
    BubbleField, ConstitutiveLaw, LinearField, LinearTheta, NeoHookean, contract, lame_tensor,
    manufactured_body_force)


def _directional_error(law, gradient, direction, step=1e-6):
    numeric = (law.stress(gradient + step * direction) - law.stress(gradient - step * direction)) / (2 * step)
    analytic = contract(law.tangent(gradient), direction)
    return np.linalg.norm(numeric - analytic) / np.linalg.norm(analytic)


def test_linear_lame_stress(linear_lame):
    grad = np.array([[0.1, 0.2], [0.0, -0.3]])
    strain = 0.5 * (grad + grad.T)
    expected = 2 * 1.5 * strain + 3.0 * np.trace(grad) * np.eye(2)
    np.testing.assert_allclose(linear_lame.stress(grad), expected)
    np.testing.assert_allclose(linear_lame.tangent(grad), lame_tensor(1.5, 3.0))


@pytest.mark.parametrize("law_name", ["linear_lame", "strain_dependent", "neo_hookean"])
def test_tangent_matches_finite_differences(law_name, request):
    law = request.getfixturevalue(law_name)
    rng = np.random.default_rng(4)
    for _ in range(10):
        gradient, direction = 0.2 * rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
        assert _directional_error(law, gradient, direction) < 1e-6


def test_laws_are_vectorized(strain_dependent):
    gradients = np.random.default_rng(1).normal(scale=0.1, size=(5, 3, 2, 2))
    stress = strain_dependent.stress(gradients)
    tangent = strain_dependent.tangent(gradients)
    assert stress.shape == (5, 3, 2, 2)
    assert tangent.shape == (5, 3, 2, 2, 2, 2)
    np.testing.assert_allclose(stress[2, 1], strain_dependent.stress(gradients[2, 1]))


def test_neo_hookean_at_rest(neo_hookean):
    zero = np.zeros((2, 2))
    np.testing.assert_allclose(neo_hookean.stress(zero), 0.0, atol=1e-14)
    np.testing.assert_allclose(neo_hookean.tangent(zero), lame_tensor(1.0, 5.1), atol=1e-12)


def test_neo_hookean_with_prescribed_jacobian(neo_hookean):
    grad = np.array([[0.05, 0.02], [-0.01, 0.03]])
    J = np.linalg.det(np.eye(2) + grad)
    np.testing.assert_allclose(neo_hookean.stress(grad, jacobian=J), neo_hookean.stress(grad))

    other = 1.2
    step = 1e-6
    direction = np.array([[0.3, -0.2], [0.1, 0.4]])
    numeric = (neo_hookean.stress(grad + step * direction, jacobian=other)
               - neo_hookean.stress(grad - step * direction, jacobian=other)) / (2 * step)
    analytic = contract(neo_hookean.tangent(grad, jacobian=other), direction)
    np.testing.assert_allclose(numeric, analytic, rtol=1e-6, atol=1e-9)


def test_neo_hookean_linear_theta():
    law = NeoHookean(mu=1.0, lam=2.0, theta=LinearTheta())
    rng = np.random.default_rng(2)
    gradient, direction = 0.1 * rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
    assert _directional_error(law, gradient, direction) < 1e-6


def test_non_positive_jacobian(neo_hookean):
    with pytest.raises(NonPositiveJacobian) as excinfo:
        neo_hookean.stress(np.array([[-2.0, 0.0], [0.0, 0.0]]))
    assert excinfo.value.jacobian == pytest.approx(-1.0)


def test_law_parameters():
    with pytest.raises(ConstitutiveEvaluationError):
        NeoHookean(mu=-1.0, lam=1.0)
    with pytest.raises(ConstitutiveEvaluationError):
        ConstitutiveLaw.create("plasticity")
    law = ConstitutiveLaw.create("linear-lame", mu=1.0, lam=2.0)
    assert law.lam == 2.0


def test_manufactured_body_force(linear_lame):
    assert np.allclose(manufactured_body_force(linear_lame, LinearField(matrix=np.eye(2)))([[0.3, 0.4]]), 0.0)

    # u = 16·x(1−x)y(1−y)·(1, 1): check −∇·σ against central differences of σ.
    field = BubbleField(amplitude=16.0, direction=(1.0, 1.0))
    force = manufactured_body_force(linear_lame, field)
    point, step = np.array([0.3, 0.6]), 1e-5
    divergence = np.zeros(2)
    for j in range(2):
        shift = np.zeros(2)
        shift[j] = step
        plus = linear_lame.stress(field.gradient(point + shift)[0])
        minus = linear_lame.stress(field.gradient(point - shift)[0])
        divergence += (plus - minus)[:, j] / (2 * step)
    np.testing.assert_allclose(force(point[None])[0], -divergence, rtol=1e-6)
