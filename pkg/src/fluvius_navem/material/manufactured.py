from dataclasses import dataclass, field

import numpy as np

from .law import ConstitutiveLaw


class DisplacementField:
    """
    Displacement with analytic derivatives, evaluated on point arrays of shape (n, 2):
    ``value`` → (n, 2), ``gradient`` → (n, 2, 2) with [k, l] = ∂u_k/∂x_l,
    ``hessian`` → (n, 2, 2, 2) with [k, l, j] = ∂²u_k/∂x_l∂x_j.
    """

    def value(self, points):
        raise NotImplementedError

    def gradient(self, points):
        raise NotImplementedError

    def hessian(self, points):
        raise NotImplementedError

    def __call__(self, points):
        return self.value(points)


@dataclass(frozen=True)
class BubbleField(DisplacementField):
    """ u = (a·x₁(1−x₁)x₂(1−x₂) + c)·d """
    amplitude: float
    offset: float = 0.0
    direction: tuple = (1.0, 1.0)

    def _bubble(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        x, y = points[:, 0], points[:, 1]
        return x, y, x * (1 - x) * y * (1 - y)

    def value(self, points):
        _, _, b = self._bubble(points)
        return np.outer(self.amplitude * b + self.offset, self.direction)

    def gradient(self, points):
        x, y, _ = self._bubble(points)
        grad_b = np.column_stack([(1 - 2 * x) * y * (1 - y), x * (1 - x) * (1 - 2 * y)])
        return self.amplitude * np.einsum('k,nl->nkl', np.asarray(self.direction, dtype=float), grad_b)

    def hessian(self, points):
        x, y, _ = self._bubble(points)
        cross = (1 - 2 * x) * (1 - 2 * y)
        hess_b = np.stack([
            np.column_stack([-2 * y * (1 - y), cross]),
            np.column_stack([cross, -2 * x * (1 - x)]),
        ], axis=1)
        return self.amplitude * np.einsum('k,nlj->nklj', np.asarray(self.direction, dtype=float), hess_b)


@dataclass(frozen=True)
class LinearField(DisplacementField):
    """ u = u₀ + G x """
    constant: np.ndarray = field(default_factory=lambda: np.zeros(2))
    matrix: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))

    def value(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.asarray(self.constant, dtype=float) + points @ np.asarray(self.matrix, dtype=float).T

    def gradient(self, points):
        n = len(np.atleast_2d(points))
        return np.broadcast_to(np.asarray(self.matrix, dtype=float), (n, 2, 2)).copy()

    def hessian(self, points):
        return np.zeros((len(np.atleast_2d(points)), 2, 2, 2))


def manufactured_body_force(law: ConstitutiveLaw, solution: DisplacementField):
    """ f = −∇·σ(∇u), with (∇·σ)_i = Σ_j Σ_kl 𝔸_ijkl ∂²u_k/∂x_l∂x_j """

    def body_force(points):
        modulus = law.tangent(solution.gradient(points))
        return -np.einsum('nijkl,nklj->ni', modulus, solution.hessian(points))

    return body_force


def boundary_traction(law: ConstitutiveLaw, solution: DisplacementField):
    """ t = σ(∇u)·n on boundary points with outward normals n of shape (n, 2). """

    def traction(points, normals):
        return np.einsum('nij,nj->ni', law.stress(solution.gradient(points)), normals)

    return traction
