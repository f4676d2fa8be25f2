from dataclasses import dataclass

import numpy as np

from ..mesh import ElementGeometry


@dataclass(frozen=True)
class VemElementOperators:
    """
    Lowest-order projector data of one element for the scaled monomials
    m = {1, (x₁ − x_{E,1})/h_E, (x₂ − x_{E,2})/h_E}.

    ``D[i, α] = m_α(v_i)``, ``B`` the boundary moments, ``projector`` = G⁻¹B so that
    Π∇₁ φ_i = Σ_α projector[α, i] m_α, ``stabilization`` = (I − DΠ)ᵀ(I − DΠ).
    """
    geom: ElementGeometry
    D: np.ndarray
    B: np.ndarray
    projector: np.ndarray
    stabilization: np.ndarray

    @property
    def n_vertices(self):
        return self.geom.n_vertices

    @property
    def projected_gradient(self):
        """ ∇Π∇₁φ_i as rows of an (N_v, 2) array. """
        return self.projector[1:].T / self.geom.diameter

    def monomials(self, points):
        scaled = (np.atleast_2d(points) - self.geom.centroid) / self.geom.diameter
        return np.column_stack([np.ones(len(scaled)), scaled])

    def dofs(self, field):
        """ Vertex values of a callable evaluated on the element vertices. """
        return np.asarray(field(self.geom.vertices))

    def constant_gradient(self, u_local):
        """ Π⁰₀∇u for a local vector dof array ordered x-block then y-block. """
        u = np.asarray(u_local, dtype=float).reshape(2, self.n_vertices)
        return u @ self.projected_gradient

    def projection(self, u_local, points):
        """ Π∇₁u at points, shape (n, 2). """
        u = np.asarray(u_local, dtype=float).reshape(2, self.n_vertices)
        return self.monomials(points) @ (self.projector @ u.T)


def build_element_operators(geom: ElementGeometry) -> VemElementOperators:
    n, h = geom.n_vertices, geom.diameter
    D = np.column_stack([np.ones(n), (geom.vertices - geom.centroid) / h])

    lengths, normals = geom.edge_lengths, geom.normals
    weighted = normals * lengths[:, None]
    B = np.empty((3, n))
    B[0] = 0.5 * (np.roll(lengths, 1) + lengths) / geom.perimeter
    B[1:] = (0.5 * (np.roll(weighted, 1, axis=0) + weighted) / h).T

    projector = np.linalg.solve(B @ D, B)
    residual = np.eye(n) - D @ projector
    return VemElementOperators(geom=geom, D=D, B=B, projector=projector, stabilization=residual.T @ residual)
