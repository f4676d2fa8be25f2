from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .. import logger
from ..exceptions import ExpansionSizeError, ReferenceContainmentError
from ..mesh import ElementGeometry, ReferenceMap
from .basis import HarmonicBasis
from .phi import PhiFit

CONTAINMENT_TOLERANCE = 1e-10
KINK = np.array([1.0, 0.0])


@dataclass(frozen=True)
class PhiPullback:
    """
    Similarity ξ ↦ ŷ = anchor + scale·R(ξ − (1, 0)) taking Ω_Φ = (−1, 1)² onto a square
    whose side x₁ = 1 passes through ``anchor`` with inward axis along ``direction``.
    """
    anchor: np.ndarray
    direction: np.ndarray
    scale: float

    @property
    def rotation(self):
        ux, uy = self.direction
        return np.array([[-ux, uy], [-uy, -ux]])

    def to_phi(self, points):
        return KINK + (np.asarray(points) - self.anchor) @ self.rotation / self.scale

    def contains(self, points):
        xi = self.to_phi(points)
        return bool(np.all(np.abs(xi) <= 1.0 + CONTAINMENT_TOLERANCE))


def _unit(v):
    norm = np.hypot(*v)
    return v / norm if norm > 0 else None


def vertex_frame(reference_vertices, j):
    """
    Rotation about the centroid taking the direction from v̂_j to the centroid onto +x₁.
    Coefficients expressed in this frame do not depend on the orientation of the element.
    """
    ux, uy = _unit(-np.asarray(reference_vertices[j], dtype=float))
    return np.array([[ux, uy], [-uy, ux]])


def _pullback(reference_vertices, k, scale):
    """ Centroid-directed pullback at vertex k, or the interior-angle bisector when that leaves Ê outside. """
    anchor = reference_vertices[k]
    previous = reference_vertices[k - 1]
    following = reference_vertices[(k + 1) % len(reference_vertices)]

    candidates = [_unit(-anchor)]
    to_prev, to_next = _unit(previous - anchor), _unit(following - anchor)
    candidates.append(_unit(to_prev + to_next) if to_prev is not None and to_next is not None else None)

    for direction in candidates:
        if direction is None:
            continue
        pullback = PhiPullback(anchor=anchor, direction=direction, scale=scale)
        if pullback.contains(reference_vertices):
            return pullback

    raise ReferenceContainmentError('H01401', f'Element is not contained in the Phi square anchored at vertex [{k}]')


class ElementSpace:
    """
    Shared evaluation data of the local spaces H_{j,E} of one element: the harmonic polynomials in
    reference coordinates and the pulled-back Φ anchored at every vertex. Gradients are returned
    with respect to physical coordinates.
    """

    def __init__(self, geom: ElementGeometry, rmap: ReferenceMap, phi: PhiFit, basis: HarmonicBasis = None):
        self.geom = geom
        self.rmap = rmap
        self.phi = phi
        self.basis = basis or HarmonicBasis()

    @property
    def n_vertices(self):
        return self.geom.n_vertices

    @property
    def dim(self):
        return self.basis.size + 3

    @cached_property
    def reference_vertices(self):
        return self.rmap.to_reference(self.geom.vertices)

    @cached_property
    def pullbacks(self):
        ref = self.reference_vertices
        scale = float(np.max(np.linalg.norm(ref[:, None, :] - ref[None, :, :], axis=-1)))
        return tuple(_pullback(ref, k, scale) for k in range(self.n_vertices))

    @cached_property
    def frames(self):
        return tuple(vertex_frame(self.reference_vertices, j) for j in range(self.n_vertices))

    def harmonic(self, points, j):
        """
        Harmonic polynomial values (n, 2ℓ̂+1) and physical gradients (n, 2ℓ̂+1, 2) in the
        reference frame of vertex j.
        """
        rotation = self.frames[j]
        values, gradients = self.basis.evaluate(self.rmap.to_reference(points) @ rotation.T)
        return values, gradients @ rotation @ self.rmap.jacobian

    def auxiliary(self, points):
        """ Values (n, N_v) and physical gradients (n, N_v, 2) of Φ anchored at each vertex. """
        reference = self.rmap.to_reference(points)
        values = np.empty((len(reference), self.n_vertices))
        gradients = np.empty((len(reference), self.n_vertices, 2))
        for k, pullback in enumerate(self.pullbacks):
            v, g = self.phi.evaluate(pullback.to_phi(reference))
            values[:, k] = v
            gradients[:, k] = (g @ pullback.rotation.T / pullback.scale) @ self.rmap.jacobian
        return values, gradients

    def local_space(self, j):
        return LocalSpace(element=self, j=j)


@dataclass(frozen=True)
class LocalSpace:
    """ H_{j,E}: harmonic polynomials followed by Φ anchored at vertices j−1, j, j+1. """
    element: ElementSpace
    j: int

    @property
    def dim(self):
        return self.element.dim

    @property
    def anchors(self):
        n = self.element.n_vertices
        return [(self.j - 1) % n, self.j % n, (self.j + 1) % n]

    def evaluate(self, points):
        """ Member values (n, dim) and physical gradients (n, dim, 2). """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        h_values, h_gradients = self.element.harmonic(points, self.j)
        a_values, a_gradients = self.element.auxiliary(points)
        anchors = self.anchors
        return (np.hstack([h_values, a_values[:, anchors]]),
                np.concatenate([h_gradients, a_gradients[:, anchors]], axis=1))


def build_local_space(geom: ElementGeometry, rmap: ReferenceMap, j: int, phi: PhiFit, basis=None) -> LocalSpace:
    if not 0 <= j < geom.n_vertices:
        raise ExpansionSizeError('H01402', f'Vertex index [{j}] outside an element of {geom.n_vertices} vertices')
    space = ElementSpace(geom, rmap, phi, basis)
    space.pullbacks
    return space.local_space(j)


def _check_size(space, coeffs):
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (space.dim,):
        raise ExpansionSizeError('H01501', f'Expansion needs {space.dim} coefficients, got {coeffs.shape}')
    return coeffs


def eval_expansion(space: LocalSpace, coeffs, points):
    coeffs = _check_size(space, coeffs)
    values, _ = space.evaluate(points)
    return values @ coeffs


def eval_expansion_gradient(space: LocalSpace, coeffs, points):
    coeffs = _check_size(space, coeffs)
    _, gradients = space.evaluate(points)
    return np.einsum('ndk,d->nk', gradients, coeffs)


@dataclass(frozen=True)
class LocalBasisExpansion:
    """ φ^N_{j,E} = Σ c^φ_k h_k and its gradient surrogate q^N_{j,E} = Σ c^q_k ∇h_k. """
    space: LocalSpace
    c_phi: np.ndarray
    c_q: np.ndarray

    def value(self, points):
        return eval_expansion(self.space, self.c_phi, points)

    def gradient(self, points):
        return eval_expansion_gradient(self.space, self.c_q, points)


class ElementBasis:
    """
    All NAVEM basis functions of one element: row j of ``c_phi`` and ``c_q`` holds the
    coefficients of the function attached to vertex j.
    """

    def __init__(self, space: ElementSpace, c_phi, c_q):
        self.space = space
        self.c_phi = np.asarray(c_phi, dtype=float)
        self.c_q = np.asarray(c_q, dtype=float)
        expected = (space.n_vertices, space.dim)
        if self.c_phi.shape != expected or self.c_q.shape != expected:
            raise ExpansionSizeError(
                'H01502', f'Element basis needs coefficient arrays of shape {expected}, '
                          f'got {self.c_phi.shape} and {self.c_q.shape}')

    @property
    def n_vertices(self):
        return self.space.n_vertices

    def expansion(self, j):
        return LocalBasisExpansion(space=self.space.local_space(j), c_phi=self.c_phi[j], c_q=self.c_q[j])

    def evaluate(self, points):
        """ Values (n, N_v) from c^φ and gradients (n, N_v, 2) from c^q. """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n, n_h = self.n_vertices, self.space.basis.size
        values = np.empty((len(points), n))
        gradients = np.empty((len(points), n, 2))
        for j in range(n):
            h_values, h_gradients = self.space.harmonic(points, j)
            values[:, j] = h_values @ self.c_phi[j, :n_h]
            gradients[:, j] = np.einsum('ndk,d->nk', h_gradients, self.c_q[j, :n_h])

        if np.any(self.c_phi[:, n_h:]) or np.any(self.c_q[:, n_h:]):
            a_values, a_gradients = self.space.auxiliary(points)
            for j in range(n):
                anchors = [(j - 1) % n, j, (j + 1) % n]
                values[:, j] += a_values[:, anchors] @ self.c_phi[j, n_h:]
                gradients[:, j] += np.einsum('ndk,d->nk', a_gradients[:, anchors], self.c_q[j, n_h:])
        return values, gradients
