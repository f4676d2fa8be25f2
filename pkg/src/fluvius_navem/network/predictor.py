from pathlib import Path

import numpy as np

from .. import config, logger
from ..exceptions import ModelFormatError, ModelNotFoundError
from ..harmonic import ElementBasis, ElementSpace, HarmonicBasis, PhiFit, vertex_frame
from ..mesh import ElementGeometry, PolygonalMesh, ReferenceMap, build_reference_map, element_geometry
from ..status import NetworkTarget
from .encoding import encode_element
from .io import load_model, model_filename
from .mlp import MlpModel
from .trace import trace_systems


class ModelBank:
    """ Trained networks indexed by (vertex count, target), loaded lazily from ``directory``. """

    def __init__(self, directory=None, models=None):
        self.directory = Path(config.MODELS_DIR if directory is None else directory)
        self._models = {}
        for model in models or ():
            self.add(model)

    def add(self, model: MlpModel):
        self._models[(model.n_vertices, model.target)] = model
        return model

    def get(self, n_vertices, target) -> MlpModel:
        key = (n_vertices, NetworkTarget(target))
        if key not in self._models:
            path = self.directory / model_filename(*key)
            if not path.exists():
                raise ModelNotFoundError(
                    'N01801', f'No {key[1].value} network for polygons with {n_vertices} vertices '
                              f'(polygon class {n_vertices}): {path} not found')
            self._models[key] = load_model(path)
            logger.info('Loaded %s network for %d-gons from %s', key[1].value, n_vertices, path)
        return self._models[key]


def triangle_coefficients(space: ElementSpace):
    """
    P₁ hat functions of a triangle in the frame of each vertex: a + b·x̃₁ + c·x̃₂ is the
    expansion [a, r̂b, r̂c, 0, …].
    """
    reference = space.reference_vertices
    gradients = np.linalg.solve(np.column_stack([np.ones(3), reference]), np.eye(3))
    coefficients = np.zeros((3, space.dim))
    for j in range(3):
        coefficients[j, 0] = gradients[0, j]
        coefficients[j, 1:3] = space.basis.half_width * (vertex_frame(reference, j) @ gradients[1:, j])
    return coefficients


class BasisPredictor:
    """ Coefficients of the NAVEM basis functions of one element. Triangles always get the P₁ hats. """

    def __init__(self, phi: PhiFit, basis: HarmonicBasis = None):
        self.phi = phi
        self.basis = basis or HarmonicBasis()

    def space(self, geom: ElementGeometry, rmap: ReferenceMap = None) -> ElementSpace:
        return ElementSpace(geom, rmap or build_reference_map(geom), self.phi, self.basis)

    def predict_element(self, geom: ElementGeometry, rmap: ReferenceMap = None) -> ElementBasis:
        space = self.space(geom, rmap)
        if geom.n_vertices == 3:
            coefficients = triangle_coefficients(space)
            return ElementBasis(space, coefficients, coefficients)
        c_phi, c_q = self.coefficients(space)
        return ElementBasis(space, c_phi, c_q)

    def coefficients(self, space: ElementSpace):
        raise NotImplementedError

    def predict_mesh(self, mesh: PolygonalMesh):
        return [self.predict_element(element_geometry(mesh, k)) for k in range(mesh.n_cells)]


class TrianglePredictor(BasisPredictor):
    """ FEM-P1 on triangle meshes. """

    def coefficients(self, space):
        raise ModelNotFoundError(
            'N01802', f'Only triangles are supported without a basis source, got {space.n_vertices} vertices')


class TraceFitPredictor(BasisPredictor):
    """ Least-squares fit of every vertex function to its hat trace; the gradient uses the same coefficients. """

    def __init__(self, phi: PhiFit, basis: HarmonicBasis = None, n_points: int = None):
        super().__init__(phi, basis)
        self.n_points = n_points

    def coefficients(self, space):
        phi_system, _ = trace_systems(space, self.n_points)
        c_phi = np.stack([np.linalg.lstsq(a, b, rcond=None)[0]
                          for a, b in zip(phi_system.matrix, phi_system.target)])
        return c_phi, c_phi.copy()


class NetworkPredictor(BasisPredictor):
    """ Coefficients predicted by the value and gradient networks of the element's polygon class. """

    def __init__(self, models: ModelBank, phi: PhiFit, basis: HarmonicBasis = None):
        super().__init__(phi, basis)
        self.models = models

    def _networks(self, n_vertices):
        networks = []
        for target in (NetworkTarget.VALUE, NetworkTarget.GRADIENT):
            model = self.models.get(n_vertices, target)
            if model.max_order != self.basis.max_order:
                raise ModelFormatError(
                    'N01803', f'{target.value} network for {n_vertices}-gons has order {model.max_order}, '
                              f'the harmonic basis has order {self.basis.max_order}')
            networks.append(model)
        return networks

    def coefficients(self, space):
        value, gradient = self._networks(space.n_vertices)
        inputs = encode_element(space.geom, space.rmap)
        return value.forward(inputs), gradient.forward(inputs)

    def predict_mesh(self, mesh: PolygonalMesh):
        """ One forward pass per polygon class over all vertices of all its elements. """
        spaces = [self.space(element_geometry(mesh, k)) for k in range(mesh.n_cells)]
        classes = {}
        for k, space in enumerate(spaces):
            if space.n_vertices > 3:
                classes.setdefault(space.n_vertices, []).append(k)

        predicted = {}
        for n_vertices, members in classes.items():
            value, gradient = self._networks(n_vertices)
            inputs = np.vstack([encode_element(spaces[k].geom, spaces[k].rmap) for k in members])
            c_phi, c_q = value.forward(inputs), gradient.forward(inputs)
            for index, k in enumerate(members):
                rows = slice(index * n_vertices, (index + 1) * n_vertices)
                predicted[k] = ElementBasis(spaces[k], c_phi[rows], c_q[rows])

        return [predicted[k] if k in predicted else self.predict_element(space.geom, space.rmap)
                for k, space in enumerate(spaces)]


def predict_basis(models: ModelBank, geom: ElementGeometry, rmap: ReferenceMap, j: int, phi: PhiFit,
                  basis: HarmonicBasis = None):
    """ φ^N_{j,E} and q^N_{j,E} of one vertex. """
    return NetworkPredictor(models, phi, basis).predict_element(geom, rmap).expansion(j)
