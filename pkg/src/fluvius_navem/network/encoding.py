import numpy as np
from scipy.spatial.distance import pdist

from ..exceptions import ExpansionSizeError
from ..harmonic import vertex_frame
from ..mesh import ElementGeometry, ReferenceMap


def encode_input(geom: ElementGeometry, rmap: ReferenceMap, j: int):
    """
    Reference vertices listed from v̂_j on, translated so that v̂_j is the origin, rotated so that
    the centroid lies on the +x₁ axis and rescaled to diameter 2. The anchor itself is dropped.
    """
    if not 0 <= j < geom.n_vertices:
        raise ExpansionSizeError('N01201', f'Vertex index [{j}] outside an element of {geom.n_vertices} vertices')
    reference = rmap.to_reference(geom.vertices)
    rotation = vertex_frame(reference, j)
    rolled = np.roll(reference, -j, axis=0)
    local = (rolled[1:] - rolled[0]) @ rotation.T
    return (2.0 / pdist(reference).max() * local).ravel()


def encode_element(geom: ElementGeometry, rmap: ReferenceMap):
    """ Encodings of all vertices of one element, one row per vertex. """
    return np.stack([encode_input(geom, rmap, j) for j in range(geom.n_vertices)])
