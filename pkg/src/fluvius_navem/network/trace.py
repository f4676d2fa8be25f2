from dataclasses import dataclass

import numpy as np

from ..harmonic import ElementSpace
from ..solver.quadrature import build_edge_quadrature


@dataclass(frozen=True)
class TraceSystem:
    """
    Weighted rows ``matrix`` (N_v, m, dim) and data ``target`` (N_v, m) such that the squared
    trace misfit of the expansion c at vertex j is ‖matrix[j] c − target[j]‖².
    """
    matrix: np.ndarray
    target: np.ndarray


@dataclass(frozen=True)
class CompressedTrace:
    """ The same misfit as ‖R c − z‖² + κ, with R square or wide. """
    R: np.ndarray
    z: np.ndarray
    kappa: np.ndarray

    def misfit(self, coefficients):
        residual = np.einsum('skd,sd->sk', self.R, coefficients) - self.z
        return (residual ** 2).sum(axis=1) + self.kappa, residual

    def take(self, index):
        return CompressedTrace(self.R[index], self.z[index], self.kappa[index])


def compress(system: TraceSystem) -> CompressedTrace:
    matrix = system.matrix.reshape((-1,) + system.matrix.shape[-2:])
    target = system.target.reshape(-1, system.target.shape[-1])
    Q, R = np.linalg.qr(matrix)
    z = np.einsum('smk,sm->sk', Q, target)
    kappa = np.maximum((target ** 2).sum(axis=1) - (z ** 2).sum(axis=1), 0.0)
    return CompressedTrace(R=R, z=z, kappa=kappa)


def trace_systems(space: ElementSpace, n_points: int = None):
    """
    Misfit systems of every vertex function of the element against the piecewise-linear hat trace
    on ∂E, by Gauss quadrature on each edge.

    The φ system measures h_E⁻¹‖·‖²_{L²(∂E)} + h_E‖∂_t ·‖²_{L²(∂E)}; the q system measures the
    tangential misfit ‖q·t − ∂_t φ‖²_{L²(∂E)} against the hat φ.
    """
    geom = space.geom
    n_v = geom.n_vertices
    rule = build_edge_quadrature(geom, n_points)
    points = rule.points.reshape(-1, 2)
    weights = rule.weights.ravel()
    edge = np.repeat(np.arange(n_v), len(rule.params))
    param = np.tile(rule.params, n_v)
    tangents = geom.tangents[edge]
    h = geom.diameter

    a_values, a_gradients = space.auxiliary(points)
    phi_rows, phi_data, q_rows, q_data = [], [], [], []
    for j in range(n_v):
        anchors = [(j - 1) % n_v, j, (j + 1) % n_v]
        h_values, h_gradients = space.harmonic(points, j)
        values = np.hstack([h_values, a_values[:, anchors]])
        gradients = np.concatenate([h_gradients, a_gradients[:, anchors]], axis=1)
        slopes = np.einsum('ndk,nk->nd', gradients, tangents)

        leaving, arriving = (edge == j), (edge == (j - 1) % n_v)
        trace = np.where(leaving, 1.0 - param, 0.0) + np.where(arriving, param, 0.0)
        slope = (arriving.astype(float) - leaving.astype(float)) / geom.edge_lengths[edge]

        low, high = np.sqrt(weights / h), np.sqrt(weights * h)
        phi_rows.append(np.vstack([low[:, None] * values, high[:, None] * slopes]))
        phi_data.append(np.concatenate([low * trace, high * slope]))
        q_rows.append(np.sqrt(weights)[:, None] * slopes)
        q_data.append(np.sqrt(weights) * slope)

    return (TraceSystem(np.stack(phi_rows), np.stack(phi_data)),
            TraceSystem(np.stack(q_rows), np.stack(q_data)))
