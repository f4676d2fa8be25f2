from dataclasses import dataclass

import numpy as np

from .. import config
from ..exceptions import ExpansionSizeError


def complex_powers(w, order):
    """ Columns w⁰, w¹, …, w^order built by repeated multiplication. """
    powers = np.empty(w.shape + (order + 1,), dtype=complex)
    powers[..., 0] = 1.0
    for k in range(1, order + 1):
        powers[..., k] = powers[..., k - 1] * w
    return powers


@dataclass(frozen=True)
class HarmonicBasis:
    """
    Scaled harmonic polynomials {1, Re((z/r̂)^ℓ), Im((z/r̂)^ℓ)}, ℓ = 1..ℓ̂.
    Member 2ℓ−1 is the real part, member 2ℓ the imaginary part.
    """
    max_order: int = None
    half_width: float = None

    def __post_init__(self):
        if self.max_order is None:
            object.__setattr__(self, 'max_order', config.HARMONIC_ORDER)
        if self.half_width is None:
            object.__setattr__(self, 'half_width', config.REFERENCE_HALF_WIDTH)

    @property
    def size(self):
        return 2 * self.max_order + 1

    def evaluate(self, points):
        """ Values (n, size) and gradients (n, size, 2) at reference points of shape (n, 2). """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n, order, r = len(points), self.max_order, self.half_width
        w = (points[:, 0] + 1j * points[:, 1]) / r
        powers = complex_powers(w, order)
        ells = np.arange(1, order + 1)
        derivative = ells * powers[:, :-1] / r

        values = np.empty((n, self.size))
        values[:, 0] = 1.0
        values[:, 1::2] = powers[:, 1:].real
        values[:, 2::2] = powers[:, 1:].imag

        gradients = np.zeros((n, self.size, 2))
        gradients[:, 1::2, 0] = derivative.real
        gradients[:, 1::2, 1] = -derivative.imag
        gradients[:, 2::2, 0] = derivative.imag
        gradients[:, 2::2, 1] = derivative.real
        return values, gradients


def eval_harmonic(basis: HarmonicBasis, index: int, z):
    """ Value and gradient of one basis member at a single reference point. """
    if not 0 <= index < basis.size:
        raise ExpansionSizeError('H01102', f'Harmonic member index {index} outside [0, {basis.size})')
    values, gradients = basis.evaluate(np.asarray(z, dtype=float).reshape(1, 2))
    return values[0, index], gradients[0, index]
