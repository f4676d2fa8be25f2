from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.linalg import qr, solve_triangular

from .. import config, logger
from ..exceptions import PhiFitError
from .basis import complex_powers

PHI_HEADER = "phi-fit 1"
RANK_TOLERANCE = 1e-14
KINK_CLUSTER = (1.0 / 3.0, 1.0, 3.0)


def pole_offsets(n_poles):
    """ d_α = z_α − 1 = 2 exp(−4(√N¹ − √α)), α = 1..N¹ """
    alpha = np.arange(1, n_poles + 1)
    return 2.0 * np.exp(-4.0 * (np.sqrt(n_poles) - np.sqrt(alpha)))


def _design(points, offsets, n_polys):
    """ Values and complex derivatives of the rational and polynomial terms at points (n, 2). """
    z = points[:, 0] + 1j * points[:, 1]
    shifted = (points[:, 0] - 1.0) + 1j * points[:, 1]
    denom = shifted[:, None] - offsets[None, :]
    rational = offsets / denom
    rational_d = -offsets / denom ** 2

    powers = complex_powers(z / 2.0, n_polys)
    beta = np.arange(n_polys + 1)
    poly_d = np.zeros_like(powers)
    poly_d[:, 1:] = 0.5 * beta[1:] * powers[:, :-1]
    return np.hstack([rational, powers]), np.hstack([rational_d, poly_d])


def hat_datum(points):
    """ 1 − |x₂| on the side x₁ = 1 of (−1, 1)², zero on the other sides. """
    on_right = np.abs(points[:, 0] - 1.0) < 1e-14
    return np.where(on_right, 1.0 - np.abs(points[:, 1]), 0.0)


def boundary_samples(n_poles, n_samples):
    """
    Points on ∂(−1, 1)²: three per pole on each side of the kink at (1, 0), at distances
    d_α/3, d_α and 3d_α, then Chebyshev points on the four sides for the rest.
    """
    cluster = np.array([d * f for d in pole_offsets(n_poles) for f in KINK_CLUSTER])
    cluster = cluster[cluster < 1.0]
    near_kink = np.column_stack([np.ones(2 * len(cluster)), np.concatenate([cluster, -cluster])])

    per_side = max(2, -(-(n_samples - len(near_kink)) // 4))
    t = np.cos(np.pi * (np.arange(per_side) + 0.5) / per_side)
    sides = [
        np.column_stack([np.ones(per_side), t]),
        np.column_stack([-np.ones(per_side), t]),
        np.column_stack([t, -np.ones(per_side)]),
        np.column_stack([t, np.ones(per_side)]),
    ]
    return np.vstack([near_kink] + sides + [[[1.0, 0.0]]])


@dataclass(frozen=True)
class PhiFit:
    """
    Φ(z) = Σ_α c¹_α Re(d_α / (z − z_α)) + Σ_β c²_β Re((z/2)^β), harmonic on (−1, 1)²
    with the hat trace 1 − |x₂| on x₁ = 1.
    """
    pole_coefficients: np.ndarray
    polynomial_coefficients: np.ndarray
    boundary_residual: float

    @property
    def n_poles(self):
        return len(self.pole_coefficients)

    @property
    def n_polys(self):
        return len(self.polynomial_coefficients) - 1

    @property
    def poles(self):
        return 1.0 + pole_offsets(self.n_poles)

    @property
    def coefficients(self):
        return np.concatenate([self.pole_coefficients, self.polynomial_coefficients])

    def evaluate(self, points):
        """ Values (n,) and gradients (n, 2) at points of shape (n, 2). """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        terms, derivatives = _design(points, pole_offsets(self.n_poles), self.n_polys)
        coefficients = self.coefficients
        values = terms.real @ coefficients
        derivative = derivatives @ coefficients
        return values, np.column_stack([derivative.real, -derivative.imag])

    def __call__(self, points):
        return self.evaluate(points)[0]


def _least_squares(matrix, rhs):
    scale = np.linalg.norm(matrix, axis=0)
    scale[scale == 0] = 1.0
    Q, R, perm = qr(matrix / scale, mode='economic', pivoting=True)
    diagonal = np.abs(np.diag(R))
    if diagonal.min() < RANK_TOLERANCE * diagonal[0]:
        raise PhiFitError(
            'H01201', f'Rank-deficient fit (|R| ratio {diagonal.min() / diagonal[0]:.2e}): '
                      f'use fewer poles or more boundary samples')

    solution = np.empty(matrix.shape[1])
    solution[perm] = solve_triangular(R, Q.T @ rhs)
    return solution / scale


def _residual(coefficients, n_poles, n_polys, n_samples):
    points = boundary_samples(n_poles, n_samples)
    terms, _ = _design(points, pole_offsets(n_poles), n_polys)
    return float(np.abs(terms.real @ coefficients - hat_datum(points)).max())


@lru_cache(maxsize=None)
def fit_phi(n_poles: int = None, n_polys: int = None, n_samples: int = None) -> PhiFit:
    """ Least-squares fit of Φ to the hat datum, computed once per argument set. """
    n_poles = config.PHI_POLES if n_poles is None else n_poles
    n_polys = config.PHI_POLYNOMIALS if n_polys is None else n_polys
    n_samples = config.PHI_SAMPLES if n_samples is None else n_samples
    if n_samples < 2 * (n_poles + n_polys + 1):
        raise PhiFitError('H01202', f'{n_samples} boundary samples for {n_poles + n_polys + 1} unknowns: '
                                    f'at least {2 * (n_poles + n_polys + 1)} are required')

    points = boundary_samples(n_poles, n_samples)
    terms, _ = _design(points, pole_offsets(n_poles), n_polys)
    coefficients = _least_squares(terms.real, hat_datum(points))
    residual = float(np.abs(terms.real @ coefficients - hat_datum(points)).max())
    logger.info('Fitted Phi with %d poles and %d polynomials on %d samples: residual %.3e',
                n_poles, n_polys, len(points), residual)

    return PhiFit(
        pole_coefficients=coefficients[:n_poles],
        polynomial_coefficients=coefficients[n_poles:],
        boundary_residual=residual)


def save_phi(phi: PhiFit, path):
    lines = [PHI_HEADER, str(phi.n_poles), str(phi.n_polys)]
    lines.extend(f"{c:.17g}" for c in phi.coefficients)
    Path(path).write_text("\n".join(lines) + "\n")


def load_phi(path) -> PhiFit:
    lines = [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines or lines[0] != PHI_HEADER:
        raise PhiFitError('H01301', f'Line 1: expected header {PHI_HEADER!r}')
    try:
        n_poles, n_polys = int(lines[1]), int(lines[2])
        coefficients = np.array([float(v) for v in lines[3:]])
    except (IndexError, ValueError) as e:
        raise PhiFitError('H01302', f'Malformed Phi file {path}: {e}')

    if len(coefficients) != n_poles + n_polys + 1:
        raise PhiFitError('H01303', f'Expected {n_poles + n_polys + 1} coefficients, found {len(coefficients)}')

    n_samples = max(config.PHI_SAMPLES, 2 * (n_poles + n_polys + 1))
    return PhiFit(
        pole_coefficients=coefficients[:n_poles],
        polynomial_coefficients=coefficients[n_poles:],
        boundary_residual=_residual(coefficients, n_poles, n_polys, n_samples))
