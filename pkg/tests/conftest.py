import numpy as np
import pytest

from fluvius_navem.harmonic import HarmonicBasis, fit_phi
from fluvius_navem.material import LinearField, LinearLame, NeoHookean, StrainDependent
from fluvius_navem.mesh import (
    generate_cartesian_mesh, generate_distorted_quad_mesh, generate_triangle_mesh, generate_voronoi_mesh)
from fluvius_navem.network import TraceFitPredictor

# Small enough to fit in well under a second, accurate enough for the local bases.
PHI_ARGS = dict(n_poles=24, n_polys=12, n_samples=800)


@pytest.fixture(scope="session")
def phi():
    return fit_phi(**PHI_ARGS)


@pytest.fixture(scope="session")
def small_basis():
    return HarmonicBasis(max_order=3)


@pytest.fixture(scope="session")
def trace_fit(phi):
    return TraceFitPredictor(phi)


@pytest.fixture
def square_mesh():
    return generate_cartesian_mesh(4)


@pytest.fixture
def quad_mesh():
    return generate_distorted_quad_mesh(4, distortion=0.3, seed=7)


@pytest.fixture
def voronoi_mesh():
    return generate_voronoi_mesh(16, lloyd_iters=2, seed=3)


@pytest.fixture
def triangle_mesh():
    return generate_triangle_mesh(4)


@pytest.fixture
def linear_lame():
    return LinearLame(mu=1.5, lam=3.0)


@pytest.fixture
def neo_hookean():
    return NeoHookean(mu=1.0, lam=5.1)


@pytest.fixture
def strain_dependent():
    return StrainDependent()


@pytest.fixture
def linear_field():
    return LinearField(constant=np.array([0.1, -0.2]), matrix=np.array([[0.03, -0.01], [0.02, 0.05]]))
