from ._meta import config, logger

from .mesh import PolygonalMesh, load_mesh, save_mesh
from .harmonic import HarmonicBasis, PhiFit, fit_phi, load_phi, save_phi
from .material import LinearLame, NeoHookean, StrainDependent
from .network import ModelBank, NetworkPredictor, TraceFitPredictor, TrianglePredictor
from .solver import ElasticityProblem, NavemKernel, NewtonDriver, VemKernel, solve
from .experiment import ExperimentSpec, load_spec, run_experiment
from .validation import run_validation

__all__ = [
    "config",
    "ElasticityProblem",
    "ExperimentSpec",
    "fit_phi",
    "HarmonicBasis",
    "LinearLame",
    "load_mesh",
    "load_phi",
    "load_spec",
    "logger",
    "ModelBank",
    "NavemKernel",
    "NeoHookean",
    "NetworkPredictor",
    "NewtonDriver",
    "PhiFit",
    "PolygonalMesh",
    "run_experiment",
    "run_validation",
    "save_mesh",
    "save_phi",
    "solve",
    "StrainDependent",
    "TraceFitPredictor",
    "TrianglePredictor",
    "VemKernel",
]
