from .. import logger, config

from .basis import HarmonicBasis, eval_harmonic
from .phi import PhiFit, fit_phi, load_phi, save_phi, pole_offsets
from .space import (
    ElementBasis, ElementSpace, LocalBasisExpansion, LocalSpace, PhiPullback, vertex_frame,
    build_local_space, eval_expansion, eval_expansion_gradient)

__all__ = [
    "build_local_space",
    "ElementBasis",
    "ElementSpace",
    "eval_expansion",
    "eval_expansion_gradient",
    "eval_harmonic",
    "fit_phi",
    "HarmonicBasis",
    "load_phi",
    "LocalBasisExpansion",
    "LocalSpace",
    "PhiFit",
    "PhiPullback",
    "pole_offsets",
    "save_phi",
    "vertex_frame",
]
