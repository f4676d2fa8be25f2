from .. import logger, config

from .tensor import IDENTITY, contract, dyad, frobenius, lame_tensor, over, trace4, under
from .law import ConstitutiveLaw, LinearLame, LinearTheta, LogTheta, NeoHookean, StrainDependent, Theta
from .manufactured import (
    BubbleField, DisplacementField, LinearField, boundary_traction, manufactured_body_force)

__all__ = [
    "boundary_traction",
    "BubbleField",
    "ConstitutiveLaw",
    "contract",
    "DisplacementField",
    "dyad",
    "frobenius",
    "IDENTITY",
    "lame_tensor",
    "LinearField",
    "LinearLame",
    "LinearTheta",
    "LogTheta",
    "manufactured_body_force",
    "NeoHookean",
    "over",
    "StrainDependent",
    "Theta",
    "trace4",
    "under",
]
