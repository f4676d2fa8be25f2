from .. import logger, config

from .operators import VemElementOperators, build_element_operators
from .stabilization import StabilizationPolicy, stabilization_scale
from .local import displaced_area, vem_determinant, vem_load, vem_local_tangent
from .errors import vem_l2_and_h1_error

__all__ = [
    "build_element_operators",
    "displaced_area",
    "StabilizationPolicy",
    "stabilization_scale",
    "vem_determinant",
    "vem_l2_and_h1_error",
    "vem_load",
    "vem_local_tangent",
    "VemElementOperators",
]
