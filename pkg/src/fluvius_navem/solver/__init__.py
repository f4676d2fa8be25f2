from .. import logger, config

from .quadrature import (
    EdgeQuadrature, QuadratureRule, build_edge_quadrature, build_quadrature, collapsed_triangle_rule,
    ear_clipping, gauss_interval)
from .assembly import (
    DofMap, ElasticityProblem, ElementKernel, GlobalSystem, NavemKernel, VemKernel, assemble, traction_load)
from .newton import IncrementRecord, NewtonDriver, SolveReport, newton_solve
from .determinant import navem_determinant, vem_determinant
from .driver import Solution, solve

__all__ = [
    "assemble",
    "build_edge_quadrature",
    "build_quadrature",
    "collapsed_triangle_rule",
    "DofMap",
    "ear_clipping",
    "EdgeQuadrature",
    "ElasticityProblem",
    "ElementKernel",
    "gauss_interval",
    "GlobalSystem",
    "IncrementRecord",
    "navem_determinant",
    "NavemKernel",
    "newton_solve",
    "NewtonDriver",
    "QuadratureRule",
    "solve",
    "Solution",
    "SolveReport",
    "traction_load",
    "vem_determinant",
    "VemKernel",
]
