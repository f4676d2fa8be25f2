import enum


class BoundaryMarker(enum.Enum):
    DIRICHLET   = "D"
    NEUMANN     = "N"


class NetworkTarget(enum.Enum):
    VALUE       = "value"       # predicts c^phi
    GRADIENT    = "gradient"    # predicts c^q


class StabilizationKind(enum.Enum):
    """
    Scaling of the VEM stabilization term alpha_E(w_h):
    - NORM_BASED: Frobenius norm of the elastic modulus at the evaluation state
    - TRACE_BASED: tr(A)/4 at the evaluation state, may be negative
    - STIFFNESS_BASED: diagonal of the element consistency tangent
    - FIXED_SCALAR: user constant
    """
    NORM_BASED      = "norm"
    TRACE_BASED     = "trace"
    STIFFNESS_BASED = "stiffness"
    FIXED_SCALAR    = "fixed"


class StiffnessFormula(enum.Enum):
    ROOT_SUM_SQUARES    = "rss"
    SUM                 = "sum"


class EvaluationState(enum.Enum):
    PREVIOUS_INCREMENT  = "previous"    # w_h = u_h^{n-1}
    ZERO                = "zero"        # w_h = 0, i.e. fixed scaling


class DeterminantMode(enum.Enum):
    POINTWISE           = "pointwise"
    PROJECTED_CONSTANT  = "projected"
    MEAN_VALUE          = "mean"


class Method(enum.Enum):
    NAVEM   = "navem"
    VEM     = "vem"
    FEM_P1  = "fem-p1"


class BasisSource(enum.Enum):
    NETWORK     = "network"
    TRACE_FIT   = "trace-fit"


class Scenario(enum.Enum):
    TEST1       = "test1"
    TEST2_CASE1 = "test2-case1"
    TEST2_CASE2 = "test2-case2"
    TEST3       = "test3"


class MeshFamily(enum.Enum):
    DISTORTED_QUAD  = "quad"
    CARTESIAN       = "cartesian"
    VORONOI         = "voronoi"
    TRIANGLE        = "triangle"
