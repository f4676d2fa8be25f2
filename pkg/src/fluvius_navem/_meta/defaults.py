# Local approximation space
HARMONIC_ORDER = 20
REFERENCE_HALF_WIDTH = 3.0

# Auxiliary function fit
PHI_POLES = 60
PHI_POLYNOMIALS = 30
PHI_SAMPLES = 2000

# Quadrature
QUADRATURE_DEGREE = 8
EDGE_QUADRATURE_POINTS = 8

# Newton driver
NEWTON_TOL = 1e-10
NEWTON_MAX_STEPS = 20
NEWTON_HARD_CAP = 200

# Networks and training
MLP_LAYERS = 5
MLP_WIDTH = 50
ADAM_EPOCHS = 5000
BFGS_STEPS = 5000
ADAM_LR = 1e-3
L2_REG = 1e-8
DATASET_SIZE = 2000
MODELS_DIR = "models"

# Meshes
QUAD_DISTORTION = 0.3
SINE_AMPLITUDE = 0.05

# Experiments
RESULTS_DIR = "results"
SLICE_POINTS = 200
SLICE_HEIGHT = 0.5
FEM_REFERENCE_GRID = 64
