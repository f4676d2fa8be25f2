from .. import logger, config

from .mlp import MlpModel, forward, init_model, input_size, output_size
from .encoding import encode_element, encode_input
from .trace import CompressedTrace, TraceSystem, compress, trace_systems
from .dataset import (
    TrainingSet, build_training_set, generate_dataset, generate_rdqm, generate_vm, is_strictly_convex,
    load_polygons, save_polygons)
from .loss import TraceLoss, loss_gradient_target, loss_value
from .training import (
    OptimizerState, TrainerConfig, TrainingResult, load_optimizer_state, optimizer_arrays_path, save_optimizer_state,
    train)
from .io import load_model, model_filename, save_model
from .predictor import (
    BasisPredictor, ModelBank, NetworkPredictor, TraceFitPredictor, TrianglePredictor, predict_basis,
    triangle_coefficients)

__all__ = [
    "BasisPredictor",
    "build_training_set",
    "compress",
    "CompressedTrace",
    "encode_element",
    "encode_input",
    "forward",
    "generate_dataset",
    "generate_rdqm",
    "generate_vm",
    "init_model",
    "input_size",
    "is_strictly_convex",
    "load_model",
    "load_optimizer_state",
    "load_polygons",
    "loss_gradient_target",
    "loss_value",
    "MlpModel",
    "model_filename",
    "ModelBank",
    "NetworkPredictor",
    "optimizer_arrays_path",
    "OptimizerState",
    "output_size",
    "predict_basis",
    "save_model",
    "save_optimizer_state",
    "save_polygons",
    "TraceFitPredictor",
    "TraceLoss",
    "TraceSystem",
    "trace_systems",
    "train",
    "TrainerConfig",
    "TrainingResult",
    "TrainingSet",
    "TrianglePredictor",
    "triangle_coefficients",
]
