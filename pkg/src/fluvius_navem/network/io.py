from pathlib import Path

import numpy as np

from ..exceptions import ModelFormatError
from ..status import NetworkTarget
from .mlp import MlpModel

MODEL_HEADER = "navem-mlp 1"


def model_filename(n_vertices, target):
    return f"mlp-nv{n_vertices}-{NetworkTarget(target).value}.txt"


def save_model(model: MlpModel, path):
    lines = [MODEL_HEADER, model.target.value, str(model.n_vertices), str(model.max_order), str(model.n_layers)]
    lines.extend(f"{a.shape[0]} {a.shape[1]}" for a in model.weights)
    for a, b in zip(model.weights, model.biases):
        lines.extend(f"{v:.17g}" for v in a.ravel())
        lines.extend(f"{v:.17g}" for v in b)
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path) -> MlpModel:
    lines = [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines or lines[0] != MODEL_HEADER:
        raise ModelFormatError('N01701', f'Line 1: expected header {MODEL_HEADER!r}')

    try:
        target = NetworkTarget(lines[1])
        n_vertices, max_order, n_layers = int(lines[2]), int(lines[3]), int(lines[4])
        dims = [tuple(int(v) for v in line.split()) for line in lines[5:5 + n_layers]]
        values = np.array([float(v) for v in lines[5 + n_layers:]])
    except (IndexError, ValueError) as e:
        raise ModelFormatError('N01702', f'Malformed model file {path}: {e}')

    if len(dims) != n_layers or any(len(d) != 2 for d in dims):
        raise ModelFormatError('N01703', f'Expected {n_layers} layer shapes "<out> <in>"')
    expected = sum(rows * cols + rows for rows, cols in dims)
    if len(values) != expected:
        raise ModelFormatError('N01704', f'Expected {expected} parameters, found {len(values)}')

    weights, biases, offset = [], [], 0
    for rows, cols in dims:
        weights.append(values[offset:offset + rows * cols].reshape(rows, cols))
        offset += rows * cols
        biases.append(values[offset:offset + rows])
        offset += rows
    return MlpModel(weights, biases, target=target, n_vertices=n_vertices, max_order=max_order)
