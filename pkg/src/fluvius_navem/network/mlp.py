from dataclasses import dataclass, field
from typing import List

import numpy as np

from .. import config
from ..exceptions import ConfigurationError, ModelFormatError
from ..status import NetworkTarget


def input_size(n_vertices):
    return 2 * (n_vertices - 1)


def output_size(max_order):
    return 2 * max_order + 4


@dataclass
class MlpModel:
    """
    x_ℓ = tanh(A_ℓ x_{ℓ−1} + b_ℓ) on hidden layers, x_L = A_L x_{L−1} + b_L on the output layer.
    ``weights[ℓ]`` has shape (out, in).
    """
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    target: NetworkTarget
    n_vertices: int
    max_order: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = [np.asarray(a, dtype=float) for a in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        self.target = NetworkTarget(self.target)
        self._validate()

    def _validate(self):
        if not self.weights or len(self.weights) != len(self.biases):
            raise ModelFormatError(
                'N01101', f'{len(self.weights)} weight matrices for {len(self.biases)} bias vectors')

        if self.weights[0].shape[1] != input_size(self.n_vertices):
            raise ModelFormatError(
                'N01102', f'Input dimension {self.weights[0].shape[1]} does not match '
                          f'{input_size(self.n_vertices)} for polygons with {self.n_vertices} vertices')

        if self.weights[-1].shape[0] != output_size(self.max_order):
            raise ModelFormatError(
                'N01103', f'Output dimension {self.weights[-1].shape[0]} does not match '
                          f'{output_size(self.max_order)} for order {self.max_order}')

        for index, (a, b) in enumerate(zip(self.weights, self.biases)):
            if a.ndim != 2 or b.shape != (a.shape[0],):
                raise ModelFormatError('N01104', f'Layer [{index}] has weights {a.shape} and bias {b.shape}')
            if index and a.shape[1] != self.weights[index - 1].shape[0]:
                raise ModelFormatError(
                    'N01105', f'Layer [{index}] expects {a.shape[1]} inputs, '
                              f'previous layer gives {self.weights[index - 1].shape[0]}')

    @property
    def n_layers(self):
        return len(self.weights)

    @property
    def input_size(self):
        return self.weights[0].shape[1]

    @property
    def output_size(self):
        return self.weights[-1].shape[0]

    @property
    def n_parameters(self):
        return sum(a.size + b.size for a, b in zip(self.weights, self.biases))

    def parameters(self):
        """ Flat copy of the parameters: A_1, b_1, A_2, b_2, … """
        return np.concatenate([np.concatenate([a.ravel(), b]) for a, b in zip(self.weights, self.biases)])

    def set_parameters(self, flat):
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (self.n_parameters,):
            raise ModelFormatError('N01106', f'Expected {self.n_parameters} parameters, got {flat.shape}')
        offset = 0
        for a, b in zip(self.weights, self.biases):
            a[...] = flat[offset:offset + a.size].reshape(a.shape)
            offset += a.size
            b[...] = flat[offset:offset + b.size]
            offset += b.size
        return self

    def weight_mask(self):
        """ 1 on the entries of the A_ℓ in the flat layout, 0 on the biases. """
        return np.concatenate([np.concatenate([np.ones(a.size), np.zeros(b.size)])
                               for a, b in zip(self.weights, self.biases)])

    def copy(self):
        return MlpModel(
            weights=[a.copy() for a in self.weights], biases=[b.copy() for b in self.biases],
            target=self.target, n_vertices=self.n_vertices, max_order=self.max_order, meta=dict(self.meta))

    def _check_input(self, inputs):
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        if inputs.shape[1] != self.input_size:
            raise ConfigurationError(
                'N01107', f'Input batch of width {inputs.shape[1]}, model expects {self.input_size}')
        return inputs

    def forward(self, inputs, keep_activations=False):
        """ Coefficient batch (n, 2ℓ̂+4) for an input batch (n, 2(N_v−1)). """
        activations = [self._check_input(inputs)]
        for index, (a, b) in enumerate(zip(self.weights, self.biases)):
            z = activations[-1] @ a.T + b
            activations.append(z if index == self.n_layers - 1 else np.tanh(z))
        return activations if keep_activations else activations[-1]

    def __call__(self, inputs):
        return self.forward(inputs)

    def backward(self, activations, output_gradient):
        """ Flat parameter gradient given dL/d(output) for the batch that produced ``activations``. """
        grads = []
        delta = np.asarray(output_gradient, dtype=float)
        for index in range(self.n_layers - 1, -1, -1):
            previous = activations[index]
            grads.append((delta.T @ previous, delta.sum(axis=0)))
            if index:
                delta = (delta @ self.weights[index]) * (1.0 - previous ** 2)
        return np.concatenate([np.concatenate([ga.ravel(), gb]) for ga, gb in reversed(grads)])


def init_model(n_vertices: int, target, layers: int = None, width: int = None, max_order: int = None,
               seed: int = 0) -> MlpModel:
    """ Glorot-uniform weights and zero biases. ``layers = 1`` gives an affine model. """
    layers = config.MLP_LAYERS if layers is None else layers
    width = config.MLP_WIDTH if width is None else width
    max_order = config.HARMONIC_ORDER if max_order is None else max_order
    if layers < 1 or width < 1 or n_vertices < 3:
        raise ConfigurationError(
            'N01108', f'Invalid network shape: {layers} layers, width {width}, {n_vertices} vertices')

    sizes = [input_size(n_vertices)] + [width] * (layers - 1) + [output_size(max_order)]
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases, target=target, n_vertices=n_vertices, max_order=max_order)


def forward(model: MlpModel, inputs):
    return model.forward(inputs)
