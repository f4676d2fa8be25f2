from dataclasses import dataclass

import numpy as np

from .. import config
from ..exceptions import ConfigurationError
from ..status import NetworkTarget
from .dataset import TrainingSet
from .mlp import MlpModel


def _check_class(model: MlpModel, training_set: TrainingSet):
    if model.n_vertices != training_set.n_vertices or model.max_order != training_set.max_order:
        raise ConfigurationError(
            'N01301', f'Model for {model.n_vertices}-gons of order {model.max_order} applied to a set of '
                      f'{training_set.n_vertices}-gons of order {training_set.max_order}')


@dataclass
class TraceLoss:
    """
    L = sqrt(mean_s ε_s²) + λ Σ_ℓ ‖A_ℓ‖², where ε_s is the trace misfit of the expansion predicted
    for sample s: the φ misfit for value networks, the tangential q misfit for gradient networks.
    """
    model: MlpModel
    training_set: TrainingSet
    l2_reg: float = None

    def __post_init__(self):
        _check_class(self.model, self.training_set)
        self.l2_reg = config.L2_REG if self.l2_reg is None else self.l2_reg
        self.trace = self.training_set.trace(self.model.target)
        self.mask = self.model.weight_mask()

    def misfits(self, params=None):
        if params is not None:
            self.model.set_parameters(params)
        return self.trace.misfit(self.model.forward(self.training_set.inputs))[0]

    def value(self, params=None):
        return self.value_and_gradient(params, with_gradient=False)[0]

    def value_and_gradient(self, params=None, with_gradient=True):
        model = self.model
        if params is not None:
            model.set_parameters(params)
        activations = model.forward(self.training_set.inputs, keep_activations=True)
        squared, residual = self.trace.misfit(activations[-1])
        mean = squared.mean()
        flat = model.parameters()
        loss = float(np.sqrt(mean) + self.l2_reg * np.sum((flat * self.mask) ** 2))
        if not with_gradient:
            return loss, None

        gradient = 2.0 * self.l2_reg * flat * self.mask
        if mean > 0.0:
            output_gradient = np.einsum('skd,sk->sd', self.trace.R, residual) / (len(squared) * np.sqrt(mean))
            gradient += model.backward(activations, output_gradient)
        return loss, gradient

    __call__ = value_and_gradient


def loss_value(model: MlpModel, training_set: TrainingSet, l2_reg: float = None) -> float:
    """ L_φ of a value network. """
    if model.target != NetworkTarget.VALUE:
        raise ConfigurationError('N01302', f'L_phi needs a value network, got target {model.target.value!r}')
    return TraceLoss(model, training_set, l2_reg).value()


def loss_gradient_target(model: MlpModel, training_set: TrainingSet, l2_reg: float = None) -> float:
    """ L_q of a gradient network. """
    if model.target != NetworkTarget.GRADIENT:
        raise ConfigurationError('N01303', f'L_q needs a gradient network, got target {model.target.value!r}')
    return TraceLoss(model, training_set, l2_reg).value()
