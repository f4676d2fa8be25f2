from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np
from fluvius.data import DataModel, Field
from scipy.linalg.blas import dsymv, dsyr, dsyr2

from .. import config, logger
from ..exceptions import ModelFormatError, TrainingDivergedError
from .mlp import MlpModel

OPTIM_HEADER = "navem-optim 1"
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8
ARMIJO_C1 = 1e-4
LINE_SEARCH_TRIALS = 30
CURVATURE_TOLERANCE = 1e-12

PHASE_ADAM = "adam"
PHASE_BFGS = "bfgs"
PHASE_DONE = "done"


class TrainerConfig(DataModel):
    adam_epochs: int = Field(default=config.ADAM_EPOCHS, ge=0)
    bfgs_steps: int = Field(default=config.BFGS_STEPS, ge=0)
    adam_lr: float = Field(default=config.ADAM_LR, gt=0)
    l2_reg: float = Field(default=config.L2_REG, ge=0)
    seed: int = Field(default=0)
    gtol: float = Field(default=0.0, ge=0)
    log_every: int = Field(default=500, ge=1)


@dataclass
class OptimizerState:
    """ Everything besides the parameters needed to continue a run step for step. """
    phase: str = PHASE_ADAM
    step: int = 0
    adam_m: Optional[np.ndarray] = None
    adam_v: Optional[np.ndarray] = None
    hessian: Optional[np.ndarray] = None

    def ensure(self, size):
        if self.adam_m is None:
            self.adam_m = np.zeros(size)
            self.adam_v = np.zeros(size)
        if self.phase == PHASE_BFGS and self.hessian is None:
            self.hessian = np.asfortranarray(np.eye(size))
        return self


@dataclass
class TrainingResult:
    model: MlpModel
    state: OptimizerState
    history: List[float] = field(default_factory=list)
    gradient_norms: List[float] = field(default_factory=list)

    @property
    def final_loss(self):
        return self.history[-1] if self.history else None


def _checked(phase, step, loss, gradient, params):
    if not np.isfinite(loss) or not np.all(np.isfinite(gradient)) or not np.all(np.isfinite(params)):
        raise TrainingDivergedError('N01401', f'Non-finite loss {loss} at {phase} step {step}')
    return loss


def _adam_step(objective, params, state, lr, result):
    loss, gradient = objective(params)
    _checked(PHASE_ADAM, state.step, loss, gradient, params)
    result.history.append(loss)
    result.gradient_norms.append(float(np.linalg.norm(gradient)))

    t = state.step + 1
    state.adam_m = ADAM_BETA1 * state.adam_m + (1.0 - ADAM_BETA1) * gradient
    state.adam_v = ADAM_BETA2 * state.adam_v + (1.0 - ADAM_BETA2) * gradient ** 2
    m_hat = state.adam_m / (1.0 - ADAM_BETA1 ** t)
    v_hat = state.adam_v / (1.0 - ADAM_BETA2 ** t)
    state.step = t
    return params - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPSILON)


def _symmetric(upper):
    """ Full matrix from the upper triangle kept by the BLAS updates. """
    return np.triu(upper) + np.triu(upper, 1).T


def _self_scaled_update(H, s, y):
    """
    H ← τH, then the inverse BFGS update, with τ = yᵀs / yᵀHy. Only the upper triangle of the
    Fortran-ordered ``H`` is referenced and updated, in place.
    """
    ys = float(y @ s)
    Hy = dsymv(1.0, H, y)
    yHy = float(y @ Hy)
    tau = ys / yHy
    H *= tau
    Hy *= tau
    yHy *= tau
    rho = 1.0 / ys
    H = dsyr2(-rho, s, Hy, a=H, overwrite_a=1)
    return dsyr(rho * rho * yHy + rho, s, a=H, overwrite_a=1)


def _bfgs_step(objective, params, loss, gradient, state, result):
    """ One Armijo-backtracked quasi-Newton step. Returns the new point, or None when no descent is found. """
    H = state.hessian
    for attempt in range(2):
        direction = dsymv(-1.0, H, gradient)
        slope = float(gradient @ direction)
        if slope >= 0.0:
            direction, slope = -gradient, -float(gradient @ gradient)

        alpha = 1.0
        for _ in range(LINE_SEARCH_TRIALS):
            candidate = params + alpha * direction
            trial_loss, trial_gradient = objective(candidate)
            if np.isfinite(trial_loss) and trial_loss <= loss + ARMIJO_C1 * alpha * slope:
                break
            alpha *= 0.5
        else:
            if attempt == 0:
                logger.warning('Line search failed at BFGS step %d: resetting the inverse Hessian', state.step)
                H[...] = 0.0
                np.fill_diagonal(H, 1.0)
                continue
            return None

        _checked(PHASE_BFGS, state.step, trial_loss, trial_gradient, candidate)
        s = candidate - params
        y = trial_gradient - gradient
        if float(y @ s) > CURVATURE_TOLERANCE * np.linalg.norm(y) * np.linalg.norm(s):
            state.hessian = _self_scaled_update(H, s, y)
        state.step += 1
        return candidate, trial_loss, trial_gradient
    return None


def train(model: MlpModel, objective: Callable, trainer: TrainerConfig = None, state: OptimizerState = None,
          stop_after: int = None) -> TrainingResult:
    """
    Full-batch Adam for ``adam_epochs`` steps, then self-scaled BFGS for ``bfgs_steps`` steps.

    ``objective(params)`` returns ``(loss, gradient)`` and may set the parameters of ``model``.
    Passing the ``state`` of an interrupted run (with the model it left behind) continues the same
    trajectory. ``stop_after`` bounds the number of steps taken by this call.
    """
    trainer = trainer or TrainerConfig()
    state = (state or OptimizerState()).ensure(model.n_parameters)
    result = TrainingResult(model=model, state=state)
    params = model.parameters()
    budget = np.inf if stop_after is None else stop_after
    taken = 0

    if state.phase == PHASE_ADAM:
        while state.step < trainer.adam_epochs and taken < budget:
            params = _adam_step(objective, params, state, trainer.adam_lr, result)
            taken += 1
            if state.step % trainer.log_every == 0:
                logger.info('Adam epoch %d: loss %.4e', state.step, result.history[-1])
        if state.step >= trainer.adam_epochs:
            logger.info('Adam phase finished after %d epochs', state.step)
            state.phase, state.step = PHASE_BFGS, 0
            state.ensure(model.n_parameters)

    if state.phase == PHASE_BFGS and taken < budget:
        loss, gradient = objective(params)
        _checked(PHASE_BFGS, state.step, loss, gradient, params)
        result.history.append(loss)
        result.gradient_norms.append(float(np.linalg.norm(gradient)))

        while state.step < trainer.bfgs_steps and taken < budget:
            if result.gradient_norms[-1] <= trainer.gtol:
                break
            stepped = _bfgs_step(objective, params, loss, gradient, state, result)
            if stepped is None:
                logger.warning('BFGS stopped at step %d: no descent along the identity direction', state.step)
                state.phase = PHASE_DONE
                break
            params, loss, gradient = stepped
            taken += 1
            result.history.append(loss)
            result.gradient_norms.append(float(np.linalg.norm(gradient)))
            if state.step % trainer.log_every == 0:
                logger.info('BFGS step %d: loss %.4e', state.step, loss)

        if state.step >= trainer.bfgs_steps or result.gradient_norms[-1] <= trainer.gtol:
            state.phase = PHASE_DONE

    model.set_parameters(params)
    if state.phase == PHASE_DONE:
        logger.info('Training finished: loss %.4e', result.final_loss)
    return result


def optimizer_arrays_path(path) -> Path:
    """ Adam moments and the inverse Hessian live next to the header file, in ``<name>.npz``. """
    path = Path(path)
    return path.with_name(path.name + ".npz")


def save_optimizer_state(state: OptimizerState, path):
    """
    A five-line text header (format, phase, step, parameter count, Hessian flag) and a compressed
    array file with the Adam moments and the packed upper triangle of the inverse Hessian.
    """
    size = 0 if state.adam_m is None else len(state.adam_m)
    has_hessian = state.hessian is not None
    lines = [OPTIM_HEADER, state.phase, str(state.step), str(size), str(int(has_hessian))]
    Path(path).write_text("\n".join(lines) + "\n")

    arrays = {}
    if size:
        arrays["adam_m"], arrays["adam_v"] = state.adam_m, state.adam_v
    if has_hessian:
        arrays["hessian"] = np.asarray(state.hessian)[np.triu_indices(len(state.hessian))]
    if arrays:
        with optimizer_arrays_path(path).open("wb") as stream:
            np.savez_compressed(stream, **arrays)


def load_optimizer_state(path) -> OptimizerState:
    lines = [line.strip() for line in Path(path).read_text().splitlines() if line.strip()]
    if not lines or lines[0] != OPTIM_HEADER:
        raise ModelFormatError('N01601', f'Line 1: expected header {OPTIM_HEADER!r}')
    try:
        phase, step, size, has_hessian = lines[1], int(lines[2]), int(lines[3]), bool(int(lines[4]))
    except (IndexError, ValueError) as e:
        raise ModelFormatError('N01602', f'Malformed optimizer state {path}: {e}')
    if len(lines) != 5:
        raise ModelFormatError('N01602', f'Malformed optimizer state {path}: {len(lines)} header lines')

    if phase not in (PHASE_ADAM, PHASE_BFGS, PHASE_DONE):
        raise ModelFormatError('N01603', f'Unknown optimizer phase {phase!r}')

    state = OptimizerState(phase=phase, step=step)
    if not size and not has_hessian:
        return state

    arrays_path = optimizer_arrays_path(path)
    if not arrays_path.exists():
        raise ModelFormatError('N01605', f'Optimizer arrays {arrays_path} are missing')
    with np.load(arrays_path) as arrays:
        stored = {key: arrays[key] for key in arrays.files}

    expected = {"adam_m": size, "adam_v": size} if size else {}
    if has_hessian:
        expected["hessian"] = size * (size + 1) // 2
    found = {key: value.size for key, value in stored.items()}
    if found != expected:
        raise ModelFormatError('N01604', f'Expected optimizer arrays {expected}, found {found}')

    if size:
        state.adam_m, state.adam_v = stored["adam_m"].astype(float), stored["adam_v"].astype(float)
    if has_hessian:
        upper = np.zeros((size, size))
        upper[np.triu_indices(size)] = stored["hessian"]
        state.hessian = np.asfortranarray(_symmetric(upper))
    return state
