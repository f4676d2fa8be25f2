from typing import Optional

import numpy as np
from fluvius.data import DataModel, Field
from pydantic import model_validator

from ..exceptions import ConfigurationError
from ..material import frobenius, trace4
from ..status import EvaluationState, StabilizationKind, StiffnessFormula


class StabilizationPolicy(DataModel):
    kind: StabilizationKind = Field(default=StabilizationKind.NORM_BASED)
    evaluation_state: EvaluationState = Field(default=EvaluationState.PREVIOUS_INCREMENT)
    value: Optional[float] = None
    formula: StiffnessFormula = Field(default=StiffnessFormula.SUM)

    @model_validator(mode='after')
    def check_fixed_value(self):
        if self.kind == StabilizationKind.FIXED_SCALAR and not (self.value is not None and self.value > 0):
            raise ConfigurationError('V01101', f'Fixed stabilization requires a positive value, got {self.value}')
        return self


def stabilization_scale(policy: StabilizationPolicy, modulus, consistency_tangent=None):
    """
    α_E for the elastic modulus evaluated at Π⁰₀∇w_h. The stiffness-based choices read the
    diagonal of the local consistency tangent evaluated at the same state.
    """
    if policy.kind == StabilizationKind.FIXED_SCALAR:
        return float(policy.value)

    if policy.kind == StabilizationKind.NORM_BASED:
        return float(frobenius(modulus))

    if policy.kind == StabilizationKind.TRACE_BASED:
        return float(trace4(modulus)) / 4.0

    diagonal = np.diag(consistency_tangent)
    n_dof = len(diagonal)
    if policy.formula == StiffnessFormula.ROOT_SUM_SQUARES:
        return float(np.sqrt(np.sum(diagonal ** 2))) / (4.0 * n_dof)
    return float(np.sum(diagonal)) / (4.0 * n_dof)
