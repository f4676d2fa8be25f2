from pathlib import Path
from typing import Optional, Tuple

from fluvius.data import DataModel, Field
from pydantic import ValidationError

from .. import config
from ..exceptions import ConfigurationError
from ..status import BasisSource, DeterminantMode, EvaluationState, MeshFamily, Method, Scenario, StabilizationKind

# Config file key → ExperimentSpec field
CONFIG_KEYS = {
    "test":                 "test",
    "method":               "method",
    "label":                "label",
    "mesh.family":          "mesh_family",
    "mesh.sizes":           "mesh_sizes",
    "mesh.distortion":      "mesh_distortion",
    "mesh.lloyd":           "mesh_lloyd",
    "driver.N":             "n_increments",
    "driver.tol":           "tol",
    "driver.max_steps":     "max_steps",
    "stab.kind":            "stab_kind",
    "stab.w_policy":        "stab_w_policy",
    "stab.value":           "stab_value",
    "determinant":          "determinant",
    "quadrature.degree":    "quadrature_degree",
    "basis.source":         "basis_source",
    "models.dir":           "models_dir",
    "reference.compare":    "reference_compare",
    "seed":                 "seed",
}


class ExperimentSpec(DataModel):
    """ One method on one mesh family of one test. Unset fields take the test's defaults. """
    test: Scenario
    method: Method = Field(default=Method.NAVEM)
    label: Optional[str] = None
    mesh_family: Optional[MeshFamily] = None
    mesh_sizes: Optional[Tuple[int, ...]] = None
    mesh_distortion: Optional[float] = Field(default=None, ge=0)
    mesh_lloyd: Optional[int] = Field(default=None, ge=0)
    n_increments: Optional[int] = Field(default=None, ge=1)
    tol: Optional[float] = Field(default=None, gt=0)
    max_steps: Optional[int] = Field(default=None, ge=1)
    stab_kind: Optional[StabilizationKind] = None
    stab_w_policy: Optional[EvaluationState] = None
    stab_value: Optional[float] = Field(default=None, gt=0)
    determinant: Optional[DeterminantMode] = None
    quadrature_degree: int = Field(default=config.QUADRATURE_DEGREE, ge=1)
    basis_source: BasisSource = Field(default=BasisSource.NETWORK)
    models_dir: str = Field(default=config.MODELS_DIR)
    reference_compare: bool = False
    seed: int = 0

    @property
    def stem(self):
        return self.label or self.method.value


def _split_pair(text, origin):
    if "=" not in text:
        raise ConfigurationError('X01101', f'{origin}: expected "key = value", got {text!r}')
    key, value = (part.strip() for part in text.split("=", 1))
    if key not in CONFIG_KEYS:
        raise ConfigurationError('X01102', f'{origin}: unknown key [{key}]')
    return key, value


def read_config_file(path):
    """ Flat ``key = value`` lines; blank lines and ``#`` comments are ignored. """
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            key, value = _split_pair(line, f'{path}:{lineno}')
            values[key] = value
    return values


def build_spec(values: dict) -> ExperimentSpec:
    data = {}
    for key, value in values.items():
        if key not in CONFIG_KEYS:
            raise ConfigurationError('X01102', f'Unknown key [{key}]')
        if key == "mesh.sizes":
            value = tuple(int(v) for v in str(value).replace(",", " ").split())
        data[CONFIG_KEYS[key]] = value
    try:
        return ExperimentSpec(**data)
    except (ValidationError, ValueError) as e:
        raise ConfigurationError('X01103', f'Invalid experiment configuration: {e}')


def load_spec(path=None, overrides=()) -> ExperimentSpec:
    """ File values first, then ``key=value`` overrides. """
    values = read_config_file(path) if path else {}
    for item in overrides:
        key, value = _split_pair(item, 'override')
        values[key] = value
    if "test" not in values:
        raise ConfigurationError('X01104', 'The experiment configuration needs a [test] key')
    return build_spec(values)
