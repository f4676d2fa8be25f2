from .. import logger, config

from .errors import navem_errors, solution_errors
from .report import (
    ConvergenceRates, ErrorReport, RefinementRecord, fit_convergence_rate, write_report_csv, write_rows_csv)
from .config import ExperimentSpec, build_spec, load_spec, read_config_file
from .scenarios import ScenarioSetup, build_mesh, scenario_setup
from .runner import (
    fem_reference, load_or_fit_phi, reference_deviation, run_experiment, slice_deviation, slice_samples)

__all__ = [
    "build_mesh",
    "build_spec",
    "ConvergenceRates",
    "ErrorReport",
    "ExperimentSpec",
    "fem_reference",
    "fit_convergence_rate",
    "load_or_fit_phi",
    "load_spec",
    "navem_errors",
    "read_config_file",
    "reference_deviation",
    "RefinementRecord",
    "run_experiment",
    "scenario_setup",
    "ScenarioSetup",
    "slice_deviation",
    "slice_samples",
    "solution_errors",
    "write_report_csv",
    "write_rows_csv",
]
