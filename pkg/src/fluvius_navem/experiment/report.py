import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from .. import logger
from ..exceptions import ConfigurationError

CSV_COLUMNS = ["h", "err0", "err1", "ndof", "newton_steps_total"]


@dataclass
class RefinementRecord:
    size: int
    h: float
    ndof: int
    err0: float = float("nan")
    err1: float = float("nan")
    newton_steps_total: int = 0
    wall_time: float = 0.0
    failure: Optional[str] = None

    @property
    def failed(self):
        return self.failure is not None


@dataclass
class ConvergenceRates:
    order0: float
    order1: float
    monotone: bool


@dataclass
class ErrorReport:
    test: str
    method: str
    records: List[RefinementRecord] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    def successful(self):
        return [r for r in self.records if not r.failed]

    @property
    def rates(self):
        """ Fitted slopes, or None without three refinements with finite errors. """
        usable = [r for r in self.successful() if np.isfinite(r.err0) and np.isfinite(r.err1)]
        if len(usable) < 3 or len(usable) != len(self.successful()):
            return None
        return fit_convergence_rate(self)


def fit_convergence_rate(report: ErrorReport) -> ConvergenceRates:
    """ Least-squares slopes of log err against log h over the successful refinements. """
    records = sorted(report.successful(), key=lambda r: -r.h)
    if len(records) < 3:
        raise ConfigurationError('X01201', f'Rate fitting needs at least 3 refinements, got {len(records)}')

    h = np.array([r.h for r in records])
    if np.any(np.diff(h) >= 0):
        raise ConfigurationError('X01202', f'Mesh sizes are not strictly decreasing: {h.tolist()}')

    slopes, monotone = [], True
    for name in ("err0", "err1"):
        errors = np.array([getattr(r, name) for r in records])
        if not np.all(np.isfinite(errors)) or np.any(errors <= 0):
            raise ConfigurationError('X01203', f'Non-positive or non-finite {name} values: {errors.tolist()}')
        if np.any(np.diff(errors) > 0):
            monotone = False
            logger.warning('%s of %s/%s does not decrease monotonically: %s',
                           name, report.test, report.method, errors.tolist())
        slopes.append(float(np.polyfit(np.log(h), np.log(errors), 1)[0]))
    return ConvergenceRates(order0=slopes[0], order1=slopes[1], monotone=monotone)


def write_report_csv(report: ErrorReport, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS + ["failure"], lineterminator="\n")
        writer.writeheader()
        for r in report.records:
            writer.writerow({
                "h": f"{r.h:.17g}", "err0": f"{r.err0:.17g}", "err1": f"{r.err1:.17g}",
                "ndof": r.ndof, "newton_steps_total": r.newton_steps_total, "failure": r.failure or ""})
    return path


def write_rows_csv(path, columns, rows):
    """ Plot data: one row per point, floats with 17 significant digits. """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([f"{v:.17g}" for v in row])
    return path
