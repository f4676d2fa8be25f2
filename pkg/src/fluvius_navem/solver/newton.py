import time
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np
from fluvius.data import DataModel, Field
from scipy.sparse.linalg import splu

from .. import config, logger
from ..exceptions import SingularTangentError


class NewtonDriver(DataModel):
    n_increments: int = Field(default=1, ge=1)
    tol: float = Field(default=config.NEWTON_TOL, gt=0)
    max_steps: int = Field(default=config.NEWTON_MAX_STEPS, ge=1)
    hard_cap: int = Field(default=config.NEWTON_HARD_CAP, ge=1)


@dataclass
class IncrementRecord:
    increment: int
    scale: float
    iterations: int
    residuals: List[float]
    converged: bool


@dataclass
class SolveReport:
    increments: List[IncrementRecord] = field(default_factory=list)
    dofs: np.ndarray = None
    wall_time: float = 0.0

    @property
    def total_newton_steps(self):
        return sum(r.iterations for r in self.increments)

    @property
    def converged(self):
        return bool(self.increments) and self.increments[-1].converged


def newton_solve(driver: NewtonDriver, assemble: Callable, u0) -> SolveReport:
    """
    Incremental force method: for n = 1..N the load is scaled by n/N and Newton iterates
    K δ = −r until ‖r‖ < tol·‖r₀‖ of that increment. Intermediate increments stop at
    ``max_steps``, the last one at ``hard_cap``.

    ``assemble(u, w, scale)`` returns ``(K, r)`` at dofs ``u`` with the stabilization
    state ``w`` (the converged dofs of the previous increment).
    """
    started = time.perf_counter()
    u = np.array(u0, dtype=float)
    w = u.copy()
    report = SolveReport()

    for n in range(1, driver.n_increments + 1):
        scale = n / driver.n_increments
        cap = driver.hard_cap if n == driver.n_increments else driver.max_steps
        K, r = assemble(u, w, scale)
        history = [float(np.linalg.norm(r))]
        reference = history[0]
        iterations = 0
        converged = reference == 0.0

        while not converged and iterations < cap:
            try:
                delta = splu(K.tocsc()).solve(-r)
            except RuntimeError as e:
                raise SingularTangentError(
                    'S01401', f'Singular tangent at increment {n}, iteration {iterations}: {e}',
                    increment=n, iteration=iterations)
            if not np.all(np.isfinite(delta)):
                raise SingularTangentError(
                    'S01402', f'Non-finite Newton update at increment {n}, iteration {iterations}',
                    increment=n, iteration=iterations)

            u += delta
            iterations += 1
            K, r = assemble(u, w, scale)
            history.append(float(np.linalg.norm(r)))
            logger.debug('Increment %d iteration %d: relative residual %.3e', n, iterations, history[-1] / reference)
            converged = history[-1] < driver.tol * reference

        if not converged:
            logger.warning('Increment %d stopped after %d Newton steps: relative residual %.3e',
                           n, iterations, history[-1] / reference)
        logger.info('Increment %d/%d: %d Newton steps, relative residual %.3e',
                    n, driver.n_increments, iterations, history[-1] / reference if reference else 0.0)

        report.increments.append(IncrementRecord(n, scale, iterations, history, converged))
        w = u.copy()

    report.dofs = u
    report.wall_time = time.perf_counter() - started
    return report
