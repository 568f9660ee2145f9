"""
Base solver backend for the UC-CET solver
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional

import numpy as np

from .config import Config
from .exceptions import BackendError, UnsupportedProblemError
from .formulation import ModelProblem

STATUSES = ('optimal', 'feasible', 'infeasible', 'unbounded', 'time_limit', 'error')
PROBLEM_CLASSES = ('LP', 'QP', 'MILP', 'QCP', 'MIQCP')


@dataclass(frozen=True)
class SolveOptions:
    relax_integrality: bool = False
    time_limit: float = Config.SOLVE_TIME_LIMIT
    rel_gap: Optional[float] = None
    verbosity: int = 0

    def __post_init__(self):
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        if self.rel_gap is not None and not 0.0 <= self.rel_gap < 1.0:
            raise ValueError("rel_gap must lie in [0, 1)")

    def gap_for(self, problem_class: str) -> float:
        if self.rel_gap is not None:
            return self.rel_gap
        return Config.GAP_PRESETS.get(problem_class, Config.GAP_PRESETS['MILP'])


@dataclass(frozen=True)
class SolveResult:
    status: str
    objective: float = math.nan
    primal: Dict[str, float] = field(default_factory=dict)
    solve_time: float = 0.0
    message: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def has_solution(self) -> bool:
        return bool(self.primal) and self.status in ('optimal', 'feasible', 'time_limit')

    def values(self, problem: ModelProblem) -> np.ndarray:
        """Primal values in the problem's variable order."""
        return np.array([self.primal.get(name, 0.0) for name in problem.names], dtype=float)


@dataclass(frozen=True)
class BackendCapabilities:
    supports: FrozenSet[str]

    def __post_init__(self):
        supports = frozenset(self.supports)
        unknown = supports - set(PROBLEM_CLASSES)
        if unknown:
            raise ValueError(f"unknown problem classes {sorted(unknown)}")
        if 'MIQCP' in supports and not {'QCP', 'MILP'} <= supports:
            raise ValueError("MIQCP support implies QCP and MILP")
        if 'MILP' in supports and 'LP' not in supports:
            raise ValueError("MILP support implies LP")
        object.__setattr__(self, 'supports', supports)

    def __contains__(self, problem_class: str) -> bool:
        return problem_class in self.supports


class BaseBackend:
    """Base class for all solver backends with common functionality."""

    name = 'base'

    def __init__(self, backend_config: Optional[Dict] = None):
        self.config = backend_config or {}
        self.logger = logging.getLogger(self.__class__.__name__)

    @property
    def capabilities(self) -> BackendCapabilities:
        """Override this property in subclasses."""
        raise NotImplementedError

    def _solve(self, problem: ModelProblem, opts: SolveOptions) -> SolveResult:
        """Override this method in subclasses."""
        raise NotImplementedError

    def supports(self, problem_class: str) -> bool:
        return problem_class in self.capabilities

    def effective_class(self, problem: ModelProblem, opts: SolveOptions) -> str:
        return problem.relaxed().problem_class if opts.relax_integrality else problem.problem_class

    def solve(self, problem: ModelProblem, opts: Optional[SolveOptions] = None) -> SolveResult:
        """Solve a problem; capability is checked before any solver work starts."""
        opts = opts or SolveOptions()
        problem_class = self.effective_class(problem, opts)
        if problem_class not in self.capabilities:
            raise UnsupportedProblemError(
                f"{self.name} backend cannot solve {problem_class} problems "
                f"(supports {sorted(self.capabilities.supports)})"
            )
        if opts.relax_integrality:
            problem = problem.relaxed()

        self.logger.debug(f"Solving {problem.name} ({problem_class}, {problem.n_vars} vars, "
                          f"{len(problem.rows)} rows)")
        result = self._solve(problem, opts)
        if result.has_solution:
            result = self.clean_result(problem, result)
        self.logger.debug(f"{problem.name}: {result.status} obj={result.objective:.6g} "
                          f"in {result.solve_time:.2f}s")
        return result

    def clean_result(self, problem: ModelProblem, result: SolveResult) -> SolveResult:
        """Clamp primal values to bounds, round integers and recompute the objective."""
        values = result.values(problem)
        values = np.minimum(np.maximum(values, problem.lb), problem.ub)
        values[problem.integer] = np.round(values[problem.integer])
        objective = problem.objective_value(values)
        if not math.isnan(result.objective):
            drift = abs(objective - result.objective) / max(1.0, abs(objective))
            if drift > 1e-6:
                self.logger.debug(f"{problem.name}: reported objective {result.objective:.9g} "
                                  f"differs from recomputed {objective:.9g}")
        primal = dict(zip(problem.names, values.tolist()))
        return SolveResult(result.status, objective, primal, result.solve_time, result.message)

    def require_solution(self, problem: ModelProblem, result: SolveResult) -> np.ndarray:
        """Primal values of a solved problem, or BackendError for error statuses."""
        if result.status == 'error':
            raise BackendError(f"{self.name} failed on {problem.name}: {result.message}")
        if not result.has_solution:
            raise BackendError(f"{self.name} returned {result.status} without a solution for {problem.name}")
        return result.values(problem)
