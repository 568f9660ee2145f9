"""
Center-point algorithm (CP) for UC-CET

Each pass finds the integer point deepest inside the current polyhedral
relaxation (the integer ellipsoid center), then either searches its
binary neighborhood for a feasible dispatch or adds a boundary cut that
removes it.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import pandas as pd

from .base_backend import BaseBackend, SolveOptions
from .config import Config
from .exceptions import EmptyCenterProblemError
from .formulation import (
    CutSet,
    Incumbent,
    IncumbentSet,
    build_fixed_qcp,
    build_g_epigraph,
    build_linear_base,
    objective_cut,
)
from .la import LaParams, LaResult, line_search, run_la
from .model import (
    DecisionVector,
    Instance,
    VariableLayout,
    eval_g,
    eval_objective,
    lift_eta,
    validate_solution,
)
from .utils import Stopwatch

logger = logging.getLogger(__name__)

ACTIONS = ('feasible->search', 'infeasible->adjust', 'adjust->linesearch', 'adjust->search', 'stop')
TRACE_COLUMNS = ['k', 'mu', 'r_hat', 'g_icp', 'l_icp', 'h', 'action', 'incumbent_obj', 'cum_time_s']
TERMINATIONS = ('optimal-by-r', 'optimal-by-cut', 'iteration-limit', 'time-limit')


def mu_schedule(k: int, base: float = Config.MU_BASE, rate: float = Config.MU_RATE) -> float:
    """mu = 1 / (1 + base * exp(-rate * k))."""
    if k < 0:
        raise ValueError("iteration counter must be nonnegative")
    return 1.0 / (1.0 + base * math.exp(-rate * k))


@dataclass(frozen=True)
class CpParams:
    eps_r: float = Config.EPS_R
    eps_g: float = Config.EPS_G
    eps_h: float = Config.EPS_H
    max_milp_iters: int = Config.MAX_MILP_ITERS
    time_limit: float = Config.CP_TIME_LIMIT
    mu_fixed: Optional[float] = None

    def __post_init__(self):
        if min(self.eps_r, self.eps_g, self.eps_h) < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.max_milp_iters < 1:
            raise ValueError("max_milp_iters must be at least 1")
        if self.mu_fixed is not None and not 0.0 < self.mu_fixed <= 1.0:
            raise ValueError("mu_fixed must lie in (0, 1]")

    def mu(self, k: int) -> float:
        return self.mu_fixed if self.mu_fixed is not None else mu_schedule(k)


@dataclass(frozen=True)
class CpTraceRow:
    k: int
    mu: float
    r_hat: float
    g_icp: float
    l_icp: float
    h: float
    action: str
    incumbent_obj: float
    cum_time_s: float


@dataclass(frozen=True)
class CpResult:
    best: Optional[Incumbent]
    omega_f: IncumbentSet
    omega_r: CutSet
    la: LaResult
    termination: str
    trace: List[CpTraceRow] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.best is not None

    @property
    def best_objective(self) -> float:
        return self.best.objective if self.best is not None else math.nan

    @property
    def iterations(self) -> int:
        return len(self.trace)

    def trace_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(row) for row in self.trace], columns=TRACE_COLUMNS)

    def incumbent_stamps(self) -> List[Tuple[float, int, float]]:
        """(elapsed seconds, iteration, objective) of every improving incumbent, in order."""
        stamps, best = [], math.inf
        for sol in sorted(self.omega_f.solutions, key=lambda s: (s.elapsed, s.iteration)):
            if sol.objective < best:
                best = sol.objective
                stamps.append((sol.elapsed, sol.iteration, sol.objective))
        return stamps


def _base_point(inst: Instance, layout: VariableLayout, values) -> DecisionVector:
    return DecisionVector(layout, values).project(VariableLayout.for_instance(inst))


def integer_ellipsoid_center(inst: Instance, omega_r: CutSet, omega_f: IncumbentSet, mu: float,
                             backend: BaseBackend) -> Tuple[DecisionVector, float]:
    """max r over X_L, integrality, inflated cuts and the objective cut."""
    layout = VariableLayout.for_instance(inst, extras=('r',))
    base = build_linear_base(inst, layout)
    rows = omega_r.inflated_rows(inst, mu, layout)
    cut = objective_cut(inst, omega_f, mu, layout)
    if cut is not None:
        rows.append(cut)
    problem = (base.with_rows(rows)
               .with_objective({layout.idx('r'): 1.0}, 'max')
               .renamed('integer_ellipsoid_center'))

    result = backend.solve(problem, SolveOptions())
    if result.status in ('infeasible', 'unbounded'):
        raise EmptyCenterProblemError(
            f"integer ellipsoid center problem is {result.status} "
            f"({len(omega_r)} cuts, objective cut {'on' if cut is not None else 'off'})",
            objective_cut=cut is not None,
        )
    values = backend.require_solution(problem, result)
    r_hat = max(0.0, float(values[layout.idx('r')]))
    chi = _base_point(inst, layout, values).rounded_binaries()
    return chi, r_hat


def feasibility_adjustment(inst: Instance, chi_icp: DecisionVector,
                           backend: BaseBackend) -> Tuple[float, Optional[DecisionVector]]:
    """min h >= 0 with g <= h and the binaries of chi_icp; h = inf when they admit no dispatch."""
    problem = build_g_epigraph(inst, h_lower=0.0, fixed=chi_icp)
    result = backend.solve(problem, SolveOptions())
    if result.status in ('infeasible', 'unbounded'):
        report = validate_solution(inst, chi_icp)
        families = [f for f in report.violations if f != 'emission-budget'] or ['unknown']
        logger.warning(f"Fixed-binary system infeasible; violated families: {', '.join(families)}")
        return math.inf, None
    values = backend.require_solution(problem, result)
    h = max(0.0, float(values[problem.layout.idx('h')]))
    return h, lift_eta(inst, _base_point(inst, problem.layout, values))


def fixed_integer_search(inst: Instance, chi_icp: DecisionVector,
                         backend: BaseBackend) -> Optional[Tuple[DecisionVector, float]]:
    """min l over X_NL and X_L with the binaries of chi_icp; None if the QCP fails."""
    problem = build_fixed_qcp(inst, chi_icp)
    result = backend.solve(problem, SolveOptions())
    if result.status in ('infeasible', 'unbounded'):
        logger.warning(f"Fixed-integer QCP is {result.status}; tolerance mismatch with the adjustment step")
        return None
    values = backend.require_solution(problem, result)
    chi = lift_eta(inst, _base_point(inst, problem.layout, values).rounded_binaries())
    report = validate_solution(inst, chi)
    if not report.feasible:
        logger.warning(f"Fixed-integer solution rejected: {report.summary()}")
        return None
    return chi, eval_objective(inst, chi)


class CenterPointSolver:
    """Runs the CP loop on one instance."""

    def __init__(self, inst: Instance, backend: BaseBackend, la_params: Optional[LaParams] = None,
                 cp_params: Optional[CpParams] = None):
        self.inst = inst
        self.backend = backend
        self.la_params = la_params or LaParams()
        self.params = cp_params or CpParams()
        self.logger = logging.getLogger(__name__)
        self.omega_f = IncumbentSet(inst)
        self.omega_r = CutSet(inst=inst, tol=max(self.params.eps_g, Config.EPS_G))
        self.trace: List[CpTraceRow] = []
        self.watch = Stopwatch()

    def search(self, chi_icp: DecisionVector, k: int):
        """Fixed-integer neighborhood step; updates the incumbent and boundary sets."""
        found = fixed_integer_search(self.inst, chi_icp, self.backend)
        if found is None:
            return
        chi_u, objective = found
        if self.omega_f.add(chi_u, objective, k + 1, self.watch.elapsed()):
            self.logger.info(f"New incumbent {objective:.2f} at iteration {k}")
        if abs(eval_g(self.inst, chi_u)) <= self.params.eps_g:
            self.omega_r.add(chi_u, promoted=True)

    def cut_off(self, chi_cp: DecisionVector, chi_icp: DecisionVector, g_icp: float):
        if g_icp <= 0:
            self.logger.info(f"Skipping line search: g(chi_icp) = {g_icp:.3g} is not exterior")
            return
        chi_hat, _ = line_search(self.inst, chi_cp, chi_icp, self.la_params.boundary_tol)
        self.omega_r.add(chi_hat)

    def record(self, row: CpTraceRow):
        self.trace.append(row)
        self.logger.info(f"CP k={row.k} mu={row.mu:.6g} r={row.r_hat:.6g} g={row.g_icp:.6g} "
                         f"l={row.l_icp:.2f} h={row.h:.6g} {row.action} incumbent={row.incumbent_obj:.2f} "
                         f"t={row.cum_time_s:.1f}s")

    def run(self) -> CpResult:
        inst, params = self.inst, self.params
        la = run_la(inst, self.backend, self.la_params)
        for point in la.omega_r:
            self.omega_r.add(point)

        termination = 'iteration-limit'
        last_icp: Optional[DecisionVector] = None
        for k in range(params.max_milp_iters):
            if self.watch.elapsed() > params.time_limit:
                termination = 'time-limit'
                break

            mu = params.mu(k)
            try:
                chi_icp, r_hat = integer_ellipsoid_center(inst, self.omega_r, self.omega_f, mu, self.backend)
            except EmptyCenterProblemError as exc:
                if not exc.objective_cut:
                    raise
                # no integer point beats the incumbent
                termination = 'optimal-by-cut'
                self.record(CpTraceRow(k, mu, 0.0, math.nan, math.nan, math.nan, 'stop',
                                       self.omega_f.best_objective, self.watch.elapsed()))
                break
            chi_icp = lift_eta(inst, chi_icp)
            last_icp = chi_icp
            g_icp = eval_g(inst, chi_icp)
            l_icp = eval_objective(inst, chi_icp)
            h = math.nan

            if g_icp < params.eps_g:
                if r_hat < params.eps_r:
                    action = 'stop'
                    termination = 'optimal-by-r'
                else:
                    action = 'feasible->search'
                    self.search(chi_icp, k)
            else:
                h, _ = feasibility_adjustment(inst, chi_icp, self.backend)
                if math.isinf(h):
                    action = 'infeasible->adjust'
                    self.cut_off(la.chi_cp, chi_icp, g_icp)
                elif h >= params.eps_h:
                    action = 'adjust->linesearch'
                    self.cut_off(la.chi_cp, chi_icp, g_icp)
                else:
                    action = 'adjust->search'
                    self.search(chi_icp, k)

            incumbent = self.omega_f.best_objective if self.omega_f.best is not None else math.nan
            self.record(CpTraceRow(k, mu, r_hat, g_icp, l_icp, h, action, incumbent, self.watch.elapsed()))
            if action == 'stop':
                break

        # The stop point has g < eps_g; polish its binaries into a validated dispatch.
        if last_icp is not None and (termination == 'optimal-by-r' or self.omega_f.best is None):
            self.search(last_icp, len(self.trace) - 1)

        best = self.omega_f.best
        if best is None:
            self.logger.warning(f"CP finished ({termination}) without an incumbent")
        else:
            self.logger.info(f"CP finished ({termination}) with objective {best.objective:.2f} "
                             f"after {len(self.trace)} iterations")
        return CpResult(best, self.omega_f, self.omega_r, la, termination, self.trace)


def run_cp(inst: Instance, backend: BaseBackend, la_params: Optional[LaParams] = None,
           cp_params: Optional[CpParams] = None) -> CpResult:
    return CenterPointSolver(inst, backend, la_params, cp_params).run()
