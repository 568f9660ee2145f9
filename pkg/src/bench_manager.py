"""
Bench Manager for the UC-CET benchmark harness
Computes continuous relaxations and runs solvers over many instances
"""

import asyncio
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .base_backend import BaseBackend, SolveOptions
from .config import Config
from .cp import CpParams, run_cp
from .exceptions import BackendError, InstanceInfeasibleError, UCCETError, UnsupportedProblemError
from .formulation import build_original_qcp, build_piecewise_relaxation
from .la import LaParams, run_la
from .model import DecisionVector, Instance, eval_objective, lift_eta, validate_solution
from .report_processor import Crossing, first_crossing
from .utils import Stopwatch

logger = logging.getLogger(__name__)

FORMULATIONS = ('origin', 'cp_la', 's_pw', 'pc_pw')
MODES = ('cp', 'direct')


@dataclass(frozen=True)
class Relaxation:
    formulation: str
    value: float
    cuts: int
    solve_time: float


def relax(inst: Instance, formulation: str, backend: BaseBackend,
          la_params: Optional[LaParams] = None) -> Relaxation:
    """Continuous relaxation of one formulation."""
    if formulation not in FORMULATIONS:
        raise ValueError(f"unknown formulation {formulation!r} (choose from {', '.join(FORMULATIONS)})")
    watch = Stopwatch()

    if formulation == 'cp_la':
        la = run_la(inst, backend, la_params)
        return Relaxation(formulation, la.relaxation_value, la.cuts, watch.elapsed())

    if formulation == 'origin':
        problem, cuts = build_original_qcp(inst, integrality=False), 0
    else:
        problem = build_piecewise_relaxation(inst, perspective=(formulation == 'pc_pw'))
        cuts = Config.PIECEWISE_K
    result = backend.solve(problem, SolveOptions(relax_integrality=True))
    if result.status in ('infeasible', 'unbounded'):
        raise InstanceInfeasibleError(f"{formulation} relaxation is {result.status}")
    backend.require_solution(problem, result)
    return Relaxation(formulation, float(result.objective), cuts, watch.elapsed())


def relax_value(inst: Instance, formulation: str, backend: BaseBackend,
                la_params: Optional[LaParams] = None) -> float:
    """Z_CR of a formulation; the one value every report and target uses."""
    return relax(inst, formulation, backend, la_params).value


@dataclass
class TightnessReport:
    instance: str
    values: Dict[str, float] = field(default_factory=dict)
    cuts: Dict[str, int] = field(default_factory=dict)
    errors: Dict[str, str] = field(default_factory=dict)

    def differences(self) -> Dict[str, float]:
        """Z_CR_ORIG - Z_CR of every formulation that solved."""
        if 'origin' not in self.values:
            return {}
        z_orig = self.values['origin']
        return {name: z_orig - value for name, value in self.values.items()}


def tightness_report(inst: Instance, backend: BaseBackend, name: str = '',
                     la_params: Optional[LaParams] = None) -> TightnessReport:
    """All four relaxations; a failing formulation is recorded and the rest still run."""
    report = TightnessReport(name or 'instance')
    for formulation in FORMULATIONS:
        try:
            relaxation = relax(inst, formulation, backend, la_params)
        except UCCETError as e:
            logger.error(f"{report.instance}: {formulation} relaxation failed: {e}")
            report.errors[formulation] = str(e)
            continue
        report.values[formulation] = relaxation.value
        report.cuts[formulation] = relaxation.cuts
        logger.info(f"{report.instance}: Z_CR[{formulation}] = {relaxation.value:.2f} "
                    f"({relaxation.cuts} cuts, {relaxation.solve_time:.1f}s)")
    return report


@dataclass
class BenchResult:
    instance: str
    mode: str
    label: str = ''
    n_units: int = 0
    z_cr_orig: float = math.nan
    best_objective: float = math.nan
    termination: str = ''
    iterations: int = 0
    elapsed: float = 0.0
    stamps: List[Tuple[float, int, float]] = field(default_factory=list)
    crossings: Dict[float, Crossing] = field(default_factory=dict)
    error: str = ''

    @property
    def failed(self) -> bool:
        return bool(self.error)


def run_direct(inst: Instance, backend: BaseBackend,
               time_limit: float = Config.CP_TIME_LIMIT) -> Tuple[float, str, List[Tuple[float, int, float]]]:
    """Hand the full MIQCP to the backend; returns (objective, termination, stamps).

    Neither backend reports intermediate incumbents, so the only stamp is the final
    solution at the finish time and crossings for this baseline are upper bounds.
    """
    problem = build_original_qcp(inst, integrality=True)
    watch = Stopwatch()
    result = backend.solve(problem, SolveOptions(time_limit=time_limit))
    if result.status == 'infeasible':
        raise InstanceInfeasibleError("MIQCP is infeasible")
    if not result.has_solution:
        return math.nan, result.status, []

    values = backend.require_solution(problem, result)
    chi = lift_eta(inst, DecisionVector(problem.layout, values))
    report = validate_solution(inst, chi)
    if not report.feasible:
        logger.warning(f"Direct MIQCP solution fails validation: {report.summary()}")
    objective = eval_objective(inst, chi)
    return objective, result.status, [(watch.elapsed(), 1, objective)]


def bench_instance(name: str, inst: Instance, backend: BaseBackend, mode: str = 'cp',
                   cp_params: Optional[CpParams] = None, la_params: Optional[LaParams] = None,
                   label: str = '') -> BenchResult:
    """One bench run: Z_CR_ORIG, the chosen method, and target crossings."""
    if mode not in MODES:
        raise ValueError(f"unknown bench mode {mode!r}")
    cp_params = cp_params or CpParams()
    result = BenchResult(name, mode, label or mode, inst.n_units)
    result.z_cr_orig = relax_value(inst, 'origin', backend, la_params)

    watch = Stopwatch()
    if mode == 'cp':
        cp = run_cp(inst, backend, la_params, cp_params)
        result.best_objective = cp.best_objective
        result.termination = cp.termination
        result.iterations = cp.iterations
        result.stamps = cp.incumbent_stamps()
    else:
        objective, status, stamps = run_direct(inst, backend, cp_params.time_limit)
        result.best_objective = objective
        result.termination = status
        result.iterations = 1
        result.stamps = stamps
    result.elapsed = watch.elapsed()

    for factor in Config.TARGET_FACTORS:
        result.crossings[factor] = first_crossing(result.stamps, factor * result.z_cr_orig)
    logger.info(f"{name} [{result.label}]: best {result.best_objective:.2f}, Z_CR_ORIG {result.z_cr_orig:.2f}, "
                + ", ".join(f"{f}x: {c.display()}" for f, c in result.crossings.items()))
    return result


def bench_run(instances: Sequence[Tuple[str, Instance]], backend: BaseBackend, cp_params: Optional[CpParams] = None,
              mode: str = 'cp', la_params: Optional[LaParams] = None, label: str = '') -> List[BenchResult]:
    """Sequential bench over named instances; per-instance failures are recorded, not raised."""
    results = []
    for name, inst in instances:
        try:
            results.append(bench_instance(name, inst, backend, mode, cp_params, la_params, label))
        except UCCETError as e:
            logger.error(f"Bench failed on {name}: {e}")
            results.append(BenchResult(name, mode, label or mode, inst.n_units, error=str(e)))
    return results


class BenchManager:
    """Runs bench and tightness jobs concurrently, one backend per job."""

    def __init__(self, backend_factory: Callable[[], BaseBackend], workers: int = Config.BENCH_WORKERS):
        if workers < 1:
            raise ValueError("workers must be at least 1")
        self.logger = logging.getLogger(__name__)
        self.backend_factory = backend_factory
        self.workers = workers

    async def bench_all(self, instances: Sequence[Tuple[str, Instance]], mode: str = 'cp',
                        cp_params: Optional[CpParams] = None, la_params: Optional[LaParams] = None,
                        label: str = '') -> List[BenchResult]:
        """Bench every instance; results come back in input order."""
        def job(name, inst):
            return bench_instance(name, inst, self.backend_factory(), mode, cp_params, la_params, label)

        results = await self._run_all(instances, job)
        merged = []
        for (name, inst), result in zip(instances, results):
            if isinstance(result, Exception):
                merged.append(BenchResult(name, mode, label or mode, inst.n_units, error=str(result)))
            else:
                merged.append(result)
        return merged

    async def tightness_all(self, instances: Sequence[Tuple[str, Instance]],
                            la_params: Optional[LaParams] = None) -> List[TightnessReport]:
        def job(name, inst):
            return tightness_report(inst, self.backend_factory(), name, la_params)

        results = await self._run_all(instances, job)
        merged = []
        for (name, _), result in zip(instances, results):
            if isinstance(result, Exception):
                merged.append(TightnessReport(name, errors={'all': str(result)}))
            else:
                merged.append(result)
        return merged

    async def mu_ablation(self, instances: Sequence[Tuple[str, Instance]], cp_params: Optional[CpParams] = None,
                          la_params: Optional[LaParams] = None) -> List[BenchResult]:
        """CP with the mu schedule and with mu fixed at 1 on the same instances."""
        base = cp_params or CpParams()
        variants = [
            ('mu-schedule', CpParams(base.eps_r, base.eps_g, base.eps_h, base.max_milp_iters, base.time_limit)),
            ('mu-fixed-1', CpParams(base.eps_r, base.eps_g, base.eps_h, base.max_milp_iters, base.time_limit, 1.0)),
        ]
        results = []
        for label, params in variants:
            self.logger.info(f"Running {label} on {len(instances)} instances")
            results.extend(await self.bench_all(instances, 'cp', params, la_params, label))
        return results

    async def _run_all(self, instances: Sequence[Tuple[str, Instance]], job) -> list:
        semaphore = asyncio.Semaphore(self.workers)

        async def limited(name, inst):
            async with semaphore:
                return await self._run_with_retry(name, inst, job)

        tasks = [limited(name, inst) for name, inst in instances]
        results = await asyncio.gather(*tasks, return_exceptions=True)

        for (name, _), result in zip(instances, results):
            if isinstance(result, Exception):
                self.logger.error(f"Failed on {name}: {result}")
            else:
                self.logger.info(f"Finished {name}")
        return results

    async def _run_with_retry(self, name: str, inst: Instance, job):
        """Backend failures are retried with back-off; model errors are final."""
        for attempt in range(Config.MAX_RETRIES):
            try:
                self.logger.info(f"Running {name} (attempt {attempt + 1})")
                return await asyncio.to_thread(job, name, inst)
            except UnsupportedProblemError:
                raise
            except BackendError as e:
                self.logger.warning(f"Attempt {attempt + 1} failed for {name}: {e}")
                if attempt < Config.MAX_RETRIES - 1:
                    await asyncio.sleep(Config.RETRY_DELAY * (attempt + 1))
                else:
                    self.logger.error(f"All attempts failed for {name}")
                    raise
