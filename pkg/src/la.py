"""
Linear-approximation sub-algorithm (LA)

Finds an interior point of the emission constraint, then alternates LP
relaxations and line searches until the LP optimum satisfies g <= eps_lp.
The perspective cuts collected on the way form the initial point set of
the center-point loop.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .base_backend import BaseBackend, SolveOptions
from .config import Config
from .exceptions import InstanceInfeasibleError, LineSearchError, NoInteriorPointError
from .formulation import CutSet, build_g_epigraph, build_linear_base
from .model import DecisionVector, Instance, VariableLayout, eval_g, lift_eta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LaParams:
    eps_lp: float = Config.EPS_LP
    k_max_lp: int = Config.K_MAX_LP
    boundary_tol: float = Config.BOUNDARY_TOL

    def __post_init__(self):
        if self.eps_lp < 0:
            raise ValueError("eps_lp must be nonnegative")
        if self.k_max_lp < 1:
            raise ValueError("k_max_lp must be at least 1")
        if not self.boundary_tol > 0:
            raise ValueError("boundary_tol must be positive")


@dataclass(frozen=True)
class LaIteration:
    iteration: int
    lp_value: float
    g_lp: float
    lam: float
    cuts: int


@dataclass(frozen=True)
class LaResult:
    omega_r: CutSet
    chi_cp: DecisionVector
    chi_lp: DecisionVector
    relaxation_value: float
    iterations: int
    termination: str
    trace: List[LaIteration] = field(default_factory=list)

    @property
    def cuts(self) -> int:
        return len(self.omega_r)


def _base_point(inst: Instance, layout: VariableLayout, values: np.ndarray) -> DecisionVector:
    return DecisionVector(layout, values).project(VariableLayout.for_instance(inst))


def center_point(inst: Instance, backend: BaseBackend, opts: Optional[SolveOptions] = None) -> DecisionVector:
    """argmin g over X_L (continuous), returned with eta lifted."""
    problem = build_g_epigraph(inst)
    result = backend.solve(problem, opts or SolveOptions())
    if result.status in ('infeasible', 'unbounded'):
        raise InstanceInfeasibleError(f"linear constraint system is {result.status}; no center point exists")
    values = backend.require_solution(problem, result)
    chi = lift_eta(inst, _base_point(inst, problem.layout, values))
    g = eval_g(inst, chi)
    if g >= 0:
        raise NoInteriorPointError(g)
    logger.info(f"Center point found with g = {g:.6g}")
    return chi


def _bisect(inst: Instance, chi_in: DecisionVector, chi_out: DecisionVector, tol: float,
            max_steps: int = 200) -> float:
    lo, hi = 0.0, 1.0
    lam = 0.5
    for _ in range(max_steps):
        lam = 0.5 * (lo + hi)
        g = eval_g(inst, chi_in.blend(chi_out, lam))
        if abs(g) <= tol:
            break
        if g > 0:
            lo = lam
        else:
            hi = lam
    return lam


def line_search(inst: Instance, chi_interior: DecisionVector, chi_exterior: DecisionVector,
                boundary_tol: float = Config.BOUNDARY_TOL) -> Tuple[DecisionVector, float]:
    """Point lam * interior + (1 - lam) * exterior on the boundary g = 0."""
    layout = VariableLayout.for_instance(inst)
    chi_in, chi_out = chi_interior.project(layout), chi_exterior.project(layout)
    g_in, g_out = eval_g(inst, chi_in), eval_g(inst, chi_out)
    if not g_in < 0:
        raise LineSearchError('interior', g_in)
    if not g_out > 0:
        raise LineSearchError('exterior', g_out)

    # phi(lam) = A lam^2 + B lam + C along the segment
    d_p = chi_in.p - chi_out.p
    c_t = inst.c_t[:, None]
    A = float(np.sum(c_t * d_p ** 2))
    B = float(np.sum(2.0 * c_t * chi_out.p * d_p) - (chi_in.eta - chi_out.eta))
    C = g_out

    lam = math.nan
    if abs(A) > 1e-14 * abs(B):
        disc = max(B * B - 4.0 * A * C, 0.0)
        denom = -B + math.sqrt(disc)
        if denom > 0:
            lam = 2.0 * C / denom
    elif B < 0:
        lam = -C / B

    scale = max(1.0, abs(g_out))
    tol = boundary_tol * scale
    if not (0.0 < lam <= 1.0) or abs(eval_g(inst, chi_in.blend(chi_out, lam))) > tol:
        logger.debug(f"Closed-form root {lam} rejected; bisecting")
        lam = _bisect(inst, chi_in, chi_out, min(tol, Config.BOUNDARY_TOL * scale))
    return chi_in.blend(chi_out, lam), lam


def run_la(inst: Instance, backend: BaseBackend, params: Optional[LaParams] = None,
           chi_cp: Optional[DecisionVector] = None) -> LaResult:
    """LP relaxations over X_L plus perspective cuts, refined until g(chi_LP) <= eps_lp."""
    params = params or LaParams()
    chi_cp = chi_cp if chi_cp is not None else center_point(inst, backend)
    base = build_linear_base(inst).relaxed()
    omega_r = CutSet(inst=inst)
    trace: List[LaIteration] = []
    opts = SolveOptions(relax_integrality=True)

    k = 0
    termination = 'max-iterations'
    while True:
        k += 1
        problem = base.with_rows(omega_r.perspective_rows(inst, base.layout)).renamed(f"la_lp_{k}")
        result = backend.solve(problem, opts)
        if result.status in ('infeasible', 'unbounded'):
            raise InstanceInfeasibleError(f"LA relaxation {k} is {result.status}")
        values = backend.require_solution(problem, result)
        chi_lp = lift_eta(inst, DecisionVector(base.layout, values))
        g = eval_g(inst, chi_lp)

        if g <= params.eps_lp:
            trace.append(LaIteration(k, result.objective, g, math.nan, len(omega_r)))
            logger.info(f"LA iteration {k}: LP value {result.objective:.6f}, g {g:.6g}, converged "
                        f"with {len(omega_r)} cuts")
            termination = 'converged'
            break
        if k >= params.k_max_lp:
            trace.append(LaIteration(k, result.objective, g, math.nan, len(omega_r)))
            logger.warning(f"LA stopped after {k} iterations with g = {g:.6g}")
            break

        chi_hat, lam = line_search(inst, chi_cp, chi_lp, params.boundary_tol)
        omega_r.add(chi_hat)
        trace.append(LaIteration(k, result.objective, g, lam, len(omega_r)))
        logger.info(f"LA iteration {k}: LP value {result.objective:.6f}, g {g:.6g}, "
                    f"lambda {lam:.6f}, cuts {len(omega_r)}")

    return LaResult(
        omega_r=omega_r,
        chi_cp=chi_cp,
        chi_lp=chi_lp,
        relaxation_value=float(result.objective),
        iterations=k,
        termination=termination,
        trace=trace,
    )
