"""
Brute-force reference solver for tiny UC-CET instances

Enumerates every commitment schedule that respects the unit-state rules,
solves each dispatch by Kelley cutting planes on scipy's HiGHS LP and
keeps the cheapest.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .config import Config
from .exceptions import OracleLimitError
from .formulation import build_linear_base, fix_binaries, tangent_cut
from .model import DecisionVector, Instance, VariableLayout, eval_g, lift_eta

logger = logging.getLogger(__name__)

TRADING_STATES = ((0, 0), (1, 0), (0, 1))


@dataclass(frozen=True)
class DispatchResult:
    feasible: bool
    objective: float = math.inf
    point: Optional[DecisionVector] = None
    rounds: int = 0
    history: List[float] = field(default_factory=list)
    pruned: bool = False


@dataclass(frozen=True)
class OracleResult:
    optimum: float
    argmin: Optional[DecisionVector]
    enumerated: int
    evaluated: int
    feasible_patterns: int
    pruned: int = 0

    @property
    def feasible(self) -> bool:
        return self.argmin is not None


def minimal_startups(inst: Instance, u: np.ndarray, u0: Optional[Sequence[int]] = None) -> np.ndarray:
    """s_t = max(u_t - u_{t-1}, 0) with the initial state as u_0.

    `u` holds one row per unit; `u0` defaults to the initial status of every unit.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if u0 is None:
        u0 = [unit.u0 for unit in inst.units]
    u0 = np.asarray(u0, dtype=float).reshape(-1, 1)
    if u0.shape[0] != u.shape[0]:
        raise ValueError(f"{u.shape[0]} schedule rows but {u0.shape[0]} initial states")
    prev = np.hstack([u0, u[:, :-1]])
    return np.maximum(u - prev, 0.0)


def schedule_allowed(inst: Instance, i: int, u: Sequence[int]) -> bool:
    """Minimum up/down, initial status and state rules for one unit's schedule."""
    unit = inst.units[i]
    T = inst.horizon
    s = minimal_startups(inst, [u], u0=[unit.u0])[0]
    for t in range(1, inst.fixed_periods(i) + 1):
        if u[t - 1] != unit.u0:
            return False
    for t in range(inst.init_up[i] + 1, T + 1):
        if sum(s[w - 1] for w in inst.min_up_window(i, t)) > u[t - 1]:
            return False
    for t in range(inst.init_down[i] + 1, T + 1):
        anchor = inst.min_down_anchor(i, t)
        u_anchor = unit.u0 if anchor == 0 else u[anchor - 1]
        if sum(s[w - 1] for w in inst.min_down_window(i, t)) > 1 - u_anchor:
            return False
    return True


def unit_schedules(inst: Instance, i: int) -> List[np.ndarray]:
    return [np.array(bits, dtype=float) for bits in itertools.product((0, 1), repeat=inst.horizon)
            if schedule_allowed(inst, i, bits)]


def _bounds(lb: np.ndarray, ub: np.ndarray):
    return [(None if math.isinf(lo) else lo, None if math.isinf(hi) else hi) for lo, hi in zip(lb, ub)]


def dispatch_refined(inst: Instance, u: np.ndarray, u_b: int = 0, u_s: int = 0,
                     tol: float = Config.DISPATCH_TOL,
                     max_rounds: int = Config.DISPATCH_MAX_ROUNDS,
                     feas_tol: float = Config.DISPATCH_FEAS_TOL, cutoff: float = math.inf) -> DispatchResult:
    """Cheapest dispatch for fixed binaries via tangent-cut refinement of the emission budget.

    Every refinement LP is a lower bound, so refinement stops (pruned) once one reaches `cutoff`.
    """
    layout = VariableLayout.for_instance(inst)
    u = np.asarray(u, dtype=float).reshape(inst.n_units, inst.horizon)
    pattern = DecisionVector.from_blocks(layout, u=u, s=minimal_startups(inst, u), u_b=u_b, u_s=u_s)
    problem = fix_binaries(build_linear_base(inst, layout), pattern)
    A_ub, b_ub, A_eq, b_eq = problem.linear_arrays()
    c = problem.objective_vector()
    bounds = _bounds(problem.lb, problem.ub)
    scale = max(1.0, inst.cet.e0)

    cut_rows, cut_rhs, history = [], [], []
    chi = None
    for rounds in range(1, max_rounds + 1):
        A = sp.vstack([A_ub] + cut_rows, format='csr') if cut_rows else A_ub
        b = np.concatenate([b_ub, cut_rhs]) if cut_rhs else b_ub
        res = linprog(c, A_ub=A, b_ub=b, A_eq=A_eq if A_eq.shape[0] else None,
                      b_eq=b_eq if A_eq.shape[0] else None, bounds=bounds, method='highs')
        if res.status == 2:
            return DispatchResult(False, rounds=rounds, history=history)
        if res.status != 0:
            logger.warning(f"Dispatch LP ended with status {res.status}: {res.message}")
            return DispatchResult(False, rounds=rounds, history=history)

        chi = lift_eta(inst, DecisionVector(layout, res.x))
        history.append(float(res.fun))
        if res.fun >= cutoff:
            return DispatchResult(False, float(res.fun), None, rounds, history, pruned=True)
        excess = max(0.0, eval_g(inst, chi)) / scale
        change = abs(history[-1] - history[-2]) / max(1.0, abs(history[-1])) if rounds > 1 else math.inf
        if excess <= feas_tol or (change < tol and excess <= Config.VALIDATION_TOL):
            return DispatchResult(True, float(res.fun), chi, rounds, history)

        cut = tangent_cut(inst, chi, layout, tag=f"kelley k={rounds}")
        row = np.zeros(layout.size)
        for j, v in cut.coeffs.items():
            row[j] = v
        cut_rows.append(sp.csr_matrix(row))
        cut_rhs.append(cut.rhs)

    logger.warning(f"Dispatch refinement hit {max_rounds} rounds")
    return DispatchResult(True, history[-1], chi, max_rounds, history)


def enumerate_optimal(inst: Instance, dispatch_tol: float = Config.DISPATCH_TOL) -> OracleResult:
    """Global optimum by enumeration of commitment schedules and trading states."""
    bits = inst.n_units * inst.horizon + 2
    if bits > Config.ORACLE_BIT_CAP:
        raise OracleLimitError(f"{bits} binary bits exceed the oracle cap of {Config.ORACLE_BIT_CAP}")

    per_unit = [unit_schedules(inst, i) for i in range(inst.n_units)]
    p_min, p_max = inst.unit_array('p_min'), inst.unit_array('p_max')
    need = inst.demand + inst.reserve

    best, argmin = math.inf, None
    evaluated = feasible = pruned = 0
    for combo in itertools.product(*per_unit):
        u = np.vstack(combo)
        if np.any(p_max @ u < need - 1e-9) or np.any(p_min @ u > inst.demand + 1e-9):
            continue
        for u_b, u_s in TRADING_STATES:
            evaluated += 1
            result = dispatch_refined(inst, u, u_b, u_s, tol=dispatch_tol, cutoff=best)
            if result.pruned:
                pruned += 1
                continue
            if not result.feasible:
                continue
            feasible += 1
            if result.objective < best:
                best, argmin = result.objective, result.point

    logger.info(f"Oracle evaluated {evaluated} patterns, {feasible} feasible, {pruned} pruned, "
                f"optimum {best:.6f}")
    return OracleResult(best, argmin, 2 ** bits, evaluated, feasible, pruned)
