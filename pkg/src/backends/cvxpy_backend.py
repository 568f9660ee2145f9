"""
In-process cvxpy backend

Maps a ModelProblem onto one continuous and one integer cvxpy Variable and
hands it to the first installed solver for its problem class.
"""

import logging
import math
from typing import Dict, List, Optional

import cvxpy
import numpy as np
import scipy.sparse as sp

from ..base_backend import BackendCapabilities, BaseBackend, SolveOptions, SolveResult
from ..config import Config
from ..formulation import ModelProblem
from ..utils import Stopwatch

# Solvers that can also take the simpler classes
FALLBACK_CHAIN = {
    'LP': ('LP', 'MILP', 'QCP', 'MIQCP'),
    'QP': ('QCP', 'MIQCP'),
    'MILP': ('MILP', 'MIQCP'),
    'QCP': ('QCP', 'MIQCP'),
    'MIQCP': ('MIQCP',),
}

STATUS_MAP = {
    cvxpy.OPTIMAL: 'optimal',
    cvxpy.OPTIMAL_INACCURATE: 'feasible',
    cvxpy.INFEASIBLE: 'infeasible',
    cvxpy.INFEASIBLE_INACCURATE: 'infeasible',
    cvxpy.UNBOUNDED: 'unbounded',
    cvxpy.UNBOUNDED_INACCURATE: 'unbounded',
    cvxpy.USER_LIMIT: 'time_limit',
    # presolve verdict of some solvers
    'infeasible_or_unbounded': 'infeasible',
}


def solver_arguments(solver: str, opts: SolveOptions, gap: float) -> Dict:
    """Time limit and gap keywords per solver; unknown solvers get defaults."""
    if solver == 'HIGHS':
        return {'time_limit': opts.time_limit, 'mip_rel_gap': gap}
    if solver == 'SCIP':
        return {'scip_params': {'limits/time': opts.time_limit, 'limits/gap': gap}}
    if solver == 'GUROBI':
        return {'TimeLimit': opts.time_limit, 'MIPGap': gap}
    if solver == 'CPLEX':
        return {'cplex_params': {'timelimit': opts.time_limit, 'mip.tolerances.mipgap': gap}}
    if solver == 'MOSEK':
        return {'mosek_params': {'MSK_DPAR_OPTIMIZER_MAX_TIME': opts.time_limit,
                                 'MSK_DPAR_MIO_TOL_REL_GAP': gap}}
    if solver == 'SCIPY':
        return {'scipy_options': {'time_limit': opts.time_limit, 'mip_rel_gap': gap}}
    return {}


class CvxpyBackend(BaseBackend):
    """Solves problems in-process through cvxpy."""

    name = 'cvxpy'

    def __init__(self, preferences: Optional[Dict[str, List[str]]] = None):
        super().__init__({'preferences': preferences or Config.CVXPY_SOLVERS})
        self.installed = set(cvxpy.installed_solvers())
        self.logger = logging.getLogger(__name__)
        supports = {cls for cls in FALLBACK_CHAIN if self.pick_solver(cls)}
        self._capabilities = BackendCapabilities(frozenset(supports))
        self.logger.debug(f"cvxpy solvers installed: {sorted(self.installed)}; supports {sorted(supports)}")

    @property
    def capabilities(self) -> BackendCapabilities:
        return self._capabilities

    def pick_solver(self, problem_class: str) -> Optional[str]:
        preferences = self.config['preferences']
        for cls in FALLBACK_CHAIN[problem_class]:
            for solver in preferences.get(cls, []):
                if solver in self.installed:
                    return solver
        return None

    def _solve(self, problem: ModelProblem, opts: SolveOptions) -> SolveResult:
        watch = Stopwatch()
        problem_class = problem.problem_class
        solver = self.pick_solver(problem_class)
        n = problem.n_vars

        int_idx = np.flatnonzero(problem.integer)
        cont_idx = np.flatnonzero(~problem.integer)
        parts, variables = [], []
        if cont_idx.size:
            xc = cvxpy.Variable(cont_idx.size, name='x')
            select = sp.csr_matrix((np.ones(cont_idx.size), (cont_idx, np.arange(cont_idx.size))),
                                   shape=(n, cont_idx.size))
            parts.append(select @ xc)
            variables.append((xc, cont_idx))
        if int_idx.size:
            xi = cvxpy.Variable(int_idx.size, name='y', integer=True)
            select = sp.csr_matrix((np.ones(int_idx.size), (int_idx, np.arange(int_idx.size))),
                                   shape=(n, int_idx.size))
            parts.append(select @ xi)
            variables.append((xi, int_idx))
        x = parts[0] if len(parts) == 1 else parts[0] + parts[1]

        constraints = []
        lower = np.flatnonzero(np.isfinite(problem.lb))
        upper = np.flatnonzero(np.isfinite(problem.ub))
        if lower.size:
            constraints.append(x[lower] >= problem.lb[lower])
        if upper.size:
            constraints.append(x[upper] <= problem.ub[upper])
        A_ub, b_ub, A_eq, b_eq = problem.linear_arrays()
        if A_ub.shape[0]:
            constraints.append(A_ub @ x <= b_ub)
        if A_eq.shape[0]:
            constraints.append(A_eq @ x == b_eq)
        for block in problem.quadratic:
            q_idx = np.array(sorted(block.diag), dtype=int)
            q = np.array([block.diag[j] for j in q_idx])
            lin = np.zeros(n)
            for j, v in block.linear.items():
                lin[j] = v
            constraints.append(cvxpy.sum(cvxpy.multiply(q, cvxpy.square(x[q_idx]))) + lin @ x <= block.rhs)

        c = problem.objective_vector()
        objective = cvxpy.Maximize(c @ x) if problem.sense == 'max' else cvxpy.Minimize(c @ x)
        model = cvxpy.Problem(objective, constraints)

        kwargs = solver_arguments(solver, opts, opts.gap_for(problem_class))
        try:
            model.solve(solver=solver, verbose=opts.verbosity > 1, **kwargs)
        except cvxpy.error.SolverError as e:
            return SolveResult('error', solve_time=watch.elapsed(), message=f"{solver}: {e}")

        status = STATUS_MAP.get(model.status, 'error')
        if status in ('infeasible', 'unbounded') or any(v.value is None for v, _ in variables):
            if status in ('optimal', 'feasible'):
                status = 'error'
            return SolveResult(status, solve_time=watch.elapsed(), message=f"{solver}: {model.status}")

        values = np.zeros(n)
        for var, index in variables:
            values[index] = np.asarray(var.value, dtype=float).ravel()
        primal = dict(zip(problem.names, values.tolist()))
        value = float(model.value) if model.value is not None else math.nan
        return SolveResult(status, value, primal, watch.elapsed(), f"{solver}: {model.status}")
