"""
Problem formulations for UC-CET

Builds the linear system X_L, every cut family on the emission function g
and complete ModelProblems for the ORIGIN, CP_LA, S_PW and PC_PW variants.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .config import Config
from .model import (
    BINARY_BLOCKS,
    DecisionVector,
    Instance,
    VariableLayout,
    eval_g,
    objective_vector,
    validate_solution,
)

logger = logging.getLogger(__name__)

SENSES = ('<=', '=', '>=')


def _accumulate(terms: Iterable[Tuple[int, float]]) -> Dict[int, float]:
    coeffs: Dict[int, float] = {}
    for index, value in terms:
        coeffs[int(index)] = coeffs.get(int(index), 0.0) + float(value)
    return coeffs


@dataclass(frozen=True)
class LinearConstraint:
    """Sparse row  sum coeffs[j] * x_j  (sense)  rhs."""

    coeffs: Dict[int, float]
    sense: str
    rhs: float
    tag: str

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"unknown sense {self.sense!r}")
        if not self.tag:
            raise ValueError("row tag must be nonempty")
        object.__setattr__(self, 'coeffs', {j: float(v) for j, v in self.coeffs.items() if v != 0.0})
        object.__setattr__(self, 'rhs', float(self.rhs))

    def activity(self, values: np.ndarray) -> float:
        return float(sum(v * values[j] for j, v in self.coeffs.items()))

    def violation(self, values: np.ndarray) -> float:
        lhs = self.activity(values)
        if self.sense == '<=':
            return max(0.0, lhs - self.rhs)
        if self.sense == '>=':
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.coeffs.values()))


@dataclass(frozen=True)
class QuadraticConstraint:
    """Convex row  sum diag[j] * x_j^2 + sum linear[j] * x_j  <=  rhs."""

    diag: Dict[int, float]
    linear: Dict[int, float]
    rhs: float
    tag: str

    def __post_init__(self):
        if any(v < 0 for v in self.diag.values()):
            raise ValueError("quadratic block must be positive semidefinite")
        object.__setattr__(self, 'diag', {j: float(v) for j, v in self.diag.items() if v != 0.0})
        object.__setattr__(self, 'linear', {j: float(v) for j, v in self.linear.items() if v != 0.0})

    def activity(self, values: np.ndarray) -> float:
        quad = sum(q * values[j] ** 2 for j, q in self.diag.items())
        return float(quad + sum(a * values[j] for j, a in self.linear.items()))

    def violation(self, values: np.ndarray) -> float:
        return max(0.0, self.activity(values) - self.rhs)


@dataclass(frozen=True, eq=False)
class ModelProblem:
    """An immutable LP/MILP/QCP/MIQCP over named variables."""

    names: Tuple[str, ...]
    lb: np.ndarray
    ub: np.ndarray
    integer: np.ndarray
    rows: Tuple[LinearConstraint, ...]
    quadratic: Tuple[QuadraticConstraint, ...] = ()
    objective: Dict[int, float] = field(default_factory=dict)
    sense: str = 'min'
    name: str = 'uccet'
    layout: Optional[VariableLayout] = None

    def __post_init__(self):
        n = len(self.names)
        for attr, dtype in (('lb', float), ('ub', float), ('integer', bool)):
            arr = np.array(getattr(self, attr), dtype=dtype)
            if arr.shape != (n,):
                raise ValueError(f"{attr} has shape {arr.shape}, expected ({n},)")
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        object.__setattr__(self, 'rows', tuple(self.rows))
        object.__setattr__(self, 'quadratic', tuple(self.quadratic))
        if self.sense not in ('min', 'max'):
            raise ValueError(f"unknown objective sense {self.sense!r}")
        for row in self.rows:
            if row.coeffs and max(row.coeffs) >= n:
                raise ValueError(f"row {row.tag!r} references an undeclared variable")

    @property
    def n_vars(self) -> int:
        return len(self.names)

    @property
    def problem_class(self) -> str:
        mixed = bool(self.integer.any())
        if self.quadratic:
            return 'MIQCP' if mixed else 'QCP'
        return 'MILP' if mixed else 'LP'

    def with_rows(self, rows: Iterable[LinearConstraint]) -> 'ModelProblem':
        return replace(self, rows=self.rows + tuple(rows))

    def with_quadratic(self, blocks: Iterable[QuadraticConstraint]) -> 'ModelProblem':
        return replace(self, quadratic=self.quadratic + tuple(blocks))

    def with_objective(self, objective: Dict[int, float], sense: str = 'min') -> 'ModelProblem':
        return replace(self, objective={j: v for j, v in objective.items() if v != 0.0}, sense=sense)

    def with_bounds(self, bounds: Dict[int, Tuple[float, float]]) -> 'ModelProblem':
        lb, ub = self.lb.copy(), self.ub.copy()
        for j, (lo, hi) in bounds.items():
            lb[j], ub[j] = lo, hi
        return replace(self, lb=lb, ub=ub)

    def relaxed(self) -> 'ModelProblem':
        return replace(self, integer=np.zeros(self.n_vars, dtype=bool))

    def renamed(self, name: str) -> 'ModelProblem':
        return replace(self, name=name)

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(self.n_vars)
        for j, v in self.objective.items():
            c[j] = v
        return c

    def objective_value(self, values: np.ndarray) -> float:
        return float(self.objective_vector() @ np.asarray(values, dtype=float))

    def linear_arrays(self):
        """Rows as scipy.sparse blocks: (A_ub, b_ub, A_eq, b_eq), '>=' rows negated."""
        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
        for row in self.rows:
            if row.sense == '=':
                eq_rows.append(row.coeffs)
                eq_rhs.append(row.rhs)
            elif row.sense == '<=':
                ub_rows.append(row.coeffs)
                ub_rhs.append(row.rhs)
            else:
                ub_rows.append({j: -v for j, v in row.coeffs.items()})
                ub_rhs.append(-row.rhs)
        return (self._sparse(ub_rows), np.array(ub_rhs, dtype=float),
                self._sparse(eq_rows), np.array(eq_rhs, dtype=float))

    def _sparse(self, rows: List[Dict[int, float]]) -> sp.csr_matrix:
        data, indices, indptr = [], [], [0]
        for coeffs in rows:
            for j, v in sorted(coeffs.items()):
                indices.append(j)
                data.append(v)
            indptr.append(len(indices))
        return sp.csr_matrix((data, indices, indptr), shape=(len(rows), self.n_vars))

    def max_violation(self, values: np.ndarray) -> float:
        values = np.asarray(values, dtype=float)
        worst = float(np.max(np.concatenate([self.lb - values, values - self.ub, [0.0]])))
        for row in self.rows:
            worst = max(worst, row.violation(values))
        for block in self.quadratic:
            worst = max(worst, block.violation(values))
        return worst

    def row_counts(self) -> Dict[str, int]:
        """Number of rows per family (tag prefix before the first space)."""
        counts: Dict[str, int] = {}
        for row in self.rows:
            family = row.tag.split(' ', 1)[0]
            counts[family] = counts.get(family, 0) + 1
        return counts


# ---------------------------------------------------------------------------
# X_L
# ---------------------------------------------------------------------------

def _default_bounds(layout: VariableLayout):
    inf = math.inf
    lb = np.zeros(layout.size)
    ub = np.full(layout.size, inf)
    integer = np.zeros(layout.size, dtype=bool)
    for block in BINARY_BLOCKS:
        index = layout.idx(block)
        ub[index] = 1.0
        integer[index] = True
    ub[layout.idx('p')] = 1.0
    lb[layout.idx('z')] = -inf
    if layout.has('r'):
        ub[layout.idx('r')] = Config.R_CAP
    if layout.has('h'):
        lb[layout.idx('h')] = -inf
    return lb, ub, integer


def _capacity_warning(inst: Instance):
    capacity = inst.unit_array('p_max').sum()
    short = np.nonzero(inst.demand + inst.reserve > capacity + 1e-9)[0]
    if short.size:
        logger.warning(
            f"Demand plus reserve exceeds fleet capacity {capacity:.1f} MW in periods "
            f"{[int(t) + 1 for t in short]}; model will be infeasible"
        )


def build_linear_base(inst: Instance, layout: Optional[VariableLayout] = None) -> ModelProblem:
    """X_L: cost and start-up epigraphs, operating limits, unit-state logic and the linear budget."""
    layout = layout or VariableLayout.for_instance(inst)
    _capacity_warning(inst)
    N, T, L = inst.n_units, inst.horizon, inst.l_seg
    U, P, S, Z, SU = layout.idx('u'), layout.idx('p'), layout.idx('S'), layout.idx('z'), layout.idx('s')
    u_b, u_s, de_b, de_s, eta = (layout.idx(b) for b in ('u_b', 'u_s', 'de_b', 'de_s', 'eta'))
    p_min, p_max = inst.unit_array('p_min'), inst.unit_array('p_max')
    rows: List[LinearConstraint] = []

    for i, unit in enumerate(inst.units):
        extra = unit.c_cold - unit.c_hot
        for t in range(1, T + 1):
            k = t - 1
            # (2) production-cost cuts
            for l in range(L + 1):
                frac = l / L
                rows.append(LinearConstraint(
                    _accumulate([(P[i, k], 2 * inst.gamma_t[i] * frac + inst.beta_t[i]),
                                 (U[i, k], inst.alpha_t[i] - inst.gamma_t[i] * frac ** 2),
                                 (Z[i, k], -1.0)]),
                    '<=', 0.0, f"cost-cut i={i + 1} t={t} l={l}"))
            # (3) start-up cost
            rows.append(LinearConstraint({S[i, k]: -1.0}, '<=', 0.0, f"startup-nonneg i={i + 1} t={t}"))
            history = [(U[i, tau - 1], -extra) for tau in inst.history_window(i, t)]
            rows.append(LinearConstraint(
                _accumulate([(SU[i, k], extra), (S[i, k], -1.0)] + history),
                '<=', extra * inst.f_init[i, k], f"startup-cost i={i + 1} t={t}"))
            # (5) p~ <= u
            rows.append(LinearConstraint({P[i, k]: 1.0, U[i, k]: -1.0}, '<=', 0.0,
                                         f"gen-limit i={i + 1} t={t}"))
            # (8)(9) ramping
            if t >= 2:
                rows.append(LinearConstraint(
                    _accumulate([(P[i, k], 1.0), (P[i, k - 1], -1.0), (U[i, k], -inst.p_up_t[i]),
                                 (SU[i, k], -(inst.p_start_t[i] - inst.p_up_t[i]))]),
                    '<=', 0.0, f"ramp-up i={i + 1} t={t}"))
                shut_gap = inst.p_shut_t[i] - inst.p_down_t[i]
                rows.append(LinearConstraint(
                    _accumulate([(P[i, k - 1], 1.0), (P[i, k], -1.0), (U[i, k - 1], -inst.p_shut_t[i]),
                                 (SU[i, k], -shut_gap), (U[i, k], shut_gap)]),
                    '<=', 0.0, f"ramp-down i={i + 1} t={t}"))
            # (13) state
            if t == 1:
                rows.append(LinearConstraint({U[i, k]: 1.0, SU[i, k]: -1.0}, '<=', float(unit.u0),
                                             f"state i={i + 1} t={t}"))
            else:
                rows.append(LinearConstraint(
                    {U[i, k]: 1.0, U[i, k - 1]: -1.0, SU[i, k]: -1.0}, '<=', 0.0, f"state i={i + 1} t={t}"))

        # (10) minimum up time
        for t in range(inst.init_up[i] + 1, T + 1):
            terms = [(SU[i, w - 1], 1.0) for w in inst.min_up_window(i, t)] + [(U[i, t - 1], -1.0)]
            rows.append(LinearConstraint(_accumulate(terms), '<=', 0.0, f"min-up i={i + 1} t={t}"))
        # (11) minimum down time
        for t in range(inst.init_down[i] + 1, T + 1):
            terms = [(SU[i, w - 1], 1.0) for w in inst.min_down_window(i, t)]
            anchor = inst.min_down_anchor(i, t)
            if anchor == 0:
                rhs = 1.0 - unit.u0
            else:
                terms.append((U[i, anchor - 1], 1.0))
                rhs = 1.0
            rows.append(LinearConstraint(_accumulate(terms), '<=', rhs, f"min-down i={i + 1} t={t}"))
        # (12) initial status
        for t in range(1, inst.fixed_periods(i) + 1):
            rows.append(LinearConstraint({U[i, t - 1]: 1.0}, '=', float(unit.u0),
                                         f"initial-status i={i + 1} t={t}"))

    for t in range(1, T + 1):
        k = t - 1
        balance = [(P[i, k], inst.span[i]) for i in range(N)] + [(U[i, k], p_min[i]) for i in range(N)]
        rows.append(LinearConstraint(_accumulate(balance), '=', inst.demand[k], f"power-balance t={t}"))
        rows.append(LinearConstraint({U[i, k]: p_max[i] for i in range(N)}, '>=',
                                     inst.demand[k] + inst.reserve[k], f"spinning-reserve t={t}"))

    # (19) linearized budget, (15)-(17) trading
    budget = ([(U[i, t], inst.a_t[i]) for i in range(N) for t in range(T)]
              + [(P[i, t], inst.b_t[i]) for i in range(N) for t in range(T)]
              + [(eta, 1.0), (de_b, -1.0), (de_s, 1.0)])
    rows.append(LinearConstraint(_accumulate(budget), '<=', inst.cet.e0, "emission-budget-linear"))
    rows.append(LinearConstraint({de_b: 1.0, u_b: -inst.cet.de_b_max}, '<=', 0.0, "trading-buy"))
    rows.append(LinearConstraint({de_s: 1.0, u_s: -inst.cet.de_s_max}, '<=', 0.0, "trading-sell"))
    rows.append(LinearConstraint({u_b: 1.0, u_s: 1.0}, '<=', 1.0, "trading-exclusive"))

    lb, ub, integer = _default_bounds(layout)
    c = objective_vector(inst, layout)
    problem = ModelProblem(
        names=tuple(layout.names()), lb=lb, ub=ub, integer=integer, rows=tuple(rows),
        objective={j: float(v) for j, v in enumerate(c) if v != 0.0}, sense='min',
        name='x_l', layout=layout,
    )
    logger.debug(f"Built X_L with {len(rows)} rows over {layout.size} variables")
    return problem


# ---------------------------------------------------------------------------
# Cuts on g
# ---------------------------------------------------------------------------

def _target_layout(chi_hat: DecisionVector, layout: Optional[VariableLayout]) -> VariableLayout:
    return layout or chi_hat.layout


def tangent_cut(inst: Instance, chi_hat: DecisionVector, layout: Optional[VariableLayout] = None,
                tag: str = "tangent-cut") -> LinearConstraint:
    """Outer-approximation row  sum 2c~P^ p~ - eta <= sum c~P^^2."""
    layout = _target_layout(chi_hat, layout)
    P, p_hat = layout.idx('p'), chi_hat.p
    slope = 2.0 * inst.c_t[:, None] * p_hat
    terms = list(zip(P.ravel(), slope.ravel())) + [(layout.idx('eta'), -1.0)]
    rhs = float(np.sum(inst.c_t[:, None] * p_hat ** 2))
    return LinearConstraint(_accumulate(terms), '<=', rhs, tag)


def perspective_cut(inst: Instance, chi_hat: DecisionVector, layout: Optional[VariableLayout] = None,
                    tag: str = "psp-cut") -> LinearConstraint:
    """Perspective row  sum (2c~P^ p~ - c~P^^2 u) - eta <= 0."""
    layout = _target_layout(chi_hat, layout)
    P, U, p_hat = layout.idx('p'), layout.idx('u'), chi_hat.p
    slope = 2.0 * inst.c_t[:, None] * p_hat
    offset = -inst.c_t[:, None] * p_hat ** 2
    terms = (list(zip(P.ravel(), slope.ravel())) + list(zip(U.ravel(), offset.ravel()))
             + [(layout.idx('eta'), -1.0)])
    return LinearConstraint(_accumulate(terms), '<=', 0.0, tag)


def inflated_nl_cut(inst: Instance, chi_hat: DecisionVector, mu: float,
                    layout: Optional[VariableLayout] = None, tag: str = "inflated-cut") -> LinearConstraint:
    """Perspective row shifted by mu * r * ||coefficients||_2."""
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu must lie in (0, 1], got {mu}")
    layout = layout or chi_hat.layout.with_extras('r')
    base = perspective_cut(inst, chi_hat, layout, tag)
    norm = base.norm()
    if norm == 0.0:
        logger.warning(f"Degenerate cut gradient at {tag}; emitting plain perspective cut")
        return base
    coeffs = dict(base.coeffs)
    coeffs[layout.idx('r')] = mu * norm
    return LinearConstraint(coeffs, '<=', base.rhs, tag)


def objective_cut(inst: Instance, incumbents: 'IncumbentSet', mu: float,
                  layout: VariableLayout, slack: float = Config.OBJECTIVE_CUT_TOL) -> Optional[LinearConstraint]:
    """Row  l(chi) + (1/mu) ||grad l||_2 r <= v + slack * max(1, |v|) for the best incumbent v.

    None before the first incumbent.
    """
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu must lie in (0, 1], got {mu}")
    if incumbents.best is None:
        return None
    c = objective_vector(inst, layout)
    coeffs = {j: float(v) for j, v in enumerate(c) if v != 0.0}
    coeffs[layout.idx('r')] = np.linalg.norm(c) / mu
    v = incumbents.best.objective
    return LinearConstraint(coeffs, '<=', v + slack * max(1.0, abs(v)), "objective-cut")


def build_piecewise_emission(inst: Instance, K: int = Config.PIECEWISE_K, perspective: bool = False,
                             layout: Optional[VariableLayout] = None) -> List[LinearConstraint]:
    """K aggregated cuts at evenly spaced breakpoints P^ = k/(K-1)."""
    if K < 2:
        raise ValueError("piecewise approximation needs at least two breakpoints")
    layout = layout or VariableLayout.for_instance(inst)
    family = 'pc_pw' if perspective else 's_pw'
    rows = []
    for k in range(K):
        level = k / (K - 1)
        point = DecisionVector.from_blocks(layout, u=1.0, p=level)
        make = perspective_cut if perspective else tangent_cut
        rows.append(make(inst, point, layout, tag=f"{family}-cut k={k}"))
    return rows


def emission_block(inst: Instance, layout: VariableLayout, with_h: bool = False) -> QuadraticConstraint:
    """sum c~ p~^2 - eta (- h) <= 0."""
    P = layout.idx('p')
    diag = {int(P[i, t]): float(inst.c_t[i]) for i in range(inst.n_units) for t in range(inst.horizon)}
    linear = {layout.idx('eta'): -1.0}
    if with_h:
        linear[layout.idx('h')] = -1.0
    return QuadraticConstraint(diag, linear, 0.0, "emission-budget" if not with_h else "emission-epigraph")


def fix_binaries(problem: ModelProblem, chi: DecisionVector) -> ModelProblem:
    """Pin u, s, u_b, u_s to the rounded values of chi and drop integrality."""
    layout = problem.layout
    index = layout.binary_indices()
    values = np.clip(np.round(chi.project(layout).values[index]), 0.0, 1.0)
    fixed = problem.with_bounds({int(j): (v, v) for j, v in zip(index, values)})
    return fixed.relaxed()


def build_original_qcp(inst: Instance, integrality: bool = True) -> ModelProblem:
    """ORIGIN: X_L plus the exact quadratic emission budget."""
    base = build_linear_base(inst)
    problem = base.with_quadratic([emission_block(inst, base.layout)])
    if not integrality:
        problem = problem.relaxed()
    return problem.renamed('origin' if integrality else 'origin_relaxed')


def build_g_epigraph(inst: Instance, h_lower: Optional[float] = None,
                     fixed: Optional[DecisionVector] = None) -> ModelProblem:
    """min h  s.t.  X_L, g(chi) <= h; continuous, or binaries pinned to `fixed`."""
    layout = VariableLayout.for_instance(inst, extras=('h',))
    problem = build_linear_base(inst, layout).with_quadratic([emission_block(inst, layout, with_h=True)])
    h = layout.idx('h')
    if h_lower is not None:
        problem = problem.with_bounds({h: (h_lower, math.inf)})
    problem = problem.with_objective({h: 1.0}, 'min')
    if fixed is not None:
        return fix_binaries(problem, fixed).renamed('feasibility_adjustment')
    return problem.relaxed().renamed('center_point')


def build_fixed_qcp(inst: Instance, fixed: DecisionVector) -> ModelProblem:
    """min l(chi) over X_L and g <= 0 with the binaries of `fixed`."""
    return fix_binaries(build_original_qcp(inst, integrality=True), fixed).renamed('fixed_integer')


def build_cut_relaxation(inst: Instance, points: Sequence[DecisionVector], family: str = 'perspective',
                         integrality: bool = False) -> ModelProblem:
    """X_L plus tangent or perspective cuts at each point."""
    if family not in ('perspective', 'tangent'):
        raise ValueError(f"unknown cut family {family!r}")
    base = build_linear_base(inst)
    make = perspective_cut if family == 'perspective' else tangent_cut
    prefix = 'psp-cut' if family == 'perspective' else 'tangent-cut'
    rows = [make(inst, chi, base.layout, tag=f"{prefix} s={n + 1}") for n, chi in enumerate(points)]
    problem = base.with_rows(rows)
    if not integrality:
        problem = problem.relaxed()
    return problem.renamed(f"{family}_relaxation")


def build_piecewise_relaxation(inst: Instance, perspective: bool, K: int = Config.PIECEWISE_K,
                               integrality: bool = False) -> ModelProblem:
    """S_PW (tangent) or PC_PW (perspective) model."""
    base = build_linear_base(inst)
    problem = base.with_rows(build_piecewise_emission(inst, K, perspective, base.layout))
    if not integrality:
        problem = problem.relaxed()
    return problem.renamed('pc_pw' if perspective else 's_pw')


# ---------------------------------------------------------------------------
# Point sets
# ---------------------------------------------------------------------------

class CutSet:
    """Linearization points on the boundary of g (the set Omega^R).

    With an instance attached, points with |g| above tol * max(1, |eta|) are logged and rejected.
    """

    def __init__(self, points: Iterable[DecisionVector] = (), inst: Optional[Instance] = None,
                 tol: float = Config.EPS_G):
        self.inst = inst
        self.tol = tol
        self._points: List[DecisionVector] = []
        self._promoted: List[bool] = []
        self._snapshots: List[np.ndarray] = []
        for point in points:
            self.add(point)

    def add(self, point: DecisionVector, promoted: bool = False) -> bool:
        if self.inst is not None:
            g = eval_g(self.inst, point)
            if abs(g) > self.tol * max(1.0, abs(float(point.eta))):
                logger.warning(f"Rejected linearization point off the boundary: g = {g:.6g}")
                return False
        self._points.append(point)
        self._promoted.append(promoted)
        self._snapshots.append(np.array(point.p, copy=True))
        return True

    def __len__(self):
        return len(self._points)

    def __iter__(self):
        return iter(self._points)

    @property
    def points(self) -> List[DecisionVector]:
        return list(self._points)

    @property
    def snapshots(self) -> List[np.ndarray]:
        return list(self._snapshots)

    def promoted(self, index: int) -> bool:
        return self._promoted[index]

    def perspective_rows(self, inst: Instance, layout: VariableLayout) -> List[LinearConstraint]:
        return [perspective_cut(inst, chi, layout, tag=f"psp-cut s={n + 1}") for n, chi in enumerate(self._points)]

    def inflated_rows(self, inst: Instance, mu: float, layout: VariableLayout) -> List[LinearConstraint]:
        return [inflated_nl_cut(inst, chi, mu, layout, tag=f"inflated-cut s={n + 1}")
                for n, chi in enumerate(self._points)]


@dataclass(frozen=True)
class Incumbent:
    point: DecisionVector
    objective: float
    iteration: int
    elapsed: float


class IncumbentSet:
    """Integer-feasible solutions found so far (the set Omega^F).

    With an instance attached, solutions failing validate_solution are logged and rejected.
    """

    def __init__(self, inst: Optional[Instance] = None):
        self.inst = inst
        self.solutions: List[Incumbent] = []
        self._best: Optional[int] = None

    def __len__(self):
        return len(self.solutions)

    def add(self, point: DecisionVector, objective: float, iteration: int = 0, elapsed: float = 0.0) -> bool:
        """Store a solution; returns True when it improves the best objective."""
        if not point.binary_feasible():
            raise ValueError("incumbents must be binary-feasible")
        if self.inst is not None:
            report = validate_solution(self.inst, point)
            if not report.feasible:
                logger.warning(f"Rejected incumbent {objective:.2f}: {report.summary()}")
                return False
        self.solutions.append(Incumbent(point, float(objective), iteration, elapsed))
        if self._best is None or objective < self.solutions[self._best].objective:
            self._best = len(self.solutions) - 1
            return True
        return False

    @property
    def best(self) -> Optional[Incumbent]:
        return None if self._best is None else self.solutions[self._best]

    @property
    def best_objective(self) -> float:
        return math.inf if self._best is None else self.solutions[self._best].objective
