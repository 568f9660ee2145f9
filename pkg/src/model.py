"""
Core model for unit commitment with carbon emission trading (UC-CET)

Holds the raw and derived problem data, the layout of the decision vector
chi = (u; P; x) and exact evaluators for the objective, the emission
constraint g and full-solution feasibility.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .config import Config
from .exceptions import InstanceValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnitParams:
    """Raw data of one thermal unit (MW, $, tCO2, periods)."""

    alpha: float
    beta: float
    gamma: float
    c_hot: float
    c_cold: float
    t_cold: int
    p_min: float
    p_max: float
    p_up: float
    p_down: float
    p_start: float
    p_shut: float
    u0: int
    t0: int
    t_on: int
    t_off: int
    a_e: float
    b_e: float
    c_e: float
    name: str = ""

    def validate(self, index: int):
        if not self.p_max > self.p_min:
            raise InstanceValidationError('p_max', f"must exceed p_min ({self.p_max} <= {self.p_min})", index)
        if self.p_min < 0:
            raise InstanceValidationError('p_min', "must be nonnegative", index)
        if self.gamma < 0:
            raise InstanceValidationError('gamma', "must be nonnegative (convex cost)", index)
        if self.c_e < 0:
            raise InstanceValidationError('c_e', "must be nonnegative (convex emission curve)", index)
        if self.t_on < 1:
            raise InstanceValidationError('t_on', "must be at least 1", index)
        if self.t_off < 1:
            raise InstanceValidationError('t_off', "must be at least 1", index)
        if self.c_hot < 0:
            raise InstanceValidationError('c_hot', "must be nonnegative", index)
        if self.c_cold < self.c_hot:
            raise InstanceValidationError('c_cold', "must be at least c_hot", index)
        if self.t_cold < 0:
            raise InstanceValidationError('t_cold', "must be nonnegative", index)
        if self.u0 not in (0, 1):
            raise InstanceValidationError('u0', "must be 0 or 1", index)
        if (self.t0 > 0) != (self.u0 == 1):
            raise InstanceValidationError('t0', f"sign inconsistent with u0={self.u0}", index)
        for ramp in ('p_up', 'p_down', 'p_start', 'p_shut'):
            if getattr(self, ramp) < 0:
                raise InstanceValidationError(ramp, "must be nonnegative", index)


UNIT_FIELDS = tuple(f.name for f in fields(UnitParams) if f.name != 'name')
INTEGER_UNIT_FIELDS = ('t_cold', 'u0', 't0', 't_on', 't_off')


@dataclass(frozen=True)
class SystemParams:
    """Horizon, demand and spinning reserve per period (MW)."""

    horizon: int
    demand: Tuple[float, ...]
    reserve: Tuple[float, ...]

    def validate(self):
        if self.horizon < 1:
            raise InstanceValidationError('horizon', "must be at least 1")
        for name in ('demand', 'reserve'):
            values = getattr(self, name)
            if len(values) != self.horizon:
                raise InstanceValidationError(name, f"has {len(values)} entries, expected {self.horizon}")
            if any(v < 0 for v in values):
                raise InstanceValidationError(name, "must be nonnegative")


@dataclass(frozen=True)
class CETParams:
    """Carbon emission trading prices ($/tCO2) and allowances (tCO2)."""

    pi_b: float
    pi_s: float
    e0: float
    de_b_max: float
    de_s_max: float

    def validate(self):
        if self.pi_s < 0:
            raise InstanceValidationError('pi_s', "must be nonnegative")
        if self.pi_b < self.pi_s:
            raise InstanceValidationError('pi_b', "must be at least pi_s (no arbitrage)")
        for name in ('e0', 'de_b_max', 'de_s_max'):
            if getattr(self, name) < 0:
                raise InstanceValidationError(name, "must be nonnegative")


def _frozen(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """Problem data plus normalized constants derived from it."""

    units: Tuple[UnitParams, ...]
    system: SystemParams
    cet: CETParams
    l_seg: int
    alpha_t: np.ndarray = field(repr=False)
    beta_t: np.ndarray = field(repr=False)
    gamma_t: np.ndarray = field(repr=False)
    a_t: np.ndarray = field(repr=False)
    b_t: np.ndarray = field(repr=False)
    c_t: np.ndarray = field(repr=False)
    span: np.ndarray = field(repr=False)
    p_up_t: np.ndarray = field(repr=False)
    p_down_t: np.ndarray = field(repr=False)
    p_start_t: np.ndarray = field(repr=False)
    p_shut_t: np.ndarray = field(repr=False)
    init_up: Tuple[int, ...] = field(repr=False)
    init_down: Tuple[int, ...] = field(repr=False)
    f_init: np.ndarray = field(repr=False)

    @property
    def n_units(self) -> int:
        return len(self.units)

    @property
    def horizon(self) -> int:
        return self.system.horizon

    @property
    def demand(self) -> np.ndarray:
        return np.asarray(self.system.demand, dtype=float)

    @property
    def reserve(self) -> np.ndarray:
        return np.asarray(self.system.reserve, dtype=float)

    def unit_array(self, name: str) -> np.ndarray:
        return np.array([getattr(unit, name) for unit in self.units], dtype=float)

    # Index windows use 1-based periods as in the model statement.

    def history_window(self, i: int, t: int) -> range:
        """Periods tau summed in the cold-start row of unit i at period t."""
        unit = self.units[i]
        return range(max(t - unit.t_off - unit.t_cold - 1, 1), t)

    def min_up_window(self, i: int, t: int) -> range:
        return range(max(t - self.units[i].t_on + 1, 1), t + 1)

    def min_down_window(self, i: int, t: int) -> range:
        return range(max(t - self.units[i].t_off + 1, 1), t + 1)

    def min_down_anchor(self, i: int, t: int) -> int:
        """Period whose status bounds the min-down row; 0 means the initial state."""
        return max(t - self.units[i].t_off, 0)

    def fixed_periods(self, i: int) -> int:
        return min(self.init_up[i] + self.init_down[i], self.horizon)


def derive_instance(units: Sequence[UnitParams], system: SystemParams, cet: CETParams,
                    l_seg: int = Config.L_SEG) -> Instance:
    """Validate raw data and compute every derived constant."""
    if len(units) == 0:
        raise InstanceValidationError('units', "fleet is empty")
    if l_seg < 1:
        raise InstanceValidationError('l_seg', "must be at least 1")
    for index, unit in enumerate(units):
        unit.validate(index)
    system.validate()
    cet.validate()

    T = system.horizon
    p_min = np.array([u.p_min for u in units], dtype=float)
    p_max = np.array([u.p_max for u in units], dtype=float)
    span = p_max - p_min

    def arr(name):
        return np.array([getattr(u, name) for u in units], dtype=float)

    alpha, beta, gamma = arr('alpha'), arr('beta'), arr('gamma')
    a_e, b_e, c_e = arr('a_e'), arr('b_e'), arr('c_e')

    init_up, init_down = [], []
    f_init = np.zeros((len(units), T))
    for i, unit in enumerate(units):
        init_up.append(max(0, min(T, unit.u0 * (unit.t_on - unit.t0))))
        init_down.append(max(0, min(T, (1 - unit.u0) * (unit.t_off + unit.t0))))
        off_before = max(0, -unit.t0)
        for t in range(1, T + 1):
            lag = t - unit.t_off - unit.t_cold - 1
            if lag <= 0 and off_before < abs(lag) + 1:
                f_init[i, t - 1] = 1.0

    return Instance(
        units=tuple(units),
        system=system,
        cet=cet,
        l_seg=int(l_seg),
        alpha_t=_frozen(alpha + beta * p_min + gamma * p_min ** 2),
        beta_t=_frozen(span * (beta + 2.0 * gamma * p_min)),
        gamma_t=_frozen(gamma * span ** 2),
        a_t=_frozen(a_e + b_e * p_min + c_e * p_min ** 2),
        b_t=_frozen(span * (b_e + 2.0 * c_e * p_min)),
        c_t=_frozen(c_e * span ** 2),
        span=_frozen(span),
        p_up_t=_frozen(arr('p_up') / span),
        p_down_t=_frozen(arr('p_down') / span),
        p_start_t=_frozen((arr('p_start') - p_min) / span),
        p_shut_t=_frozen((arr('p_shut') - p_min) / span),
        init_up=tuple(init_up),
        init_down=tuple(init_down),
        f_init=_frozen(f_init),
    )


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------

def _unit_from_record(record: Mapping, index: int) -> UnitParams:
    missing = [name for name in UNIT_FIELDS if name not in record or pd.isna(record[name])]
    if missing:
        raise InstanceValidationError(missing[0], "missing", index)
    values = {}
    for name in UNIT_FIELDS:
        value = record[name]
        values[name] = int(value) if name in INTEGER_UNIT_FIELDS else float(value)
    values['name'] = str(record.get('name', '') or f"G{index + 1}")
    return UnitParams(**values)


def read_unit_table(path) -> List[UnitParams]:
    """Read a CSV unit table with one row per unit and the UnitParams columns."""
    frame = pd.read_csv(path)
    return [_unit_from_record(row, i) for i, row in enumerate(frame.to_dict(orient='records'))]


def instance_from_dict(data: Mapping, base_dir: Optional[Path] = None, l_seg: Optional[int] = None) -> Instance:
    units_section = data.get('units')
    if isinstance(units_section, str):
        csv_path = Path(units_section)
        if base_dir is not None and not csv_path.is_absolute():
            csv_path = base_dir / csv_path
        units = read_unit_table(csv_path)
    elif isinstance(units_section, list):
        units = [_unit_from_record(record, i) for i, record in enumerate(units_section)]
    else:
        raise InstanceValidationError('units', "must be a list of unit records or a CSV path")

    try:
        sys_data = data['system']
        system = SystemParams(
            horizon=int(sys_data['horizon']),
            demand=tuple(float(v) for v in sys_data['demand']),
            reserve=tuple(float(v) for v in sys_data['reserve']),
        )
    except KeyError as e:
        raise InstanceValidationError(f"system.{e.args[0]}", "missing") from e
    try:
        cet = CETParams(**{name: float(data['cet'][name])
                           for name in ('pi_b', 'pi_s', 'e0', 'de_b_max', 'de_s_max')})
    except KeyError as e:
        raise InstanceValidationError(f"cet.{e.args[0]}", "missing") from e

    segments = l_seg if l_seg is not None else int(data.get('l_seg', Config.L_SEG))
    return derive_instance(units, system, cet, segments)


def load_instance(path, units_csv=None, l_seg: Optional[int] = None) -> Instance:
    """Load an instance JSON file; units_csv overrides its unit section."""
    path = Path(path)
    with open(path, encoding='utf-8') as f:
        data = json.load(f)
    if units_csv is not None:
        data['units'] = str(Path(units_csv).resolve())
    inst = instance_from_dict(data, base_dir=path.parent, l_seg=l_seg)
    logger.info(f"Loaded instance {path.name}: N={inst.n_units}, T={inst.horizon}")
    return inst


def instance_to_dict(inst: Instance) -> Dict:
    return {
        'units': [asdict(unit) for unit in inst.units],
        'system': {
            'horizon': inst.horizon,
            'demand': list(inst.system.demand),
            'reserve': list(inst.system.reserve),
        },
        'cet': asdict(inst.cet),
        'l_seg': inst.l_seg,
    }


def save_instance(inst: Instance, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(instance_to_dict(inst), f, indent=2)
    return path


# ---------------------------------------------------------------------------
# Decision vector layout
# ---------------------------------------------------------------------------

MATRIX_BLOCKS = ('u', 's', 'p', 'z', 'S')
BINARY_BLOCKS = ('u', 's', 'u_b', 'u_s')
BLOCK_ORDER = ('u', 's', 'u_b', 'u_s', 'p', 'z', 'S', 'de_b', 'de_s', 'eta')
EXTRA_BLOCKS = ('r', 'h')
SCALAR_NAMES = {'u_b': 'ub', 'u_s': 'us', 'de_b': 'deb', 'de_s': 'des', 'eta': 'eta', 'r': 'r', 'h': 'h'}


class VariableLayout:
    """Canonical variable order (u, s, u_b, u_s, p, z, S, de_b, de_s, eta, r, h)."""

    def __init__(self, n_units: int, horizon: int, extras: Iterable[str] = ()):
        extras = tuple(name for name in EXTRA_BLOCKS if name in set(extras))
        self.n_units = n_units
        self.horizon = horizon
        self.extras = extras
        self._index: Dict[str, np.ndarray] = {}
        offset = 0
        for block in BLOCK_ORDER + extras:
            if block in MATRIX_BLOCKS:
                size = n_units * horizon
                self._index[block] = np.arange(offset, offset + size).reshape(n_units, horizon)
            else:
                size = 1
                self._index[block] = np.array(offset)
            offset += size
        self.size = offset

    @classmethod
    def for_instance(cls, inst: Instance, extras: Iterable[str] = ()) -> 'VariableLayout':
        return cls(inst.n_units, inst.horizon, extras)

    def with_extras(self, *extras: str) -> 'VariableLayout':
        return VariableLayout(self.n_units, self.horizon, set(self.extras) | set(extras))

    def __eq__(self, other):
        return (isinstance(other, VariableLayout) and self.n_units == other.n_units
                and self.horizon == other.horizon and self.extras == other.extras)

    def __hash__(self):
        return hash((self.n_units, self.horizon, self.extras))

    def __repr__(self):
        return f"VariableLayout(N={self.n_units}, T={self.horizon}, extras={self.extras})"

    def has(self, block: str) -> bool:
        return block in self._index

    def idx(self, block: str):
        """Index array (N x T) of a matrix block, or int of a scalar block."""
        index = self._index[block]
        return int(index) if index.ndim == 0 else index

    def binary_indices(self) -> np.ndarray:
        return np.concatenate([np.atleast_1d(self._index[b]).ravel() for b in BINARY_BLOCKS])

    def names(self) -> List[str]:
        names = [''] * self.size
        for block, index in self._index.items():
            if index.ndim == 0:
                names[int(index)] = SCALAR_NAMES[block]
            else:
                for i in range(self.n_units):
                    for t in range(self.horizon):
                        names[index[i, t]] = f"{block}_{i + 1}_{t + 1}"
        return names


@dataclass(frozen=True, eq=False)
class DecisionVector:
    """A point chi in the canonical layout."""

    layout: VariableLayout
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.layout.size,):
            raise ValueError(f"vector has shape {values.shape}, layout expects ({self.layout.size},)")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, layout: VariableLayout) -> 'DecisionVector':
        return cls(layout, np.zeros(layout.size))

    @classmethod
    def from_blocks(cls, layout: VariableLayout, **blocks) -> 'DecisionVector':
        values = np.zeros(layout.size)
        for block, value in blocks.items():
            values[layout.idx(block)] = value
        return cls(layout, values)

    @classmethod
    def from_primal(cls, layout: VariableLayout, primal: Mapping[str, float]) -> 'DecisionVector':
        names = layout.names()
        return cls(layout, np.array([primal.get(name, 0.0) for name in names]))

    def block(self, name: str):
        value = self.values[self.layout.idx(name)]
        return float(value) if np.ndim(value) == 0 else value

    u = property(lambda self: self.block('u'))
    s = property(lambda self: self.block('s'))
    u_b = property(lambda self: self.block('u_b'))
    u_s = property(lambda self: self.block('u_s'))
    p = property(lambda self: self.block('p'))
    z = property(lambda self: self.block('z'))
    S = property(lambda self: self.block('S'))
    de_b = property(lambda self: self.block('de_b'))
    de_s = property(lambda self: self.block('de_s'))
    eta = property(lambda self: self.block('eta'))

    def replace(self, **blocks) -> 'DecisionVector':
        values = self.values.copy()
        for block, value in blocks.items():
            values[self.layout.idx(block)] = value
        return DecisionVector(self.layout, values)

    def project(self, layout: VariableLayout) -> 'DecisionVector':
        """Same point in another layout; extra blocks missing here read as 0."""
        values = np.zeros(layout.size)
        for block in BLOCK_ORDER + EXTRA_BLOCKS:
            if layout.has(block) and self.layout.has(block):
                values[layout.idx(block)] = self.values[self.layout.idx(block)]
        return DecisionVector(layout, values)

    def blend(self, other: 'DecisionVector', lam: float) -> 'DecisionVector':
        """lam * self + (1 - lam) * other."""
        return DecisionVector(self.layout, lam * self.values + (1.0 - lam) * other.values)

    def binary_values(self) -> np.ndarray:
        return self.values[self.layout.binary_indices()]

    def binary_feasible(self, tol: float = Config.INTEGRALITY_TOL) -> bool:
        b = self.binary_values()
        return bool(np.all(np.abs(b - np.round(b)) <= tol))

    def rounded_binaries(self) -> 'DecisionVector':
        values = self.values.copy()
        index = self.layout.binary_indices()
        values[index] = np.clip(np.round(values[index]), 0.0, 1.0)
        return DecisionVector(self.layout, values)


# ---------------------------------------------------------------------------
# Evaluators
# ---------------------------------------------------------------------------

def _check_shape(inst: Instance, chi: DecisionVector):
    if chi.layout.n_units != inst.n_units or chi.layout.horizon != inst.horizon:
        raise ValueError(
            f"decision vector is {chi.layout.n_units}x{chi.layout.horizon}, "
            f"instance is {inst.n_units}x{inst.horizon}"
        )


def objective_vector(inst: Instance, layout: VariableLayout) -> np.ndarray:
    """Coefficients of the linear objective l(chi)."""
    c = np.zeros(layout.size)
    c[layout.idx('z')] = 1.0
    c[layout.idx('s')] = inst.unit_array('c_hot')[:, None]
    c[layout.idx('S')] = 1.0
    c[layout.idx('de_b')] = inst.cet.pi_b
    c[layout.idx('de_s')] = -inst.cet.pi_s
    return c


def eval_objective(inst: Instance, chi: DecisionVector) -> float:
    _check_shape(inst, chi)
    return float(objective_vector(inst, chi.layout) @ chi.values)


def eval_g(inst: Instance, chi: DecisionVector) -> float:
    """g(chi) = sum c~_i p~_it^2 - eta."""
    _check_shape(inst, chi)
    return float(np.sum(inst.c_t[:, None] * chi.p ** 2) - chi.eta)


def eval_grad_g(inst: Instance, chi: DecisionVector) -> np.ndarray:
    _check_shape(inst, chi)
    grad = np.zeros(chi.layout.size)
    grad[chi.layout.idx('p')] = 2.0 * inst.c_t[:, None] * chi.p
    grad[chi.layout.idx('eta')] = -1.0
    return grad


def emission_total(inst: Instance, chi: DecisionVector) -> float:
    """Exact emissions sum(a~ u + b~ p~ + c~ p~^2) in tCO2."""
    _check_shape(inst, chi)
    return float(np.sum(inst.a_t[:, None] * chi.u + inst.b_t[:, None] * chi.p
                        + inst.c_t[:, None] * chi.p ** 2))


def eta_ceiling(inst: Instance, chi: DecisionVector) -> float:
    """Largest eta admitted by the linearized budget row at chi."""
    linear = np.sum(inst.a_t[:, None] * chi.u + inst.b_t[:, None] * chi.p)
    return float(inst.cet.e0 + chi.de_b - chi.de_s - linear)


def lift_eta(inst: Instance, chi: DecisionVector) -> DecisionVector:
    """Copy of chi with eta raised to its ceiling (floored at 0); same cost, smallest g."""
    _check_shape(inst, chi)
    return chi.replace(eta=max(eta_ceiling(inst, chi), 0.0))


def startup_floor(inst: Instance, chi: DecisionVector) -> np.ndarray:
    """Smallest cold-start surcharge S~ admitted by the start-up rows."""
    u, s = chi.u, chi.s
    floor = np.zeros_like(s)
    for i, unit in enumerate(inst.units):
        extra = unit.c_cold - unit.c_hot
        for t in range(1, inst.horizon + 1):
            hist = sum(u[i, tau - 1] for tau in inst.history_window(i, t))
            floor[i, t - 1] = max(0.0, extra * (s[i, t - 1] - hist - inst.f_init[i, t - 1]))
    return floor


def eval_true_cost(inst: Instance, chi: DecisionVector, tol: float = Config.INTEGRALITY_TOL) -> float:
    """Quadratic production cost in MW terms plus start-up and trading cost."""
    _check_shape(inst, chi)
    if not chi.binary_feasible(tol):
        raise ValueError("true cost is defined for binary-feasible points only")
    chi = chi.rounded_binaries()
    alpha, beta, gamma = inst.unit_array('alpha'), inst.unit_array('beta'), inst.unit_array('gamma')
    p_min = inst.unit_array('p_min')
    on = chi.u
    power = on * p_min[:, None] + chi.p * inst.span[:, None]
    production = on * (alpha[:, None] + beta[:, None] * power + gamma[:, None] * power ** 2)
    startup = inst.unit_array('c_hot')[:, None] * chi.s + startup_floor(inst, chi)
    trading = inst.cet.pi_b * chi.de_b - inst.cet.pi_s * chi.de_s
    return float(production.sum() + startup.sum() + trading)


def power_output(inst: Instance, chi: DecisionVector) -> np.ndarray:
    """Dispatch in MW (N x T)."""
    return chi.u * inst.unit_array('p_min')[:, None] + chi.p * inst.span[:, None]


@dataclass
class ViolationReport:
    """Max violation per constraint family; only families above tolerance are kept.

    Families measured in MW, $ or tCO2 are divided by a magnitude of their
    right-hand side so the tolerance reads as relative there.
    """

    tol: float
    violations: Dict[str, float] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def __contains__(self, family):
        return family in self.violations

    def __getitem__(self, family):
        return self.violations[family]

    def record(self, family: str, values, scale=1.0):
        values = np.asarray(values, dtype=float) / np.maximum(1.0, np.abs(scale))
        worst = float(np.max(values)) if np.size(values) else 0.0
        if worst > self.tol:
            self.violations[family] = max(worst, self.violations.get(family, 0.0))

    def summary(self) -> str:
        if self.feasible:
            return "feasible"
        return ", ".join(f"{k}={v:.3g}" for k, v in sorted(self.violations.items()))


def validate_solution(inst: Instance, chi: DecisionVector, tol: float = Config.VALIDATION_TOL) -> ViolationReport:
    """Check every constraint family of the full model, including the quadratic budget."""
    _check_shape(inst, chi)
    report = ViolationReport(tol)
    N, T = inst.n_units, inst.horizon
    u, s, p, z, S = chi.u, chi.s, chi.p, chi.z, chi.S
    u0 = np.array([unit.u0 for unit in inst.units], dtype=float)
    u_prev = np.hstack([u0[:, None], u[:, :-1]])
    p_min, p_max = inst.unit_array('p_min'), inst.unit_array('p_max')

    report.record('bounds', np.concatenate([
        (-u).ravel(), (u - 1).ravel(), (-s).ravel(), (s - 1).ravel(),
        [-chi.u_b, chi.u_b - 1, -chi.u_s, chi.u_s - 1, -chi.de_b, -chi.de_s],
    ]))

    # (2) production-cost epigraph
    L = inst.l_seg
    for l in range(L + 1):
        frac = l / L
        rhs = ((2 * inst.gamma_t * frac + inst.beta_t)[:, None] * p
               + (inst.alpha_t - inst.gamma_t * frac ** 2)[:, None] * u)
        report.record('cost-epigraph', rhs - z, rhs)

    # (3) start-up cost
    report.record('startup-cost', np.concatenate([(-S).ravel(), (startup_floor(inst, chi) - S).ravel()]),
                  max(unit.c_cold - unit.c_hot for unit in inst.units))

    # (5)-(7)
    report.record('generation-limits', np.concatenate([(-p).ravel(), (p - u).ravel()]))
    supplied = (p * inst.span[:, None] + u * p_min[:, None]).sum(axis=0)
    report.record('power-balance', np.abs(supplied - inst.demand), inst.demand)
    report.record('spinning-reserve', inst.demand + inst.reserve - (u * p_max[:, None]).sum(axis=0),
                  inst.demand + inst.reserve)

    # (8)(9) ramping, t >= 2
    if T > 1:
        up = (p[:, 1:] - p[:, :-1]
              - (u[:, 1:] * inst.p_up_t[:, None] + s[:, 1:] * (inst.p_start_t - inst.p_up_t)[:, None]))
        down = (p[:, :-1] - p[:, 1:]
                - (u[:, :-1] * inst.p_shut_t[:, None]
                   + (s[:, 1:] - u[:, 1:]) * (inst.p_shut_t - inst.p_down_t)[:, None]))
        report.record('ramp-up', up)
        report.record('ramp-down', down)

    # (10)-(12) min up/down and initial status
    min_up, min_down, initial = [], [], []
    for i in range(N):
        for t in range(inst.init_up[i] + 1, T + 1):
            min_up.append(sum(s[i, w - 1] for w in inst.min_up_window(i, t)) - u[i, t - 1])
        for t in range(inst.init_down[i] + 1, T + 1):
            anchor = inst.min_down_anchor(i, t)
            u_anchor = u0[i] if anchor == 0 else u[i, anchor - 1]
            min_down.append(sum(s[i, w - 1] for w in inst.min_down_window(i, t)) - (1 - u_anchor))
        for t in range(1, inst.fixed_periods(i) + 1):
            initial.append(abs(u[i, t - 1] - u0[i]))
    report.record('min-up', min_up)
    report.record('min-down', min_down)
    report.record('initial-status', initial)

    # (13)
    report.record('state', u - u_prev - s)

    # (14)-(17) emission trading
    budget = inst.cet.e0 + chi.de_b - chi.de_s
    report.record('emission-budget', [emission_total(inst, chi) - budget], budget)
    report.record('trading-buy', [chi.de_b - chi.u_b * inst.cet.de_b_max], inst.cet.de_b_max)
    report.record('trading-sell', [chi.de_s - chi.u_s * inst.cet.de_s_max], inst.cet.de_s_max)
    report.record('trading-exclusive', [chi.u_b + chi.u_s - 1])
    return report
