"""
Benchmark instance generator

Builds fleets by replicating the eight base unit types, with demand from a
24-period load profile scaled to fleet capacity and an emission cap scaled
linearly with capacity.
"""

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .exceptions import InstanceValidationError
from .model import UNIT_FIELDS, CETParams, Instance, SystemParams, UnitParams, derive_instance

logger = logging.getLogger(__name__)

# Replication counts of base types 1-8 per benchmark instance
BENCHMARK_FLEETS: Dict[int, Tuple[int, ...]] = {
    1: (12, 11, 0, 0, 1, 4, 0, 0),
    2: (13, 15, 2, 0, 4, 0, 0, 1),
    3: (15, 11, 0, 1, 4, 5, 6, 3),
    4: (10, 10, 2, 5, 7, 5, 6, 5),
    5: (13, 12, 5, 7, 2, 5, 4, 6),
    6: (46, 45, 8, 0, 5, 0, 12, 16),
    7: (40, 54, 14, 8, 3, 15, 9, 13),
    8: (51, 58, 17, 19, 16, 1, 2, 1),
    9: (43, 46, 17, 15, 13, 15, 6, 12),
    10: (50, 59, 8, 15, 1, 18, 4, 17),
    11: (53, 50, 17, 15, 16, 5, 14, 12),
    12: (58, 50, 15, 7, 16, 18, 7, 12),
    13: (55, 48, 18, 5, 18, 17, 15, 11),
    14: (240, 220, 0, 0, 20, 80, 0, 0),
    15: (260, 300, 40, 0, 80, 0, 0, 20),
    16: (300, 260, 40, 120, 60, 20, 20, 60),
    17: (300, 220, 0, 20, 80, 100, 120, 60),
    18: (300, 260, 60, 140, 100, 60, 40, 20),
    19: (200, 200, 40, 100, 140, 100, 120, 100),
    20: (340, 320, 20, 60, 20, 140, 40, 80),
    21: (240, 340, 80, 140, 100, 40, 0, 100),
    22: (260, 240, 100, 140, 40, 100, 80, 120),
}

DESK_SCALE_ROWS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class CetScale:
    """E_0 = e0_per_capacity_period * total capacity * T; quotas = quota_fraction * E_0."""

    pi_b: float
    pi_s: float
    e0_per_capacity_period: float
    quota_fraction: float = Config.QUOTA_FRACTION

    def cet_params(self, capacity: float, horizon: int) -> CETParams:
        e0 = self.e0_per_capacity_period * capacity * horizon
        return CETParams(self.pi_b, self.pi_s, e0, self.quota_fraction * e0, self.quota_fraction * e0)


@dataclass(frozen=True)
class BaseDataset:
    units: Tuple[UnitParams, ...]
    demand_profile: Tuple[float, ...]
    reserve_fraction: float
    cet_scale: CetScale


def load_base_dataset(path=None) -> BaseDataset:
    path = Path(path or Config.BASE_DATASET)
    with open(path, encoding='utf-8') as f:
        data = json.load(f)

    records = data.get('units', [])
    if len(records) != 8:
        raise InstanceValidationError('units', f"base dataset must list 8 unit types, found {len(records)}")
    units = []
    for index, record in enumerate(records):
        missing = [name for name in UNIT_FIELDS if name not in record]
        if missing:
            raise InstanceValidationError(missing[0], "missing from base dataset", index)
        units.append(UnitParams(**{name: record[name] for name in UNIT_FIELDS},
                                name=record.get('name', f"U{index + 1}")))

    if 'demand_profile' in data:
        profile = tuple(float(v) for v in data['demand_profile'])
    else:
        try:
            loads, capacity = data['reference_loads_mw'], float(data['reference_capacity_mw'])
        except KeyError as e:
            raise InstanceValidationError(e.args[0], "missing from base dataset") from e
        profile = tuple(float(v) / capacity for v in loads)

    try:
        cet = data['cet']
        scale = CetScale(float(cet['pi_b']), float(cet['pi_s']), float(cet['e0_per_capacity_period']),
                         float(cet.get('quota_fraction', Config.QUOTA_FRACTION)))
    except KeyError as e:
        raise InstanceValidationError(f"cet.{e.args[0]}", "missing from base dataset") from e
    reserve = float(data.get('reserve_fraction', Config.RESERVE_FRACTION))
    return BaseDataset(tuple(units), profile, reserve, scale)


@dataclass(frozen=True)
class GeneratorSpec:
    counts: Tuple[int, ...]
    base_dataset: Path = Config.BASE_DATASET
    demand_profile: Optional[Tuple[float, ...]] = None
    reserve_fraction: Optional[float] = None
    cet_scale: Optional[CetScale] = None
    horizon: Optional[int] = None
    seed: Optional[int] = None
    perturbation: float = 0.05
    l_seg: int = Config.L_SEG

    def __post_init__(self):
        if len(self.counts) != 8:
            raise InstanceValidationError('counts', "need one replication count per base unit type")
        if any(c < 0 for c in self.counts):
            raise InstanceValidationError('counts', "must be nonnegative")
        if self.demand_profile is not None and any(not 0.0 < v < 1.0 for v in self.demand_profile):
            raise InstanceValidationError('demand_profile', "fractions must lie in (0, 1)")
        if self.reserve_fraction is not None and self.reserve_fraction < 0:
            raise InstanceValidationError('reserve_fraction', "must be nonnegative")

    @classmethod
    def from_table_row(cls, number: int, **overrides) -> 'GeneratorSpec':
        if number not in BENCHMARK_FLEETS:
            raise InstanceValidationError('table_row', f"no benchmark row {number} (1-{len(BENCHMARK_FLEETS)})")
        return cls(counts=BENCHMARK_FLEETS[number], **overrides)

    @property
    def n_units(self) -> int:
        return sum(self.counts)


def _perturbed(unit: UnitParams, rng: np.random.Generator, spread: float) -> UnitParams:
    factor = 1.0 + rng.uniform(-spread, spread)
    return replace(unit, alpha=unit.alpha * factor, beta=unit.beta * factor, gamma=unit.gamma * factor,
                   a_e=unit.a_e * factor, b_e=unit.b_e * factor, c_e=unit.c_e * factor)


def build_fleet(base: Sequence[UnitParams], counts: Sequence[int], seed: Optional[int] = None,
                spread: float = 0.05) -> List[UnitParams]:
    """Replicate base types; exact copies unless a seed asks for cost perturbation."""
    rng = np.random.default_rng(seed) if seed is not None else None
    fleet = []
    for unit, count in zip(base, counts):
        for k in range(count):
            copy = replace(unit, name=f"{unit.name}_{k + 1}")
            fleet.append(_perturbed(copy, rng, spread) if rng is not None else copy)
    return fleet


def generate_instance(spec: GeneratorSpec) -> Instance:
    """Deterministic instance for a spec."""
    base = load_base_dataset(spec.base_dataset)
    fleet = build_fleet(base.units, spec.counts, spec.seed, spec.perturbation)
    if not fleet:
        raise InstanceValidationError('counts', "fleet is empty")

    profile = spec.demand_profile or base.demand_profile
    horizon = spec.horizon or len(profile)
    if horizon > len(profile):
        raise InstanceValidationError('horizon', f"profile has only {len(profile)} periods")
    profile = profile[:horizon]

    capacity = sum(unit.p_max for unit in fleet)
    reserve_fraction = base.reserve_fraction if spec.reserve_fraction is None else spec.reserve_fraction
    demand = tuple(frac * capacity for frac in profile)
    system = SystemParams(horizon, demand, tuple(reserve_fraction * d for d in demand))
    cet = (spec.cet_scale or base.cet_scale).cet_params(capacity, horizon)

    logger.info(f"Generated instance with {len(fleet)} units over {horizon} periods "
                f"(capacity {capacity:.0f} MW, E0 {cet.e0:.0f} t)")
    return derive_instance(fleet, system, cet, spec.l_seg)


# Small types with short minimum up/down times
TINY_TYPES = (6, 7, 8, 3)


def tiny_instance(n_units: int, horizon: int, seed: int = 0, base_dataset=None,
                  l_seg: int = Config.L_SEG) -> Instance:
    """Small instance for oracle checks: a window of the load profile on a few small units."""
    base = load_base_dataset(base_dataset)
    rng = np.random.default_rng(seed)
    counts = [0] * 8
    for k in range(n_units):
        counts[TINY_TYPES[k % len(TINY_TYPES)] - 1] += 1
    fleet = build_fleet(base.units, counts, seed=seed)

    start = int(rng.integers(0, len(base.demand_profile) - horizon + 1))
    profile = base.demand_profile[start:start + horizon]
    capacity = sum(unit.p_max for unit in fleet)
    demand = tuple(frac * capacity for frac in profile)
    system = SystemParams(horizon, demand, tuple(base.reserve_fraction * d for d in demand))

    # Cap at 80% of an emission upper bound; with 25% quotas every schedule stays admissible
    load = np.asarray(demand)
    ceiling = (horizon * sum(u.a_e for u in fleet) + max(u.b_e for u in fleet) * load.sum()
               + max(u.c_e for u in fleet) * np.sum(load ** 2))
    e0 = 0.8 * float(ceiling)
    scale = base.cet_scale
    cet = CETParams(scale.pi_b, scale.pi_s, e0, 0.25 * e0, 0.25 * e0)
    return derive_instance(fleet, system, cet, l_seg)


def tiny_suite(count: int, seed: int = 0, base_dataset=None) -> List[Tuple[str, Instance]]:
    """Named tiny instances cycling N in 1..3 and T in 3..6."""
    suite = []
    for k in range(count):
        n_units, horizon = 1 + k % 3, 3 + (k // 3) % 4
        name = f"tiny-N{n_units}-T{horizon}-s{seed + k}"
        suite.append((name, tiny_instance(n_units, horizon, seed + k, base_dataset)))
    return suite
