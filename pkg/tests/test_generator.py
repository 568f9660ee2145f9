import json

import numpy as np
import pytest

from src.config import Config
from src.exceptions import InstanceValidationError
from src.generator import (
    BENCHMARK_FLEETS,
    GeneratorSpec,
    generate_instance,
    load_base_dataset,
    tiny_instance,
    tiny_suite,
)


@pytest.mark.parametrize('row, n_units', [(1, 28), (5, 54), (14, 560), (22, 1080)])
def test_table_row_sizes(row, n_units):
    assert GeneratorSpec.from_table_row(row).n_units == n_units


def test_table_has_22_rows():
    assert sorted(BENCHMARK_FLEETS) == list(range(1, 23))
    with pytest.raises(InstanceValidationError):
        GeneratorSpec.from_table_row(23)


def test_spec_validation():
    with pytest.raises(InstanceValidationError):
        GeneratorSpec(counts=(1, 2, 3))
    with pytest.raises(InstanceValidationError):
        GeneratorSpec(counts=(1, 0, 0, 0, 0, 0, 0, -1))
    with pytest.raises(InstanceValidationError) as excinfo:
        generate_instance(GeneratorSpec(counts=(0,) * 8))
    assert excinfo.value.field == 'counts'


def test_row_one_instance():
    base = load_base_dataset()
    inst = generate_instance(GeneratorSpec.from_table_row(1, horizon=6))
    assert (inst.n_units, inst.horizon) == (28, 6)
    capacity = inst.unit_array('p_max').sum()
    np.testing.assert_allclose(inst.demand, np.array(base.demand_profile[:6]) * capacity)
    np.testing.assert_allclose(inst.reserve, base.reserve_fraction * inst.demand)
    assert inst.cet.e0 == pytest.approx(base.cet_scale.e0_per_capacity_period * capacity * 6)
    assert inst.cet.de_b_max == pytest.approx(base.cet_scale.quota_fraction * inst.cet.e0)
    assert inst.units[0].name == 'U1_1'


def test_generation_is_deterministic():
    a = generate_instance(GeneratorSpec.from_table_row(2, horizon=4))
    b = generate_instance(GeneratorSpec.from_table_row(2, horizon=4))
    np.testing.assert_array_equal(a.alpha_t, b.alpha_t)
    np.testing.assert_array_equal(a.demand, b.demand)

    seeded = generate_instance(GeneratorSpec.from_table_row(2, horizon=4, seed=7))
    again = generate_instance(GeneratorSpec.from_table_row(2, horizon=4, seed=7))
    np.testing.assert_array_equal(seeded.c_t, again.c_t)
    assert not np.array_equal(seeded.c_t, a.c_t)


def test_horizon_longer_than_profile():
    with pytest.raises(InstanceValidationError):
        generate_instance(GeneratorSpec.from_table_row(1, horizon=25))


def test_tiny_instances():
    inst = tiny_instance(2, 4, seed=3)
    assert (inst.n_units, inst.horizon) == (2, 4)
    assert inst.cet.de_b_max == pytest.approx(0.25 * inst.cet.e0)
    assert inst.n_units * inst.horizon + 2 <= Config.ORACLE_BIT_CAP

    suite = tiny_suite(7, seed=10)
    names = [name for name, _ in suite]
    assert names[0] == 'tiny-N1-T3-s10'
    assert names[4] == 'tiny-N2-T4-s14'
    assert [inst.n_units for _, inst in suite] == [1, 2, 3, 1, 2, 3, 1]


def test_base_dataset_errors(tmp_path):
    data = json.loads(Config.BASE_DATASET.read_text())
    data['units'] = data['units'][:7]
    path = tmp_path / 'short.json'
    path.write_text(json.dumps(data))
    with pytest.raises(InstanceValidationError, match='8 unit types'):
        load_base_dataset(path)

    data = json.loads(Config.BASE_DATASET.read_text())
    del data['cet']['pi_b']
    path.write_text(json.dumps(data))
    with pytest.raises(InstanceValidationError, match='cet.pi_b'):
        load_base_dataset(path)
