import json

import numpy as np
import pandas as pd
import pytest

from src.exceptions import InstanceValidationError
from src.model import (
    CETParams,
    DecisionVector,
    SystemParams,
    VariableLayout,
    derive_instance,
    emission_total,
    eval_g,
    eval_grad_g,
    eval_objective,
    eval_true_cost,
    instance_to_dict,
    lift_eta,
    load_instance,
    save_instance,
    startup_floor,
    validate_solution,
)
from tests.conftest import make_instance, make_unit


def dispatch_point(inst, u, s):
    """Point with the given commitment, demand split pro rata over committed headroom."""
    layout = VariableLayout.for_instance(inst)
    u = np.asarray(u, dtype=float)
    p_min, span = inst.unit_array('p_min'), inst.span
    committed_min = (u * p_min[:, None]).sum(axis=0)
    headroom = (u * span[:, None]).sum(axis=0)
    frac = (inst.demand - committed_min) / headroom
    p = u * frac[None, :]
    z = np.max([(2 * inst.gamma_t * (l / inst.l_seg) + inst.beta_t)[:, None] * p
                + (inst.alpha_t - inst.gamma_t * (l / inst.l_seg) ** 2)[:, None] * u
                for l in range(inst.l_seg + 1)], axis=0)
    chi = DecisionVector.from_blocks(layout, u=u, s=s, p=p, z=z)
    chi = chi.replace(S=startup_floor(inst, chi))
    return lift_eta(inst, chi)


def test_derived_constants_match_definitions():
    unit = make_unit()
    inst = make_instance([unit])
    span = unit.p_max - unit.p_min
    assert inst.alpha_t[0] == pytest.approx(unit.alpha + unit.beta * unit.p_min + unit.gamma * unit.p_min ** 2)
    assert inst.beta_t[0] == pytest.approx(span * (unit.beta + 2 * unit.gamma * unit.p_min))
    assert inst.gamma_t[0] == pytest.approx(unit.gamma * span ** 2)
    assert inst.a_t[0] == pytest.approx(unit.a_e + unit.b_e * unit.p_min + unit.c_e * unit.p_min ** 2)
    assert inst.c_t[0] == pytest.approx(unit.c_e * span ** 2)
    assert inst.p_start_t[0] == pytest.approx((unit.p_start - unit.p_min) / span)


def test_initial_status_periods():
    on = make_unit(u0=1, t0=2, t_on=4)
    off = make_unit(u0=0, t0=-1, t_off=3)
    long_on = make_unit(u0=1, t0=1, t_on=10)
    inst = make_instance([on, off, long_on], demand=(60.0, 60.0, 60.0))
    assert inst.init_up == (2, 0, 3)
    assert inst.init_down == (0, 2, 0)
    assert inst.fixed_periods(0) == 2
    assert inst.fixed_periods(2) == 3


def test_cold_start_indicator(toy):
    assert toy.f_init[0].tolist() == [1.0, 1.0, 1.0, 0.0]


@pytest.mark.parametrize('overrides, field', [
    ({'p_max': 20.0}, 'p_max'),
    ({'gamma': -1.0}, 'gamma'),
    ({'u0': 1, 't0': -2}, 't0'),
    ({'t_on': 0}, 't_on'),
    ({'c_cold': 10.0}, 'c_cold'),
])
def test_unit_validation_names_field(overrides, field):
    with pytest.raises(InstanceValidationError) as excinfo:
        make_instance([make_unit(), make_unit(**overrides)])
    assert excinfo.value.field == field
    assert excinfo.value.unit == 1


def test_system_and_cet_validation():
    with pytest.raises(InstanceValidationError):
        derive_instance([make_unit()], SystemParams(3, (1.0, 2.0), (0.0, 0.0, 0.0)),
                        CETParams(30, 25, 100, 10, 10))
    with pytest.raises(InstanceValidationError) as excinfo:
        derive_instance([make_unit()], SystemParams(1, (50.0,), (1.0,)), CETParams(20, 25, 100, 10, 10))
    assert excinfo.value.field == 'pi_b'
    with pytest.raises(InstanceValidationError):
        derive_instance([], SystemParams(1, (50.0,), (1.0,)), CETParams(30, 25, 100, 10, 10))


def test_load_save_and_csv_units(toy, tmp_path):
    assert (toy.n_units, toy.horizon) == (2, 4)
    path = save_instance(toy, tmp_path / 'copy.json')
    again = load_instance(path)
    np.testing.assert_allclose(again.alpha_t, toy.alpha_t)
    assert again.cet == toy.cet

    data = instance_to_dict(toy)
    pd.DataFrame(data['units']).to_csv(tmp_path / 'units.csv', index=False)
    data['units'] = 'units.csv'
    with open(tmp_path / 'with_csv.json', 'w', encoding='utf-8') as f:
        json.dump(data, f)
    from_csv = load_instance(tmp_path / 'with_csv.json', l_seg=2)
    np.testing.assert_allclose(from_csv.c_t, toy.c_t)
    assert from_csv.l_seg == 2
    assert from_csv.units[1].t_on == 3


def test_missing_cet_field(tmp_path, toy):
    data = instance_to_dict(toy)
    del data['cet']['e0']
    with open(tmp_path / 'bad.json', 'w', encoding='utf-8') as f:
        json.dump(data, f)
    with pytest.raises(InstanceValidationError, match='cet.e0'):
        load_instance(tmp_path / 'bad.json')


def test_layout_order_and_names():
    layout = VariableLayout(2, 3)
    names = layout.names()
    assert names[0] == 'u_1_1'
    assert names[layout.idx('s')[1, 2]] == 's_2_3'
    assert names[layout.idx('u_b')] == 'ub'
    assert names[-1] == 'eta'
    assert layout.size == 5 * 6 + 5

    wide = layout.with_extras('h', 'r')
    assert wide.extras == ('r', 'h')
    assert wide.idx('eta') == layout.idx('eta')
    np.testing.assert_array_equal(wide.idx('p'), layout.idx('p'))
    assert wide.names()[wide.idx('r')] == 'r'
    assert len(layout.binary_indices()) == 2 * 6 + 2


def test_decision_vector_operations():
    layout = VariableLayout(1, 2)
    a = DecisionVector.from_blocks(layout, u=1.0, p=[[0.2, 0.4]], eta=3.0)
    b = DecisionVector.zeros(layout)
    mid = a.blend(b, 0.25)
    assert mid.eta == pytest.approx(0.75)
    np.testing.assert_allclose(mid.p, [[0.05, 0.1]])
    with pytest.raises(ValueError):
        a.values[0] = 2.0

    wide = a.project(layout.with_extras('r'))
    assert wide.block('r') == 0.0
    assert wide.project(layout).values.tolist() == a.values.tolist()

    frac = a.replace(u=[[0.7, 0.2]], u_b=0.51)
    assert not frac.binary_feasible()
    rounded = frac.rounded_binaries()
    assert rounded.u.tolist() == [[1.0, 0.0]]
    assert rounded.u_b == 1.0
    assert rounded.binary_feasible()


def test_gradient_matches_central_differences(toy, rng):
    layout = VariableLayout.for_instance(toy)
    h = 1e-5
    for _ in range(100):
        chi = DecisionVector(layout, rng.uniform(0.0, 1.0, layout.size) * 2.0)
        grad = eval_grad_g(toy, chi)
        fd = np.zeros(layout.size)
        for j in range(layout.size):
            step = np.zeros(layout.size)
            step[j] = h
            fd[j] = (eval_g(toy, DecisionVector(layout, chi.values + step))
                     - eval_g(toy, DecisionVector(layout, chi.values - step))) / (2 * h)
        assert np.linalg.norm(fd - grad) / max(1.0, np.linalg.norm(grad)) < 1e-6


def test_lift_eta_keeps_cost_and_tracks_emissions(toy):
    chi = dispatch_point(toy, [[1, 1, 1, 1], [0, 1, 1, 1]], [[1, 0, 0, 0], [0, 1, 0, 0]])
    lowered = chi.replace(eta=0.0, u_b=1.0, de_b=toy.cet.de_b_max)
    lifted = lift_eta(toy, lowered)
    assert eval_objective(toy, lifted) == pytest.approx(eval_objective(toy, lowered))
    assert eval_g(toy, lifted) <= eval_g(toy, lowered)
    assert lifted.eta > 0.0
    excess = emission_total(toy, lifted) - (toy.cet.e0 + lifted.de_b - lifted.de_s)
    assert eval_g(toy, lifted) == pytest.approx(excess)


def test_true_cost_matches_model_cost_at_breakpoints(single_unit):
    layout = VariableLayout.for_instance(single_unit)
    chi = DecisionVector.from_blocks(layout, u=1.0, s=[[1, 0, 0]], p=1.0,
                                     z=single_unit.alpha_t[0] + single_unit.beta_t[0] + single_unit.gamma_t[0])
    chi = chi.replace(S=startup_floor(single_unit, chi))
    assert eval_true_cost(single_unit, chi) == pytest.approx(eval_objective(single_unit, chi))

    with pytest.raises(ValueError):
        eval_true_cost(single_unit, chi.replace(u=0.5))


def test_validate_feasible_dispatch(single_unit):
    chi = dispatch_point(single_unit, [[1, 1, 1]], [[1, 0, 0]])
    report = validate_solution(single_unit, chi)
    assert report.feasible, report.summary()
    assert report.summary() == 'feasible'


def test_validate_reports_violated_families(single_unit):
    chi = dispatch_point(single_unit, [[1, 1, 1]], [[1, 0, 0]])
    broken = chi.replace(p=chi.p + 0.2)
    report = validate_solution(single_unit, broken)
    assert 'power-balance' in report
    assert not report.feasible

    no_start = chi.replace(s=0.0)
    assert 'state' in validate_solution(single_unit, no_start)

    both = chi.replace(u_b=1.0, u_s=1.0)
    assert 'trading-exclusive' in validate_solution(single_unit, both)


def test_validate_emission_budget():
    inst = make_instance(e0=100.0, quota=5.0)
    chi = dispatch_point(inst, [[1, 1, 1]], [[1, 0, 0]])
    report = validate_solution(inst, chi.replace(de_b=0.0, u_b=0.0))
    assert 'emission-budget' in report
