import numpy as np
import pytest

from src.config import Config
from src.exceptions import LineSearchError, NoInteriorPointError
from src.formulation import build_cut_relaxation, build_linear_base
from src.generator import tiny_instance
from src.la import LaParams, _bisect, center_point, line_search, run_la
from src.model import DecisionVector, VariableLayout, eval_g
from tests.conftest import make_instance


def endpoints(inst, p_in=0.2, p_out=0.9):
    layout = VariableLayout.for_instance(inst)
    interior = DecisionVector.from_blocks(layout, u=1.0, p=p_in, eta=10.0)
    exterior = DecisionVector.from_blocks(layout, u=1.0, p=p_out, eta=0.0)
    return interior, exterior


def test_params_validation():
    with pytest.raises(ValueError):
        LaParams(eps_lp=-1.0)
    with pytest.raises(ValueError):
        LaParams(k_max_lp=0)
    with pytest.raises(ValueError):
        LaParams(boundary_tol=0.0)


def test_line_search_lands_on_boundary(toy):
    interior, exterior = endpoints(toy)
    point, lam = line_search(toy, interior, exterior)
    assert 0.0 < lam <= 1.0
    assert abs(eval_g(toy, point)) <= 1e-6 * max(1.0, eval_g(toy, exterior))


def test_closed_form_root_agrees_with_bisection(toy):
    interior, exterior = endpoints(toy, p_in=0.1, p_out=1.0)
    _, lam = line_search(toy, interior, exterior, boundary_tol=1e-12)
    assert _bisect(toy, interior, exterior, 1e-12) == pytest.approx(lam, abs=1e-9)


def test_line_search_when_only_eta_moves(toy):
    interior, exterior = endpoints(toy, p_in=0.5, p_out=0.5)
    point, lam = line_search(toy, interior, exterior)
    np.testing.assert_allclose(point.p, 0.5)
    assert point.eta == pytest.approx(0.25 * toy.horizon * float(toy.c_t.sum()), rel=1e-9)
    assert 0.0 < lam < 1.0


def test_line_search_rejects_bad_endpoints(toy):
    interior, exterior = endpoints(toy)
    with pytest.raises(LineSearchError) as excinfo:
        line_search(toy, exterior, interior)
    assert excinfo.value.endpoint == 'interior'
    with pytest.raises(LineSearchError) as excinfo:
        line_search(toy, interior, interior)
    assert excinfo.value.endpoint == 'exterior'


def test_center_point_is_strictly_interior(toy, backend):
    chi = center_point(toy, backend)
    assert eval_g(toy, chi) < 0
    assert build_linear_base(toy).relaxed().max_violation(chi.values) <= 1e-5 * toy.demand.max()


def test_run_la_converges(toy, backend):
    result = run_la(toy, backend)
    assert result.termination == 'converged'
    assert eval_g(toy, result.chi_lp) <= LaParams().eps_lp
    assert result.cuts == len(result.omega_r) == result.trace[-1].cuts
    values = [row.lp_value for row in result.trace]
    assert all(b >= a - 1e-6 * max(1.0, abs(a)) for a, b in zip(values, values[1:]))
    for chi_hat in result.omega_r:
        assert abs(eval_g(toy, chi_hat)) <= 1e-5 * max(1.0, toy.c_t.sum() * toy.horizon)


def test_run_la_stops_at_iteration_cap(backend):
    # quota above the headroom: the first LP sells all of it, leaving eta = 0 and g > eps_lp
    inst = make_instance(quota=200.0)
    result = run_la(inst, backend, LaParams(k_max_lp=1))
    assert result.termination == 'max-iterations'
    assert result.iterations == 1
    assert result.cuts == 0
    assert eval_g(inst, result.chi_lp) > LaParams().eps_lp


def random_pairs(inst, rng, count):
    layout = VariableLayout.for_instance(inst)
    shape = (inst.n_units, inst.horizon)
    for _ in range(count):
        p_in, p_out = rng.uniform(0, 1, shape), rng.uniform(0, 1, shape)
        q_in = float(np.sum(inst.c_t[:, None] * p_in ** 2))
        q_out = float(np.sum(inst.c_t[:, None] * p_out ** 2))
        interior = DecisionVector.from_blocks(layout, u=1.0, p=p_in, eta=q_in + rng.uniform(0.1, 10.0))
        exterior = DecisionVector.from_blocks(layout, u=1.0, p=p_out, eta=q_out * rng.uniform(0.0, 0.9))
        yield interior, exterior


def test_line_search_on_random_pairs(toy, rng):
    instances = [toy] + [tiny_instance(n, 4, seed) for n, seed in ((1, 3), (2, 5), (3, 8))]
    checked = 0
    for inst in instances:
        for n, (interior, exterior) in enumerate(random_pairs(inst, rng, 250)):
            g_out = eval_g(inst, exterior)
            point, lam = line_search(inst, interior, exterior)
            assert 0.0 < lam <= 1.0
            assert abs(eval_g(inst, point)) <= 1e-8 * max(1.0, abs(g_out))
            if n % 25 == 0:
                assert _bisect(inst, interior, exterior, 1e-12) == pytest.approx(lam, abs=1e-8)
            checked += 1
    assert checked == 1000


def test_bisection_meets_the_boundary_tolerance(toy):
    interior, exterior = endpoints(toy, p_in=0.1, p_out=1.0)
    g_out = eval_g(toy, exterior)
    lam = _bisect(toy, interior, exterior, Config.BOUNDARY_TOL * g_out)
    assert abs(eval_g(toy, interior.blend(exterior, lam))) <= Config.BOUNDARY_TOL * g_out
    assert Config.BOUNDARY_TOL <= 1e-8


def test_perspective_relaxation_is_tighter(toy, backend):
    points = list(run_la(toy, backend).omega_r)
    values = {}
    for family in ('perspective', 'tangent'):
        problem = build_cut_relaxation(toy, points, family)
        result = backend.solve(problem)
        assert result.status == 'optimal'
        values[family] = result.objective
    assert values['perspective'] >= values['tangent'] - 1e-6 * abs(values['tangent'])


def test_no_interior_point(backend):
    loose = make_instance(e0=1000.0, quota=1.0)
    base = build_linear_base(loose).relaxed()
    U, P = base.layout.idx('u'), base.layout.idx('p')
    linear = {int(U[0, t]): loose.a_t[0] for t in range(loose.horizon)}
    linear.update({int(P[0, t]): loose.b_t[0] for t in range(loose.horizon)})
    floor = backend.solve(base.with_objective(linear))
    assert floor.status == 'optimal'

    # the budget admits the cheapest linear emissions but not the quadratic excess on top
    tight = make_instance(e0=floor.objective - 0.9, quota=1.0)
    with pytest.raises(NoInteriorPointError) as excinfo:
        center_point(tight, backend)
    assert excinfo.value.g_value >= 0
