import math
import sys

import numpy as np
import pytest

from src.backends import ProcessBackend, create_backend
from src.backends.mps_io import parse_solution_file, read_problem_file, row_labels, write_problem_file
from src.backends.process_backend import resolve_command_template
from src.base_backend import BackendCapabilities, SolveOptions, SolveResult
from src.config import Config
from src.exceptions import BackendError, SolutionFileError, UnsupportedProblemError
from src.formulation import (
    LinearConstraint,
    ModelProblem,
    QuadraticConstraint,
    build_linear_base,
    build_original_qcp,
    fix_binaries,
)
from src.model import DecisionVector, VariableLayout
from tests.conftest import requires

FAKE_SOLVER = '''
import sys
with open(sys.argv[2], "w") as f:
    f.write("solution status: optimal solution found\\n")
    f.write("objective value:                    3\\n")
    f.write("x                                   1 \\t(obj:1)\\n")
    f.write("y                                   2 \\t(obj:1)\\n")
'''


def small_problem(integer=False, quadratic=False):
    """min x + y  s.t.  x + y >= 3, x - y <= 1, 0 <= x <= 10, y free (optionally x^2 + y^2 <= 8)."""
    rows = (LinearConstraint({0: 1.0, 1: 1.0}, '>=', 3.0, 'cover'),
            LinearConstraint({0: 1.0, 1: -1.0}, '<=', 1.0, 'gap'))
    blocks = (QuadraticConstraint({0: 1.0, 1: 1.0}, {}, 8.0, 'disk'),) if quadratic else ()
    return ModelProblem(names=('x', 'y'), lb=[0.0, -math.inf], ub=[10.0, math.inf],
                        integer=[integer, integer], rows=rows, quadratic=blocks,
                        objective={0: 1.0, 1: 1.0}, name='small')


def assert_same_problem(a, b):
    assert a.names == b.names
    np.testing.assert_array_equal(a.lb, b.lb)
    np.testing.assert_array_equal(a.ub, b.ub)
    np.testing.assert_array_equal(a.integer, b.integer)
    np.testing.assert_array_equal(a.objective_vector(), b.objective_vector())
    assert a.sense == b.sense
    assert len(a.rows) == len(b.rows)
    for ra, rb in zip(a.rows, b.rows):
        assert (ra.sense, ra.rhs) == (rb.sense, rb.rhs)
        assert ra.coeffs == rb.coeffs
    for qa, qb in zip(a.quadratic, b.quadratic):
        assert qa.diag == qb.diag
        assert qa.linear == qb.linear


def test_mps_write_read_reproduces_model(single_unit, tmp_path):
    problem = build_original_qcp(single_unit)
    path = write_problem_file(problem, tmp_path / 'origin.mps')
    text = path.read_text()
    assert 'QCMATRIX' in text and "'INTORG'" in text and 'OBJSENSE' in text
    assert ' -0 ' not in text and not any(line.endswith(' -0') for line in text.splitlines())
    assert_same_problem(problem, read_problem_file(path))


def test_mps_fixed_bounds_and_max_sense(single_unit, tmp_path):
    base = build_linear_base(single_unit)
    chi = DecisionVector.from_blocks(base.layout, u=1.0)
    problem = fix_binaries(base, chi).with_objective({0: 1.0}, 'max')
    path = write_problem_file(problem, tmp_path / 'fixed.mps')
    assert ' FX BND u_1_1 1' in path.read_text()
    again = read_problem_file(path)
    assert again.sense == 'max'
    assert_same_problem(problem, again)


def test_row_labels_are_unique(toy):
    labels = row_labels(build_original_qcp(toy))
    assert len(labels) == len(set(labels))
    assert all(' ' not in label and '=' not in label for label in labels)


def test_reader_rejects_off_diagonal_terms(tmp_path):
    path = tmp_path / 'offdiag.mps'
    path.write_text("NAME q\nROWS\n N  obj\n L  c\nCOLUMNS\n    x c 1\n    y c 1\nRHS\n    RHS c 1\n"
                    "BOUNDS\nQCMATRIX    c\n    x y 1\nENDATA\n")
    with pytest.raises(ValueError, match='off-diagonal'):
        read_problem_file(path)


def test_parse_solution_file(tmp_path):
    path = tmp_path / 'ok.sol'
    path.write_text("solution status: optimal solution found\n"
                    "objective value:                    1234.5\n"
                    "u_1_1                                   1 \t(obj:0)\n"
                    "p_1_1                                 0.5 \t(obj:0)\n")
    result = parse_solution_file(path, ['u_1_1', 'p_1_1', 'z_1_1'])
    assert result.status == 'optimal'
    assert result.objective == 1234.5
    assert result.primal == {'u_1_1': 1.0, 'p_1_1': 0.5, 'z_1_1': 0.0}


def test_parse_infeasible_and_gap_limit(tmp_path):
    path = tmp_path / 'inf.sol'
    path.write_text("solution status: infeasible\nno solution available\n")
    result = parse_solution_file(path)
    assert result.status == 'infeasible'
    assert not result.has_solution

    path = tmp_path / 'gap.sol'
    path.write_text("solution status: gap limit reached\nobjective value: 10\nx 1\n")
    assert parse_solution_file(path).status == 'feasible'

    path = tmp_path / 'dual.sol'
    path.write_text("solution status: infeasible or unbounded\nno solution available\n")
    assert parse_solution_file(path).status == 'infeasible'


def test_parse_bad_line_reports_line_number(tmp_path):
    path = tmp_path / 'bad.sol'
    path.write_text("solution status: optimal solution found\nobjective value: 1\nx 1 2 3 4\n")
    with pytest.raises(SolutionFileError) as excinfo:
        parse_solution_file(path)
    assert excinfo.value.line_no == 3


def test_command_templates():
    template = 'mysolver --in {input} --out {output}'
    assert resolve_command_template(template) == template
    bare = resolve_command_template('/opt/scip/bin/scip')
    assert bare.startswith('/opt/scip/bin/scip')
    assert '{input}' in bare and '{output}' in bare and '{timelimit}' in bare


def test_capabilities_and_options():
    with pytest.raises(ValueError):
        BackendCapabilities(frozenset({'MIQCP', 'LP'}))
    with pytest.raises(ValueError):
        BackendCapabilities(frozenset({'MILP'}))
    assert 'LP' in BackendCapabilities(frozenset({'LP', 'MILP'}))
    assert SolveOptions().gap_for('LP') == Config.GAP_PRESETS['LP']
    assert SolveOptions(rel_gap=0.02).gap_for('MILP') == 0.02
    with pytest.raises(ValueError):
        SolveOptions(time_limit=0)
    with pytest.raises(ValueError):
        SolveResult('solved')


def test_unsupported_problem_raised_before_launch(tmp_path):
    backend = ProcessBackend('missing-solver', workdir=tmp_path, supports=('LP',))
    with pytest.raises(UnsupportedProblemError):
        backend.solve(small_problem(integer=True))
    assert list(tmp_path.iterdir()) == []
    with pytest.raises(UnsupportedProblemError):
        backend.solve(small_problem(quadratic=True))


def test_missing_solver_is_an_error_result(tmp_path):
    backend = ProcessBackend('uccet-no-such-solver-binary', workdir=tmp_path)
    result = backend.solve(small_problem())
    assert result.status == 'error'
    assert 'not found' in result.message
    kept = list(tmp_path.glob('uccet_*/*.mps'))
    assert len(kept) == 1
    with pytest.raises(BackendError):
        backend.require_solution(small_problem(), result)


def test_process_backend_round_trip_with_fake_solver(tmp_path):
    script = tmp_path / 'fake_solver.py'
    script.write_text(FAKE_SOLVER)
    backend = ProcessBackend(f'{sys.executable} {script} {{input}} {{output}}', workdir=tmp_path,
                             keep_files_on_error=False)
    problem = small_problem()
    result = backend.solve(problem)
    assert result.status == 'optimal'
    assert result.primal == {'x': 1.0, 'y': 2.0}
    assert result.objective == pytest.approx(3.0)
    assert list(tmp_path.glob('uccet_*')) == []


def test_create_backend():
    assert isinstance(create_backend(solver_cmd='scip'), ProcessBackend)
    with pytest.raises(ValueError):
        create_backend('gurobi-cloud')


def test_cvxpy_small_problems(backend):
    lp = backend.solve(small_problem())
    assert lp.status == 'optimal'
    assert lp.objective == pytest.approx(3.0, abs=1e-6)

    milp = backend.solve(small_problem(integer=True))
    assert milp.status == 'optimal'
    values = milp.values(small_problem(integer=True))
    assert values[0] + values[1] == pytest.approx(3.0)
    np.testing.assert_allclose(values, np.round(values))

    qcp = backend.solve(small_problem(quadratic=True))
    assert qcp.status in ('optimal', 'feasible')
    assert qcp.objective == pytest.approx(3.0, abs=1e-5)


def test_cvxpy_reports_infeasible(backend):
    problem = small_problem().with_rows([LinearConstraint({0: 1.0, 1: 1.0}, '<=', 2.0, 'clash')])
    assert backend.solve(problem).status == 'infeasible'


def test_cvxpy_relaxed_model_is_clean(backend, toy):
    problem = build_linear_base(toy)
    result = backend.solve(problem, SolveOptions(relax_integrality=True))
    assert result.status == 'optimal'
    values = result.values(problem)
    assert problem.max_violation(values) <= 1e-5 * max(1.0, float(np.abs(toy.demand).max()))
    assert np.all(values >= problem.lb) and np.all(values <= problem.ub)


def test_cvxpy_miqcp_when_available(backend, single_unit):
    requires(backend, 'MIQCP')
    problem = build_original_qcp(single_unit)
    result = backend.solve(problem)
    assert result.status in ('optimal', 'feasible')
    assert VariableLayout.for_instance(single_unit).size == problem.n_vars
