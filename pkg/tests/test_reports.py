import json
import math

import numpy as np
import pandas as pd
import pytest
from openpyxl import load_workbook

import src.bench_manager as bench_manager
from src.base_backend import SolveResult
from src.bench_manager import BenchManager, BenchResult, TightnessReport, relax, run_direct, tightness_report
from src.config import Config
from src.exceptions import BackendError, UnsupportedProblemError
from src.generator import DESK_SCALE_ROWS, GeneratorSpec, generate_instance
from src.oracle import enumerate_optimal
from src.report_exporter import ReportExporter
from src.report_processor import REFERENCE_RESULTS, ReportProcessor, first_crossing, performance_profile


def bench_result(name, label, best, z_cr_orig=100.0, stamps=None):
    stamps = stamps if stamps is not None else [(1.0, 1, best)]
    result = BenchResult(name, 'cp', label, 2, z_cr_orig, best, 'optimal-by-r', 3, 2.0, stamps)
    result.crossings = {f: first_crossing(stamps, f * z_cr_orig) for f in Config.TARGET_FACTORS}
    return result


class TestCrossings:

    def test_first_crossing_is_earliest_stamp_at_target(self):
        stamps = [(0.5, 1, 120.0), (1.5, 3, 104.0), (2.5, 5, 100.5)]
        crossing = first_crossing(stamps, 105.0)
        assert crossing.reached
        assert (crossing.time, crossing.iteration, crossing.objective) == (1.5, 3, 104.0)
        assert crossing.display() == '1.5s/3'

    def test_missed_target_is_starred(self):
        crossing = first_crossing([(0.5, 1, 120.0), (1.5, 3, 110.0)], 101.0)
        assert crossing.mark == '*'
        assert crossing.objective == 110.0
        assert math.isnan(crossing.time)

    def test_no_incumbent_is_dashed(self):
        crossing = first_crossing([], 101.0)
        assert crossing.mark == '-'
        assert crossing.display() == '-'


class TestPerformanceProfile:

    def test_symmetric_example(self):
        profile = performance_profile(pd.DataFrame([[1.0, 2.0], [2.0, 1.0]], columns=['a', 'b']))
        for method in ('a', 'b'):
            assert profile.rho(method, 1.0) == 0.5
            assert profile.rho(method, 1.999) == 0.5
            assert profile.rho(method, 2.0) == 1.0
        assert profile.tau_max == 2.0

    def test_dominant_method(self):
        profile = performance_profile(pd.DataFrame({'fast': [1.0, 1.0], 'slow': [2.0, 3.0]}))
        assert profile.rho('fast', 1.0) == 1.0
        assert profile.rho('slow', 1.0) == 0.0
        assert profile.rho('slow', 2.5) == 0.5
        assert profile.breakpoints['fast'][-1] == (3.0, 1.0)
        frame = profile.frame()
        assert list(frame.columns) == ['method', 'tau', 'rho']
        assert set(frame['method']) == {'fast', 'slow'}

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            performance_profile(pd.DataFrame({'only': [1.0, 2.0]}))
        with pytest.raises(ValueError):
            performance_profile(pd.DataFrame({'a': [], 'b': []}, dtype=float))
        with pytest.raises(ValueError):
            performance_profile(pd.DataFrame({'a': [1.0, np.nan], 'b': [1.0, 2.0]}))
        with pytest.raises(ValueError):
            performance_profile(pd.DataFrame({'a': [0.0, 1.0], 'b': [1.0, 2.0]}))

    def test_rho_is_monotone(self, rng):
        matrix = pd.DataFrame(rng.uniform(1.0, 10.0, (25, 3)), columns=['x', 'y', 'z'])
        profile = performance_profile(matrix)
        taus = np.linspace(1.0, profile.tau_max, 200)
        for method in profile.methods:
            values = [profile.rho(method, tau) for tau in taus]
            assert all(b >= a for a, b in zip(values, values[1:]))
            assert values[-1] == 1.0
        # at tau = 1 the winners of every problem add up to all problems
        assert sum(profile.rho(m, 1.0) for m in profile.methods) >= 1.0


class TestReportProcessor:

    def test_tightness_frame(self):
        report = TightnessReport('row1', values={'origin': 100.0, 'cp_la': 98.0, 's_pw': 97.0},
                                 cuts={'origin': 0, 'cp_la': 2, 's_pw': 5},
                                 errors={'pc_pw': 'backend failed'})
        assert report.differences() == {'origin': 0.0, 'cp_la': 2.0, 's_pw': 3.0}
        frame = ReportProcessor().tightness_frame([report])
        row = frame.iloc[0]
        assert row['Z_ORIGIN'] == 100.0
        assert row['diff_CP_LA'] == 2.0
        assert row['cuts_S_PW'] == 5
        assert math.isnan(row['Z_PC_PW'])
        assert row['errors'] == 'pc_pw: backend failed'
        assert TightnessReport('x', values={'s_pw': 1.0}).differences() == {}

    def test_bench_frame_and_matrix(self):
        processor = ReportProcessor()
        results = [
            bench_result('p1', 'mu-schedule', 103.0),
            bench_result('p1', 'mu-fixed-1', 100.5),
            bench_result('p2', 'mu-schedule', 200.0, z_cr_orig=150.0),
            bench_result('p2', 'mu-fixed-1', 210.0, z_cr_orig=150.0, stamps=[]),
            bench_result('p3', 'mu-schedule', 50.0),
        ]
        frame = processor.bench_frame(results)
        first = frame.iloc[0]
        assert first['5pct_mark'] == '' and first['1pct_mark'] == '*'
        assert frame.iloc[1]['1pct_mark'] == ''
        assert frame.iloc[3]['5pct_mark'] == '-'

        matrix = processor.objective_matrix(frame)
        assert list(matrix.index) == ['p1', 'p2']
        assert matrix.loc['p1', 'mu-fixed-1'] == 100.5

    def test_reference_frame(self):
        frame = ReportProcessor().reference_frame()
        assert len(frame) == 22
        row13 = frame[frame['row'] == 13].iloc[0]
        assert row13['cuts_CP_LA'] == 2
        assert row13['z_cr_orig'] == REFERENCE_RESULTS['z_cr_orig'][13]
        assert set(frame['1pct_mark']) == {'', '*'}


class TestReportExporter:

    def test_json_replaces_non_finite_values(self, tmp_path):
        exporter = ReportExporter(tmp_path)
        path = exporter.export_report({'best': math.inf, 'n': np.int64(3)}, 'json', 'solve',
                                      tables={'trace': pd.DataFrame({'h': [np.nan, 0.5]})})
        data = json.loads(path.read_text())
        assert data['best'] is None and data['n'] == 3
        assert data['trace'] == [{'h': None}, {'h': 0.5}]
        assert path.parent == tmp_path and path.name.startswith('solve_')

    def test_csv_writes_one_file_per_table(self, tmp_path):
        exporter = ReportExporter(tmp_path)
        tables = {'bench': pd.DataFrame({'a': [1]}), 'profile': pd.DataFrame({'b': [2]})}
        path = exporter.export_report({}, 'csv', tables=tables, path=tmp_path / 'out' / 'bench.csv')
        assert path == tmp_path / 'out' / 'bench.csv'
        assert pd.read_csv(path)['a'].tolist() == [1]
        assert pd.read_csv(tmp_path / 'out' / 'bench_profile.csv')['b'].tolist() == [2]

    def test_csv_without_tables_uses_scalars(self, tmp_path):
        path = ReportExporter(tmp_path).export_report({'value': 3.5, 'trace': [1, 2]}, 'csv',
                                                      path=tmp_path / 'relax.csv')
        assert list(pd.read_csv(path).columns) == ['value']

    def test_excel_layout(self, tmp_path):
        frame = ReportProcessor().bench_frame([bench_result('p1', 'cp', 103.0)])
        path = ReportExporter(tmp_path).export_report({'instances': 1, 'mode': 'cp'}, 'xlsx', 'bench',
                                                      tables={'bench': frame}, path=tmp_path / 'bench.xlsx')
        wb = load_workbook(path)
        assert wb.sheetnames == ['bench', 'Summary']
        ws = wb['bench']
        assert ws['A1'].value == 'bench'
        assert ws['A4'].value == 'instance'
        assert ws['A5'].value == 'p1'
        assert ws.freeze_panes == 'A5'
        mark_col = list(frame.columns).index('1pct_mark') + 1
        assert ws.cell(row=5, column=mark_col).fill.start_color.rgb.endswith('FFEB9C')
        summary = wb['Summary']
        assert summary['A3'].value == 'instances' and summary['B3'].value == 1

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            ReportExporter(tmp_path).export_report({}, 'parquet')


class TestBenchManager:

    async def test_results_keep_input_order(self, monkeypatch, single_unit):
        def fake_bench(name, inst, backend, mode, cp_params, la_params, label):
            if name == 'bad':
                raise UnsupportedProblemError("no MIQCP solver")
            return bench_result(name, label or mode, 10.0)

        monkeypatch.setattr(bench_manager, 'bench_instance', fake_bench)
        manager = BenchManager(lambda: None, workers=2)
        instances = [('a', single_unit), ('bad', single_unit), ('c', single_unit)]
        results = await manager.bench_all(instances, label='cp')
        assert [r.instance for r in results] == ['a', 'bad', 'c']
        assert [r.failed for r in results] == [False, True, False]
        assert 'MIQCP' in results[1].error

    async def test_backend_errors_are_retried(self, monkeypatch, single_unit):
        calls = {'flaky': 0, 'unsupported': 0}

        def fake_bench(name, inst, backend, mode, cp_params, la_params, label):
            calls[name] += 1
            if name == 'unsupported':
                raise UnsupportedProblemError("cannot solve MIQCP")
            if calls[name] == 1:
                raise BackendError("solver crashed")
            return bench_result(name, 'cp', 10.0)

        monkeypatch.setattr(bench_manager, 'bench_instance', fake_bench)
        monkeypatch.setattr(Config, 'RETRY_DELAY', 0.0)
        results = await BenchManager(lambda: None).bench_all([('flaky', single_unit), ('unsupported', single_unit)])
        assert calls == {'flaky': 2, 'unsupported': 1}
        assert not results[0].failed and results[1].failed

    async def test_mu_ablation_labels(self, monkeypatch, single_unit):
        seen = []

        def fake_bench(name, inst, backend, mode, cp_params, la_params, label):
            seen.append((label, cp_params.mu_fixed))
            return bench_result(name, label, 10.0)

        monkeypatch.setattr(bench_manager, 'bench_instance', fake_bench)
        results = await BenchManager(lambda: None, workers=1).mu_ablation([('a', single_unit)])
        assert [r.label for r in results] == ['mu-schedule', 'mu-fixed-1']
        assert seen == [('mu-schedule', None), ('mu-fixed-1', 1.0)]

    def test_workers_must_be_positive(self):
        with pytest.raises(ValueError):
            BenchManager(lambda: None, workers=0)


def check_ordering(report):
    values = report.values
    tol = 1e-5 * abs(values['origin'])
    assert values['cp_la'] <= values['origin'] + tol
    assert values['s_pw'] <= values['pc_pw'] + tol
    assert values['pc_pw'] <= values['origin'] + tol


def test_tightness_on_toy(toy, backend):
    report = tightness_report(toy, backend, 'toy')
    assert report.errors == {}
    assert report.cuts['origin'] == 0
    assert report.cuts['s_pw'] == report.cuts['pc_pw'] == Config.PIECEWISE_K
    assert report.cuts['cp_la'] >= 0
    check_ordering(report)
    with pytest.raises(ValueError):
        relax(toy, 'exact', backend)


@pytest.mark.slow
@pytest.mark.parametrize('row', DESK_SCALE_ROWS)
def test_tightness_on_benchmark_rows(row, backend):
    inst = generate_instance(GeneratorSpec.from_table_row(row))
    report = tightness_report(inst, backend, f"row{row}")
    assert report.errors == {}
    check_ordering(report)
    assert report.values['cp_la'] >= report.values['s_pw'] - 5e-3 * abs(report.values['s_pw'])
    assert report.cuts['cp_la'] <= 3


class StubBackend:
    """Answers every solve with a fixed point."""

    def __init__(self, point):
        self.point = point

    def solve(self, problem, opts=None):
        values = self.point.project(problem.layout).values
        return SolveResult('optimal', problem.objective_value(values), dict(zip(problem.names, values)), 0.1)

    def require_solution(self, problem, result):
        return result.values(problem)


def test_direct_run_records_only_the_final_stamp(single_unit):
    optimum = enumerate_optimal(single_unit)
    objective, status, stamps = run_direct(single_unit, StubBackend(optimum.argmin))
    assert status == 'optimal'
    assert objective == pytest.approx(optimum.optimum, rel=1e-9)
    assert len(stamps) == 1
    elapsed, iteration, value = stamps[0]
    assert iteration == 1 and value == objective and elapsed >= 0.0
    # a single stamp crosses every target at the finish time or not at all
    crossing = first_crossing(stamps, 1.01 * objective)
    assert crossing.reached and crossing.time == elapsed
