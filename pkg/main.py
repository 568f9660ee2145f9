#!/usr/bin/env python3
"""
UC-CET Center-Point Solver
==========================

Unit commitment with carbon emission trading, solved by a center-point
algorithm over a linear outer approximation of the emission budget.

Subcommands: solve, relax, tightness, generate, bench, profile, verify.
"""

import argparse
import asyncio
import io
import logging
import math
import sys
from pathlib import Path

import pandas as pd

from src.backends import BACKENDS, create_backend
from src.bench_manager import FORMULATIONS, MODES, BenchManager, relax
from src.config import Config
from src.cp import CpParams, run_cp
from src.exceptions import UCCETError
from src.generator import BENCHMARK_FLEETS, DESK_SCALE_ROWS, GeneratorSpec, generate_instance, tiny_instance, tiny_suite
from src.la import LaParams
from src.model import load_instance, save_instance
from src.oracle import enumerate_optimal
from src.report_exporter import ReportExporter
from src.report_processor import ReportProcessor, performance_profile
from src.utils import format_money, setup_logging

# Ensure UTF-8 output on Windows
if sys.platform == "win32":
    sys.stdout = io.TextIOWrapper(sys.stdout.detach(), encoding='utf-8', errors='replace')
    sys.stderr = io.TextIOWrapper(sys.stderr.detach(), encoding='utf-8', errors='replace')

VERIFY_FACTOR = 1.005


class CliParser(argparse.ArgumentParser):
    """Usage errors exit with 1 like every other input error."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_mu(value: str):
    """'schedule' or 'fixed:<v>' -> None or v."""
    if value == 'schedule':
        return None
    if value.startswith('fixed:'):
        try:
            mu = float(value.split(':', 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad mu value {value!r}")
        if not 0.0 < mu <= 1.0:
            raise argparse.ArgumentTypeError("fixed mu must lie in (0, 1]")
        return mu
    raise argparse.ArgumentTypeError("expected 'schedule' or 'fixed:<v>'")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--backend', choices=sorted(BACKENDS), default=None)
    common.add_argument('--solver-cmd', default=None,
                        help="external solver executable or command template with {input} and {output}")
    common.add_argument('--out', choices=['json', 'csv', 'xlsx'], default='json')
    common.add_argument('--output', type=Path, default=None, help="output file (default: timestamped in output/)")
    common.add_argument('--log-level', default=Config.LOG_LEVEL)
    common.add_argument('--l-seg', type=int, default=None, help=f"production-cost segments (default {Config.L_SEG})")
    common.add_argument('--units-csv', type=Path, default=None, help="unit table overriding the instance's units")

    algo = argparse.ArgumentParser(add_help=False)
    algo.add_argument('--eps-lp', type=float, default=Config.EPS_LP)
    algo.add_argument('--eps-r', type=float, default=Config.EPS_R)
    algo.add_argument('--eps-g', type=float, default=Config.EPS_G)
    algo.add_argument('--eps-h', type=float, default=Config.EPS_H)
    algo.add_argument('--mu', type=parse_mu, default=None, metavar='{schedule,fixed:<v>}')
    algo.add_argument('--time-limit', type=float, default=Config.CP_TIME_LIMIT)
    algo.add_argument('--max-iters', type=int, default=Config.MAX_MILP_ITERS)

    instances = argparse.ArgumentParser(add_help=False)
    instances.add_argument('--instance', type=Path, action='append', default=[])
    instances.add_argument('--table-row', type=int, action='append', default=[],
                           help="generate a replicated benchmark row (repeatable)")
    instances.add_argument('--desk-scale', action='store_true', help=f"rows {DESK_SCALE_ROWS[0]}-{DESK_SCALE_ROWS[-1]}")
    instances.add_argument('--tiny', type=int, default=0, help="number of tiny generated instances")
    instances.add_argument('--horizon', type=int, default=None)
    instances.add_argument('--seed', type=int, default=None)

    parser = CliParser(description="UC-CET center-point solver")
    sub = parser.add_subparsers(dest='command', required=True, parser_class=CliParser)

    sub.add_parser('solve', parents=[common, algo], help="run CP on an instance") \
        .add_argument('--instance', type=Path, required=True)

    p = sub.add_parser('relax', parents=[common, algo], help="Z_CR of one formulation")
    p.add_argument('--instance', type=Path, required=True)
    p.add_argument('--formulation', choices=FORMULATIONS, default='cp_la')

    sub.add_parser('tightness', parents=[common, algo, instances], help="four relaxations and differences") \
        .add_argument('--workers', type=int, default=Config.BENCH_WORKERS)

    p = sub.add_parser('generate', parents=[common], help="write a generated instance")
    p.add_argument('--table-row', type=int, default=None, choices=sorted(BENCHMARK_FLEETS))
    p.add_argument('--tiny', nargs=2, type=int, metavar=('N', 'T'), default=None)
    p.add_argument('--horizon', type=int, default=None)
    p.add_argument('--seed', type=int, default=None)

    p = sub.add_parser('bench', parents=[common, algo, instances], help="CP or direct MIQCP over instances")
    p.add_argument('--mode', choices=MODES, default='cp')
    p.add_argument('--workers', type=int, default=Config.BENCH_WORKERS)

    p = sub.add_parser('profile', parents=[common, algo, instances], help="performance profile")
    p.add_argument('--input', type=Path, default=None,
                   help="bench CSV with instance, label and best_objective columns; without it a mu ablation runs")
    p.add_argument('--workers', type=int, default=Config.BENCH_WORKERS)

    sub.add_parser('verify', parents=[common, algo], help="oracle cross-check on a tiny instance") \
        .add_argument('--instance', type=Path, required=True)
    return parser


def params_from_args(args):
    la = LaParams(eps_lp=args.eps_lp)
    cp = CpParams(args.eps_r, args.eps_g, args.eps_h, args.max_iters, args.time_limit, args.mu)
    return la, cp


def backend_factory(args):
    return lambda: create_backend(args.backend, args.solver_cmd)


def collect_instances(args):
    """Named instances from files, benchmark rows and the tiny generator."""
    named = [(path.stem, load_instance(path, args.units_csv, args.l_seg)) for path in args.instance]
    rows = list(args.table_row) + (list(DESK_SCALE_ROWS) if args.desk_scale else [])
    for row in rows:
        spec = GeneratorSpec.from_table_row(row, horizon=args.horizon, seed=args.seed,
                                            l_seg=args.l_seg or Config.L_SEG)
        named.append((f"row{row}", generate_instance(spec)))
    if args.tiny:
        named.extend(tiny_suite(args.tiny, args.seed or 0))
    if not named:
        raise ValueError("no instances given (use --instance, --table-row, --desk-scale or --tiny)")
    return named


def cmd_solve(args, exporter, processor):
    inst = load_instance(args.instance, args.units_csv, args.l_seg)
    la_params, cp_params = params_from_args(args)
    result = run_cp(inst, create_backend(args.backend, args.solver_cmd), la_params, cp_params)
    summary = processor.solve_summary(inst, result)
    summary['instance'] = str(args.instance)
    exporter.export_report(summary, args.out, 'solve', {'trace': result.trace_frame()}, args.output)
    print_solve_summary(summary)
    if not result.found:
        return 2
    return 0


def cmd_relax(args, exporter, processor):
    inst = load_instance(args.instance, args.units_csv, args.l_seg)
    la_params, _ = params_from_args(args)
    relaxation = relax(inst, args.formulation, create_backend(args.backend, args.solver_cmd), la_params)
    report = {'instance': str(args.instance), 'formulation': relaxation.formulation,
              'z_cr': relaxation.value, 'cuts': relaxation.cuts, 'solve_time_s': relaxation.solve_time}
    exporter.export_report(report, args.out, 'relax', path=args.output)
    print(f"Z_CR[{relaxation.formulation}] = {relaxation.value:,.2f} ({relaxation.cuts} cuts)")
    return 0


async def cmd_tightness(args, exporter, processor):
    la_params, _ = params_from_args(args)
    manager = BenchManager(backend_factory(args), args.workers)
    reports = await manager.tightness_all(collect_instances(args), la_params)
    frame = processor.tightness_frame(reports)
    exporter.export_report({'instances': len(reports)}, args.out, 'tightness', {'tightness': frame}, args.output)
    print(frame.to_string(index=False))
    return 0 if all(not r.errors for r in reports) else 3


def cmd_generate(args, exporter, processor):
    if args.tiny:
        n_units, horizon = args.tiny
        inst = tiny_instance(n_units, horizon, args.seed or 0, l_seg=args.l_seg or Config.L_SEG)
        name = f"tiny_N{n_units}_T{horizon}"
    elif args.table_row:
        spec = GeneratorSpec.from_table_row(args.table_row, horizon=args.horizon, seed=args.seed,
                                            l_seg=args.l_seg or Config.L_SEG)
        inst = generate_instance(spec)
        name = f"row{args.table_row}"
    else:
        raise ValueError("generate needs --table-row or --tiny N T")
    path = args.output or Config.OUTPUT_DIR / f"{name}.json"
    save_instance(inst, path)
    print(f"Wrote {path} (N={inst.n_units}, T={inst.horizon}, E0={inst.cet.e0:,.0f} t)")
    return 0


async def cmd_bench(args, exporter, processor):
    la_params, cp_params = params_from_args(args)
    manager = BenchManager(backend_factory(args), args.workers)
    results = await manager.bench_all(collect_instances(args), args.mode, cp_params, la_params)
    frame = processor.bench_frame(results)
    failed = sum(r.failed for r in results)
    exporter.export_report({'mode': args.mode, 'instances': len(results), 'failed': failed},
                           args.out, 'bench', {'bench': frame}, args.output)
    print(frame.to_string(index=False))
    return 0 if not failed else 3


async def cmd_profile(args, exporter, processor):
    if args.input:
        frame = pd.read_csv(args.input)
    else:
        la_params, cp_params = params_from_args(args)
        manager = BenchManager(backend_factory(args), args.workers)
        results = await manager.mu_ablation(collect_instances(args), cp_params, la_params)
        frame = processor.bench_frame(results)
    profile = performance_profile(processor.objective_matrix(frame))
    curves = profile.frame()
    exporter.export_report({'methods': list(profile.methods), 'problems': profile.n_problems,
                            'tau_max': profile.tau_max}, args.out, 'profile',
                           {'profile': curves, 'runs': frame}, args.output)
    for method in profile.methods:
        print(f"{method}: rho(1) = {profile.rho(method, 1.0):.3f}")
    return 0


def cmd_verify(args, exporter, processor):
    inst = load_instance(args.instance, args.units_csv, args.l_seg)
    la_params, cp_params = params_from_args(args)
    oracle = enumerate_optimal(inst)
    result = run_cp(inst, create_backend(args.backend, args.solver_cmd), la_params, cp_params)

    if not oracle.feasible:
        passed = not result.found
    else:
        passed = result.found and result.best_objective <= oracle.optimum * VERIFY_FACTOR + 1e-6
    report = {
        'instance': str(args.instance),
        'oracle_optimum': oracle.optimum,
        'oracle_patterns': oracle.evaluated,
        'cp_objective': result.best_objective,
        'cp_termination': result.termination,
        'cp_iterations': result.iterations,
        'passed': passed,
    }
    exporter.export_report(report, args.out, 'verify', path=args.output)
    print(f"oracle {format_money(oracle.optimum)} | CP {format_money(result.best_objective)} | "
          f"{'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


COMMANDS = {
    'solve': cmd_solve,
    'relax': cmd_relax,
    'tightness': cmd_tightness,
    'generate': cmd_generate,
    'bench': cmd_bench,
    'profile': cmd_profile,
    'verify': cmd_verify,
}


async def main(argv=None) -> int:
    """Main application entry point."""
    args = build_parser().parse_args(argv)

    setup_logging(args.log_level)
    logger = logging.getLogger(__name__)
    logger.info(f"Starting UC-CET solver: {args.command}")

    exporter = ReportExporter()
    processor = ReportProcessor()
    try:
        outcome = COMMANDS[args.command](args, exporter, processor)
        if asyncio.iscoroutine(outcome):
            outcome = await outcome
        return outcome
    except UCCETError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code
    except (ValueError, FileNotFoundError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1


def print_solve_summary(summary):
    """Print a short console summary of a solve run."""
    print("\n" + "=" * 60)
    print("UC-CET CENTER-POINT SOLVE")
    print("=" * 60)
    print(f"Units x periods:   {summary['n_units']} x {summary['horizon']}")
    print(f"Termination:       {summary['termination']} after {summary['iterations']} iterations")
    print(f"LA relaxation:     {format_money(summary['la_relaxation_value'])} ({summary['la_cuts']} cuts)")
    print(f"Best objective:    {format_money(summary['best_objective'])}")
    if 'emission_total' in summary:
        print(f"Emissions:         {summary['emission_total']:,.1f} t of E0 {summary['e0']:,.1f} t "
              f"(bought {summary['bought']:,.1f}, sold {summary['sold']:,.1f})")
        print(f"Validation:        {'feasible' if summary['feasible'] else summary['violations']}")
    elif math.isnan(summary['best_objective']):
        print("No feasible schedule found")
    print("=" * 60)


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
