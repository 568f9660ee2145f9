"""
External solver process backend

Writes the problem as MPS, runs a solver command built from a template and
reads the solution file it writes.
"""

import logging
import shlex
import shutil
import subprocess
import tempfile
from pathlib import Path
from typing import Iterable, Optional

from ..base_backend import BackendCapabilities, BaseBackend, SolveOptions, SolveResult
from ..config import Config
from ..exceptions import SolutionFileError
from ..formulation import ModelProblem
from ..utils import Stopwatch, sanitize_name
from .mps_io import parse_solution_file, write_problem_file

PLACEHOLDERS = ('{input}', '{output}')


def resolve_command_template(solver_cmd: Optional[str] = None) -> str:
    """A full template is used as given; a bare executable is substituted into the default template."""
    if not solver_cmd:
        return Config.SOLVER_CMD_TEMPLATE.replace('{solver}', shlex.quote(Config.SOLVER_EXECUTABLE))
    if all(p in solver_cmd for p in PLACEHOLDERS):
        return solver_cmd
    return Config.SOLVER_CMD_TEMPLATE.replace('{solver}', shlex.quote(solver_cmd))


class ProcessBackend(BaseBackend):
    """Solves problems with an external solver binary through files."""

    name = 'process'

    def __init__(self, solver_cmd: Optional[str] = None, workdir: Optional[Path] = None,
                 keep_files_on_error: bool = Config.KEEP_FILES_ON_ERROR,
                 supports: Iterable[str] = ('LP', 'QP', 'MILP', 'QCP', 'MIQCP')):
        super().__init__({
            'template': resolve_command_template(solver_cmd),
            'workdir': workdir,
            'keep_files_on_error': keep_files_on_error,
        })
        self._capabilities = BackendCapabilities(frozenset(supports))
        self.logger = logging.getLogger(__name__)

    @property
    def capabilities(self) -> BackendCapabilities:
        return self._capabilities

    def build_command(self, input_path: Path, output_path: Path, opts: SolveOptions, problem_class: str):
        command = self.config['template'].format(
            input=input_path,
            output=output_path,
            timelimit=opts.time_limit,
            gap=opts.gap_for(problem_class),
        )
        return shlex.split(command)

    def _solve(self, problem: ModelProblem, opts: SolveOptions) -> SolveResult:
        workdir = self.config['workdir']
        tmpdir = Path(tempfile.mkdtemp(prefix='uccet_', dir=workdir))
        stem = sanitize_name(problem.name)
        input_path, output_path = tmpdir / f"{stem}.mps", tmpdir / f"{stem}.sol"
        watch = Stopwatch()
        failed = True

        try:
            write_problem_file(problem, input_path)
            args = self.build_command(input_path, output_path, opts, problem.problem_class)
            self.logger.debug(f"Running {' '.join(args)}")
            try:
                completed = subprocess.run(args, capture_output=True, text=True,
                                           timeout=opts.time_limit + 30.0)
            except FileNotFoundError as e:
                return SolveResult('error', solve_time=watch.elapsed(), message=f"solver not found: {e}")
            except subprocess.TimeoutExpired:
                return SolveResult('time_limit', solve_time=watch.elapsed(),
                                   message="solver process exceeded its time limit")

            if completed.returncode != 0:
                tail = (completed.stderr or completed.stdout or '').strip()[-500:]
                return SolveResult('error', solve_time=watch.elapsed(),
                                   message=f"solver exited with code {completed.returncode}: {tail}")
            if not output_path.exists():
                return SolveResult('error', solve_time=watch.elapsed(),
                                   message=f"solver wrote no solution file {output_path.name}")
            try:
                parsed = parse_solution_file(output_path, problem.names)
            except SolutionFileError as e:
                return SolveResult('error', solve_time=watch.elapsed(), message=str(e))

            failed = parsed.status == 'error'
            return SolveResult(parsed.status, parsed.objective, parsed.primal, watch.elapsed(), parsed.message)

        except OSError as e:
            return SolveResult('error', solve_time=watch.elapsed(), message=f"I/O failure: {e}")

        finally:
            if failed and self.config['keep_files_on_error']:
                self.logger.warning(f"Keeping solver files for {problem.name} in {tmpdir}")
            else:
                shutil.rmtree(tmpdir, ignore_errors=True)
