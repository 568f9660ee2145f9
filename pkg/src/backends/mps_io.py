"""
MPS problem files and SCIP-style solution files

Free-format MPS with MARKER integer blocks, an OBJSENSE section and
QCMATRIX sections for quadratic constraints. Numbers are written with 17
significant digits so a write/read cycle reproduces every coefficient.
"""

import logging
import math
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..base_backend import SolveResult
from ..exceptions import SolutionFileError
from ..formulation import LinearConstraint, ModelProblem, QuadraticConstraint
from ..utils import sanitize_name

logger = logging.getLogger(__name__)

OBJECTIVE_ROW = 'obj'
SENSE_CODES = {'<=': 'L', '=': 'E', '>=': 'G'}
CODE_SENSES = {code: sense for sense, code in SENSE_CODES.items()}


def _no_negative_zero(val: float) -> float:
    """Make sure -0 is never output."""
    if val == 0:
        return 0.0
    return val


def _num(val: float) -> str:
    return "%.17g" % _no_negative_zero(float(val))


def row_labels(problem: ModelProblem) -> List[str]:
    """Unique MPS row names derived from row tags, linear rows first then quadratic blocks."""
    labels, seen = [], {OBJECTIVE_ROW: 1}
    for tag in [row.tag for row in problem.rows] + [block.tag for block in problem.quadratic]:
        label = sanitize_name(tag)
        if label in seen:
            seen[label] += 1
            label = f"{label}_{seen[label]}"
        seen[label] = 1
        labels.append(label)
    return labels


def write_problem_file(problem: ModelProblem, path) -> Path:
    """Write problem as free-format MPS."""
    path = Path(path)
    labels = row_labels(problem)
    linear_labels = labels[:len(problem.rows)]
    quad_labels = labels[len(problem.rows):]

    columns: List[List[Tuple[str, float]]] = [[] for _ in range(problem.n_vars)]
    for j, v in sorted(problem.objective.items()):
        columns[j].append((OBJECTIVE_ROW, v))
    for label, row in zip(linear_labels, problem.rows):
        for j, v in sorted(row.coeffs.items()):
            columns[j].append((label, v))
    for label, block in zip(quad_labels, problem.quadratic):
        for j, v in sorted(block.linear.items()):
            columns[j].append((label, v))

    with open(path, 'w', encoding='utf-8') as f:
        f.write(f"NAME {sanitize_name(problem.name)}\n")
        f.write("OBJSENSE\n")
        f.write(f"    {'MAX' if problem.sense == 'max' else 'MIN'}\n")

        f.write("ROWS\n")
        f.write(f" N  {OBJECTIVE_ROW}\n")
        for label, row in zip(linear_labels, problem.rows):
            f.write(f" {SENSE_CODES[row.sense]}  {label}\n")
        for label in quad_labels:
            f.write(f" L  {label}\n")

        f.write("COLUMNS\n")
        in_marker, marker_count = False, 0
        for j, name in enumerate(problem.names):
            if problem.integer[j] and not in_marker:
                f.write(f"    MARKER{marker_count} 'MARKER' 'INTORG'\n")
                in_marker = True
            elif not problem.integer[j] and in_marker:
                f.write(f"    MARKER{marker_count} 'MARKER' 'INTEND'\n")
                in_marker = False
                marker_count += 1
            entries = columns[j] or [(OBJECTIVE_ROW, 0.0)]
            for label, v in entries:
                f.write(f"    {name} {label} {_num(v)}\n")
        if in_marker:
            f.write(f"    MARKER{marker_count} 'MARKER' 'INTEND'\n")

        f.write("RHS\n")
        for label, row in zip(linear_labels, problem.rows):
            if row.rhs != 0:
                f.write(f"    RHS {label} {_num(row.rhs)}\n")
        for label, block in zip(quad_labels, problem.quadratic):
            if block.rhs != 0:
                f.write(f"    RHS {label} {_num(block.rhs)}\n")

        f.write("BOUNDS\n")
        for j, name in enumerate(problem.names):
            f.write(_bound_lines(name, problem.lb[j], problem.ub[j], bool(problem.integer[j])))

        for label, block in zip(quad_labels, problem.quadratic):
            f.write(f"QCMATRIX    {label}\n")
            for j, q in sorted(block.diag.items()):
                name = problem.names[j]
                f.write(f"    {name} {name} {_num(q)}\n")

        f.write("ENDATA\n")

    logger.debug(f"Wrote {problem.name} to {path} ({problem.n_vars} columns, {len(labels)} rows)")
    return path


def _bound_lines(name: str, lb: float, ub: float, integer: bool) -> str:
    if integer and lb == 0 and ub == 1:
        return f" BV BND {name}\n"
    if lb == ub:
        return f" FX BND {name} {_num(lb)}\n"
    lines = ""
    if math.isinf(lb) and math.isinf(ub):
        return f" FR BND {name}\n"
    if math.isinf(lb):
        lines += f" MI BND {name}\n"
    elif lb != 0:
        lines += f" LO BND {name} {_num(lb)}\n"
    if not math.isinf(ub):
        lines += f" UP BND {name} {_num(ub)}\n"
    return lines


def read_problem_file(path) -> ModelProblem:
    """Parse a free-format MPS file written by write_problem_file (or compatible)."""
    path = Path(path)
    name, sense = path.stem, 'min'
    row_sense: Dict[str, str] = {}
    row_order: List[str] = []
    objective_row: Optional[str] = None
    col_index: Dict[str, int] = {}
    col_names: List[str] = []
    integer: List[bool] = []
    coeffs: Dict[str, Dict[int, float]] = {}
    objective: Dict[int, float] = {}
    rhs: Dict[str, float] = {}
    bounds: Dict[int, List[float]] = {}
    quad: Dict[str, Dict[int, float]] = {}
    section, qrow, in_int = None, None, False

    def column(col: str) -> int:
        if col not in col_index:
            col_index[col] = len(col_names)
            col_names.append(col)
            integer.append(in_int)
        return col_index[col]

    with open(path, encoding='utf-8') as f:
        for line_no, raw in enumerate(f, start=1):
            if not raw.strip() or raw.startswith('*'):
                continue
            tokens = raw.split()
            if not raw[0].isspace():
                section = tokens[0].upper()
                if section == 'NAME':
                    name = tokens[1] if len(tokens) > 1 else name
                elif section == 'OBJSENSE' and len(tokens) > 1:
                    sense = 'max' if tokens[1].upper().startswith('MAX') else 'min'
                elif section == 'QCMATRIX':
                    qrow = tokens[1]
                    quad[qrow] = {}
                elif section == 'ENDATA':
                    break
                continue
            try:
                if section == 'OBJSENSE':
                    sense = 'max' if tokens[0].upper().startswith('MAX') else 'min'
                elif section == 'ROWS':
                    code, label = tokens[0].upper(), tokens[1]
                    if code == 'N':
                        objective_row = objective_row or label
                    else:
                        row_sense[label] = CODE_SENSES[code]
                        row_order.append(label)
                        coeffs[label] = {}
                elif section == 'COLUMNS':
                    if len(tokens) >= 3 and tokens[1].strip("'") == 'MARKER':
                        in_int = tokens[2].strip("'") == 'INTORG'
                        continue
                    j = column(tokens[0])
                    for label, value in zip(tokens[1::2], tokens[2::2]):
                        if label == objective_row:
                            objective[j] = objective.get(j, 0.0) + float(value)
                        else:
                            coeffs[label][j] = float(value)
                elif section == 'RHS':
                    pairs = tokens[1:] if len(tokens) % 2 == 1 else tokens
                    for label, value in zip(pairs[0::2], pairs[1::2]):
                        if label != objective_row:
                            rhs[label] = float(value)
                elif section == 'BOUNDS':
                    _apply_bound(tokens, bounds, column, integer)
                elif section == 'QCMATRIX':
                    a, b, value = column(tokens[0]), column(tokens[1]), float(tokens[2])
                    if a != b:
                        raise ValueError("off-diagonal quadratic terms are not supported")
                    quad[qrow][a] = value
            except (KeyError, ValueError, IndexError) as e:
                raise ValueError(f"{path}:{line_no}: cannot parse {section} line {raw.strip()!r}: {e}") from e

    n = len(col_names)
    lb, ub = np.zeros(n), np.full(n, math.inf)
    for j, (lo, hi) in bounds.items():
        lb[j], ub[j] = lo, hi
    rows, blocks = [], []
    for label in row_order:
        if label in quad:
            if row_sense[label] != '<=':
                raise ValueError(f"quadratic row {label} must be a '<=' row")
            blocks.append(QuadraticConstraint(quad[label], coeffs[label], rhs.get(label, 0.0), label))
        else:
            rows.append(LinearConstraint(coeffs[label], row_sense[label], rhs.get(label, 0.0), label))
    return ModelProblem(
        names=tuple(col_names), lb=lb, ub=ub, integer=np.array(integer, dtype=bool),
        rows=tuple(rows), quadratic=tuple(blocks), objective=objective, sense=sense, name=name,
    )


def _apply_bound(tokens: Sequence[str], bounds: Dict[int, List[float]], column, integer: List[bool]):
    kind = tokens[0].upper()
    j = column(tokens[2])
    lo_hi = bounds.setdefault(j, [0.0, math.inf])
    value = float(tokens[3]) if len(tokens) > 3 else None
    if kind == 'LO':
        lo_hi[0] = value
    elif kind == 'UP':
        lo_hi[1] = value
    elif kind == 'FX':
        lo_hi[0] = lo_hi[1] = value
    elif kind == 'FR':
        lo_hi[0], lo_hi[1] = -math.inf, math.inf
    elif kind == 'MI':
        lo_hi[0] = -math.inf
    elif kind == 'PL':
        lo_hi[1] = math.inf
    elif kind == 'BV':
        lo_hi[0], lo_hi[1] = 0.0, 1.0
        integer[j] = True
    elif kind == 'LI':
        lo_hi[0] = value
        integer[j] = True
    elif kind == 'UI':
        lo_hi[1] = value
        integer[j] = True
    else:
        raise ValueError(f"unknown bound type {kind}")


# ---------------------------------------------------------------------------
# Solution files
# ---------------------------------------------------------------------------

SOLUTION_LINE = re.compile(r'^(\S+)\s+(\S+)(?:\s+\(obj:[^)]*\))?\s*$')


def _status_from_text(text: str, has_values: bool) -> str:
    text = text.lower()
    # "infeasible or unbounded" counts as infeasible
    if 'infeasible' in text:
        return 'infeasible'
    if 'unbounded' in text:
        return 'unbounded'
    if 'optimal' in text:
        return 'optimal'
    if 'time limit' in text:
        return 'time_limit'
    if has_values:
        return 'feasible'
    return 'error'


def parse_solution_file(path, names: Optional[Sequence[str]] = None) -> SolveResult:
    """Parse a SCIP-style solution file; names not listed default to 0."""
    path = Path(path)
    status_text, objective = '', math.nan
    primal: Dict[str, float] = {}
    no_solution = False

    with open(path, encoding='utf-8') as f:
        for line_no, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            lower = stripped.lower()
            if lower.startswith('solution status:'):
                status_text = stripped.split(':', 1)[1].strip()
                continue
            if lower.startswith('objective value:'):
                value = stripped.split(':', 1)[1].strip()
                try:
                    objective = float(value)
                except ValueError:
                    raise SolutionFileError(path, line_no, line, "bad objective value")
                continue
            if lower.startswith('no solution available'):
                no_solution = True
                continue
            match = SOLUTION_LINE.match(stripped)
            if not match:
                raise SolutionFileError(path, line_no, line, "unrecognized line")
            try:
                primal[match.group(1)] = float(match.group(2))
            except ValueError:
                raise SolutionFileError(path, line_no, line, "bad variable value")

    if not status_text and not primal and not no_solution:
        raise SolutionFileError(path, 0, '', "empty solution file")

    status = _status_from_text(status_text, bool(primal))
    if no_solution or status in ('infeasible', 'unbounded'):
        return SolveResult(status, message=status_text)

    if names is not None:
        missing = [name for name in names if name not in primal]
        if missing:
            logger.warning(f"{path.name}: {len(missing)} variables missing from solution, set to 0 "
                           f"(first: {missing[0]})")
        primal = {name: primal.get(name, 0.0) for name in names}
    if objective != objective and not primal:
        return SolveResult('error', message=f"no solution values in {path.name}")
    return SolveResult(status, objective, primal, message=status_text)
