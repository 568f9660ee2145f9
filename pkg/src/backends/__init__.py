"""
Solver backends for the UC-CET solver
"""

from typing import Optional

from ..config import Config
from .cvxpy_backend import CvxpyBackend
from .process_backend import ProcessBackend

BACKENDS = {
    'cvxpy': CvxpyBackend,
    'process': ProcessBackend,
}


def create_backend(name: Optional[str] = None, solver_cmd: Optional[str] = None):
    """Backend by name; a solver command implies the process backend."""
    if solver_cmd and name is None:
        name = 'process'
    name = name or Config.DEFAULT_BACKEND
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r} (choose from {sorted(BACKENDS)})")
    if name == 'process':
        return ProcessBackend(solver_cmd=solver_cmd)
    return CvxpyBackend()


__all__ = [
    'CvxpyBackend',
    'ProcessBackend',
    'create_backend',
]
