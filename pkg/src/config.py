"""
Configuration settings for the UC-CET center-point solver
"""

import os
from pathlib import Path


class Config:
    """Application configuration settings."""

    # Linear approximation (LA) sub-algorithm
    EPS_LP = 1e-3
    K_MAX_LP = 1000
    BOUNDARY_TOL = 1e-8  # |g| accepted as "on the boundary" after a line search, relative to max(1, |g_out|)

    # Center-point (CP) algorithm
    EPS_R = 1e-3
    EPS_G = 1e-3
    EPS_H = 1e-3
    MAX_MILP_ITERS = 100
    CP_TIME_LIMIT = 600.0  # seconds
    R_CAP = 1e6  # upper bound on the ellipsoid radius variable
    MU_BASE = 1e3
    MU_RATE = 3.0
    OBJECTIVE_CUT_TOL = 1e-6  # relative slack on the incumbent bound

    # Formulation
    L_SEG = 4  # production-cost cuts per (unit, period) minus one
    PIECEWISE_K = 5  # breakpoints of the S_PW / PC_PW baselines
    INTEGRALITY_TOL = 1e-6
    VALIDATION_TOL = 1e-6

    # Relative gap presets per problem class
    GAP_PRESETS = {
        'LP': 0.005,
        'QP': 0.001,
        'QCP': 0.001,
        'MILP': 0.001,
        'MIQCP': 0.001,
    }
    SOLVE_TIME_LIMIT = 300.0  # seconds per subproblem

    # Backends
    DEFAULT_BACKEND = 'cvxpy'
    SOLVER_ENV_VAR = 'UCCET_SOLVER'
    SOLVER_EXECUTABLE = os.environ.get(SOLVER_ENV_VAR, 'scip')
    SOLVER_CMD_TEMPLATE = (
        '{solver} -q -c "read {input} set limits time {timelimit} '
        'set limits gap {gap} optimize write solution {output} quit"'
    )
    KEEP_FILES_ON_ERROR = True
    # cvxpy solver preference per problem class (first installed wins)
    CVXPY_SOLVERS = {
        'LP': ['HIGHS', 'SCIPY', 'CLARABEL', 'ECOS'],
        'MILP': ['HIGHS', 'SCIPY', 'SCIP', 'GLPK_MI', 'CBC'],
        'QCP': ['CLARABEL', 'ECOS', 'SCS'],
        'MIQCP': ['SCIP', 'GUROBI', 'CPLEX', 'MOSEK'],
    }

    # Oracle
    ORACLE_BIT_CAP = 26
    DISPATCH_TOL = 1e-7
    DISPATCH_MAX_ROUNDS = 500
    DISPATCH_FEAS_TOL = 1e-9

    # Benchmark harness
    BENCH_WORKERS = 2
    MAX_RETRIES = 2
    RETRY_DELAY = 1.0  # seconds
    TARGET_FACTORS = (1.05, 1.01)
    RESERVE_FRACTION = 0.03
    QUOTA_FRACTION = 0.2
    DATA_DIR = Path(__file__).resolve().parent.parent / 'data'
    BASE_DATASET = DATA_DIR / 'base_units.json'

    # Output settings
    OUTPUT_DIR = Path('output')

    # Logging configuration
    LOG_LEVEL = 'INFO'
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    LOG_DIR = Path('logs')
    LOG_FILE = 'uccet.log'
