"""Shared fixtures: the toy instance, tiny generated instances and an in-process backend."""

from dataclasses import replace

import numpy as np
import pytest

from src.config import Config
from src.generator import tiny_instance
from src.model import CETParams, SystemParams, UnitParams, derive_instance, load_instance

TOY_PATH = Config.DATA_DIR / 'toy.json'


def make_unit(**overrides) -> UnitParams:
    """A small, always-valid unit; overrides change single fields."""
    unit = UnitParams(
        alpha=370.0, beta=22.26, gamma=0.00712, c_hot=170.0, c_cold=340.0, t_cold=2,
        p_min=20.0, p_max=80.0, p_up=36.0, p_down=36.0, p_start=50.0, p_shut=50.0,
        u0=0, t0=-3, t_on=3, t_off=3, a_e=12.95, b_e=0.7791, c_e=0.0002492, name="U",
    )
    return replace(unit, **overrides)


def make_instance(units=None, demand=(45.0, 60.0, 50.0), reserve_fraction=0.03, e0=200.0, quota=50.0,
                  l_seg=4):
    units = units or [make_unit()]
    system = SystemParams(len(demand), tuple(demand), tuple(reserve_fraction * d for d in demand))
    return derive_instance(units, system, CETParams(30.0, 25.0, e0, quota, quota), l_seg)


@pytest.fixture
def toy():
    return load_instance(TOY_PATH)


@pytest.fixture
def single_unit():
    return make_instance()


@pytest.fixture(params=[(1, 3, 0), (2, 3, 1), (2, 4, 2)], ids=lambda p: f"N{p[0]}-T{p[1]}-s{p[2]}")
def tiny(request):
    n_units, horizon, seed = request.param
    return tiny_instance(n_units, horizon, seed)


@pytest.fixture(scope='session')
def backend():
    cvxpy = pytest.importorskip('cvxpy')  # noqa: F841
    from src.backends import CvxpyBackend

    solver = CvxpyBackend()
    for cls in ('LP', 'MILP', 'QCP'):
        if not solver.supports(cls):
            pytest.skip(f"no installed cvxpy solver for {cls}")
    return solver


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def requires(backend, problem_class):
    if not backend.supports(problem_class):
        pytest.skip(f"backend cannot solve {problem_class}")
