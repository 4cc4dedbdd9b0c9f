# weakcurrent/tests/conftest.py

import pytest

from weakcurrent.models import QuadratureConfig
from weakcurrent.momentum_regions import region_config
from weakcurrent.units import natural_units, si_graphene_units


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running numerical acceptance checks")


@pytest.fixture
def natural():
    """hbar = e = v_f = 1."""
    return natural_units()


@pytest.fixture
def si():
    return si_graphene_units(v_f=1.0e6)


@pytest.fixture
def adaptive():
    return QuadratureConfig(method="adaptive-polar", rel_tol=1e-10)


@pytest.fixture
def strip():
    return QuadratureConfig(method="cartesian-strip", rel_tol=1e-10)


@pytest.fixture
def crossover_cfg(natural):
    """eps = 1 at t_bal = t_c = 1: r_B = r_F = sqrt(k_V) = 0.5."""
    return region_config(natural, 1.0, 1.0)


@pytest.fixture
def schwinger_cfg(natural):
    """eps = 1 at t_bal = 100 t_c."""
    return region_config(natural, 1.0, 100.0)
