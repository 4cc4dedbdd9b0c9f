# weakcurrent/tests/test_units.py

import math

import numpy as np
import pytest

from weakcurrent.errors import DomainError
from weakcurrent.models import UnitSystem
from weakcurrent.units import (
    ballistic_time_from_length,
    conductance_quantum,
    crossover_time,
    field_config,
    natural_units,
    rate_scale,
    si_graphene_units,
    unit_system,
)


def test_natural_units():
    """Natural preset sets every constant to 1 and derives h = 2 pi."""
    units = natural_units()
    assert (units.hbar, units.e_charge, units.v_f) == (1.0, 1.0, 1.0)
    assert units.planck_h == pytest.approx(6.283185307179586, rel=1e-15)
    assert units.planck_h / units.hbar == pytest.approx(2 * math.pi, rel=1e-15)
    assert units.c == units.v_f


def test_si_graphene_units():
    units = si_graphene_units()
    assert units.hbar == pytest.approx(1.054571817e-34, rel=1e-9)
    assert units.e_charge == pytest.approx(1.602176634e-19, rel=1e-12)
    assert units.v_f == 1.0e6


def test_unit_system_rejects_non_positive_constants():
    with pytest.raises(ValueError):
        UnitSystem(hbar=1.0, e_charge=0.0, v_f=1.0)
    with pytest.raises(ValueError):
        UnitSystem(hbar=-1.0, e_charge=1.0, v_f=1.0)


def test_unit_system_overrides():
    """Known constants can be overridden on top of a preset."""
    units = unit_system("si", {"v_f": 8.0e5})
    assert units.v_f == 8.0e5
    assert units.hbar == si_graphene_units().hbar
    assert units.planck_h == pytest.approx(2 * math.pi * units.hbar, rel=1e-15)


@pytest.mark.parametrize(
    "preset, overrides",
    [("planck", None), ("natural", {"c": 1.0}), ("natural", {"hbar": -2.0})],
)
def test_unit_system_errors(preset, overrides):
    with pytest.raises(DomainError):
        unit_system(preset, overrides)


@pytest.mark.parametrize("epsilon, expected", [(1.0, 1.0), (4.0, 0.5), (0.25, 2.0)])
def test_crossover_time_natural(natural, epsilon, expected):
    assert crossover_time(natural, epsilon) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("epsilon", [0.0, -1.0])
def test_crossover_time_rejects_non_positive_field(natural, epsilon):
    with pytest.raises(DomainError):
        crossover_time(natural, epsilon)


def test_crossover_time_scaling(si):
    """t_c * sqrt(eps) does not depend on eps."""
    fields = np.geomspace(1e2, 1e7, 11)
    products = [crossover_time(si, eps) * math.sqrt(eps) for eps in fields]
    assert np.allclose(products, products[0], rtol=1e-13, atol=0.0)


def test_field_config_validation():
    assert field_config(1.0, 2.0).t_bal == 2.0
    with pytest.raises(DomainError):
        field_config(0.0, 1.0)
    with pytest.raises(DomainError):
        field_config(1.0, -1.0)


def test_ballistic_time_from_length(natural, si):
    assert ballistic_time_from_length(2.5, natural) == 2.5
    assert ballistic_time_from_length(1e-6, si) == pytest.approx(1e-12, rel=1e-15)
    with pytest.raises(DomainError):
        ballistic_time_from_length(0.0, natural)


def test_characteristic_scales(natural):
    assert conductance_quantum(natural) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    assert rate_scale(natural, 4.0) == pytest.approx(8.0, rel=1e-15)
