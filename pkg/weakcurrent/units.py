# weakcurrent/units.py

import logging
import math
from typing import Mapping, Optional

from pydantic import ValidationError
from scipy import constants as codata

from weakcurrent.config import SI_FERMI_VELOCITY
from weakcurrent.errors import DomainError
from weakcurrent.models import FieldConfig, UnitSystem

logger = logging.getLogger(__name__)

PRESETS = ("natural", "si")


def natural_units() -> UnitSystem:
    """hbar = e = v_f = 1, so h = 2*pi."""
    return UnitSystem(name="natural", hbar=1.0, e_charge=1.0, v_f=1.0)


def si_graphene_units(v_f: Optional[float] = None) -> UnitSystem:
    """
    SI constants from CODATA (via scipy.constants).

    The Fermi velocity is not a fundamental constant; the default of 1e6 m/s is
    the conventional graphene value and can be overridden through the
    WEAKCURRENT_FERMI_VELOCITY environment variable or a run config.
    """
    return UnitSystem(
        name="si",
        hbar=codata.hbar,
        e_charge=codata.e,
        v_f=SI_FERMI_VELOCITY if v_f is None else v_f,
    )


def unit_system(preset: str, overrides: Optional[Mapping[str, float]] = None) -> UnitSystem:
    """Build a preset and apply constant overrides (hbar, e_charge, v_f)."""
    if preset == "natural":
        base = natural_units()
    elif preset == "si":
        base = si_graphene_units()
    else:
        raise DomainError(f"unknown unit preset {preset!r}; expected one of {PRESETS}")

    if not overrides:
        return base

    fields = {"hbar": base.hbar, "e_charge": base.e_charge, "v_f": base.v_f}
    for key, value in overrides.items():
        if key not in fields:
            raise DomainError(f"unknown constant {key!r}")
        fields[key] = float(value)
    logger.debug("Applying constant overrides %s to %s preset", dict(overrides), preset)
    try:
        return UnitSystem(name=preset, **fields)
    except ValidationError as e:
        raise DomainError(str(e)) from e


def field_config(epsilon: float, t_bal: float) -> FieldConfig:
    try:
        return FieldConfig(epsilon=epsilon, t_bal=t_bal)
    except ValidationError as e:
        raise DomainError(str(e)) from e


def crossover_time(units: UnitSystem, epsilon: float) -> float:
    """Ballistic-time scale t_c = sqrt(hbar / (e * eps * v_f)) separating the two regimes."""
    if not epsilon > 0:
        raise DomainError(f"field strength must be > 0, got {epsilon}")
    return math.sqrt(units.hbar / (units.e_charge * epsilon * units.v_f))


def ballistic_time_from_length(length: float, units: UnitSystem) -> float:
    """t_bal = L / v_f for a sample of size L."""
    if not length > 0:
        raise DomainError(f"sample length must be > 0, got {length}")
    return length / units.v_f


# Characteristic scales used to strip units from results.


def conductance_quantum(units: UnitSystem) -> float:
    """e^2 / h."""
    return units.e_charge ** 2 / units.planck_h


def rate_scale(units: UnitSystem, epsilon: float) -> float:
    """e^{3/2} eps^{3/2} / (hbar^{3/2} v_f^{1/2}), the natural unit of a 2D pair-creation rate."""
    return (units.e_charge * epsilon) ** 1.5 / (units.hbar ** 1.5 * math.sqrt(units.v_f))
