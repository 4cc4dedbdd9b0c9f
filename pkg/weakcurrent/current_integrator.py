# weakcurrent/current_integrator.py

"""
Current density of the driven Dirac sheet from the two momentum-region integrals.

quasi-Ohmic branch  power_O = (2 pi hbar)^-2 * integral over O of T * (2E/Delta_t) * (delta_E_bal / 2E)
creation branch     rate_S  = (2 pi hbar)^-2 * integral over S of T / Delta_t

Both integrands reduce to a constant times the kernel p_x / |p|^2, which the
engines in weakcurrent.quadrature integrate. The two branches are summed at
every ballistic time.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from weakcurrent.errors import DomainError, NoTransitionError, RegimeError, WeakCurrentError, error_kind
from weakcurrent.models import (
    CurrentResult,
    IntegralEstimate,
    MomentumPoint,
    QuadratureConfig,
    RegionConfig,
    SweepRow,
    UnitSystem,
)
from weakcurrent.momentum_regions import region_config
from weakcurrent.monitoring import record_sweep_cell
from weakcurrent.quadrature import adaptive_quad, region_integral
from weakcurrent.transition_kinematics import transition_probability
from weakcurrent.units import crossover_time, rate_scale

logger = logging.getLogger(__name__)

QUASI_OHMIC_BELOW = 0.3
SCHWINGER_ABOVE = 3.0
COMBINATION = "additive"


# Integrand factors


def _require_transition(p: MomentumPoint):
    if not p.p_x > 0:
        raise NoTransitionError(f"a transition needs p_x > 0, got {p.p_x}")


def work_rate(p: MomentumPoint, cfg: RegionConfig) -> float:
    """2E / Delta_t: the field does the work 2E over the impulse time 2p_x / (e eps)."""
    _require_transition(p)
    return 2.0 * p.energy(cfg.units) * cfg.force / (2.0 * p.p_x)


def virtual_multiplicity(p: MomentumPoint, cfg: RegionConfig) -> float:
    """delta_E_bal / 2E: virtual pairs per state lent by the ballistic energy fluctuation."""
    energy = p.energy(cfg.units)
    if energy == 0.0:
        raise DomainError("virtual multiplicity diverges at the Dirac point")
    return (cfg.units.hbar / cfg.t_bal) / (2.0 * energy)


def quasi_ohmic_integrand(p: MomentumPoint, cfg: RegionConfig) -> float:
    return transition_probability(p) * work_rate(p, cfg) * virtual_multiplicity(p, cfg)


def creation_integrand(p: MomentumPoint, cfg: RegionConfig) -> float:
    """T / Delta_t."""
    _require_transition(p)
    return transition_probability(p) * cfg.force / (2.0 * p.p_x)


def _phase_space(units: UnitSystem) -> float:
    return 1.0 / (2.0 * math.pi * units.hbar) ** 2


def quasi_ohmic_prefactor(cfg: RegionConfig) -> float:
    """Constant multiplying the kernel in the O integral: (2 pi hbar)^-2 e eps hbar / (2 t_bal)."""
    return _phase_space(cfg.units) * cfg.force * cfg.units.hbar / (2.0 * cfg.t_bal)


def creation_prefactor(cfg: RegionConfig) -> float:
    """Constant multiplying the kernel in the S integral: (2 pi hbar)^-2 e eps / 2."""
    return _phase_space(cfg.units) * cfg.force / 2.0


# Region integrals


def _quasi_ohmic(cfg: RegionConfig, quad: QuadratureConfig) -> Tuple[float, IntegralEstimate]:
    estimate = region_integral(cfg, "O", quad)
    return quasi_ohmic_prefactor(cfg) * estimate.value, estimate


def quasi_ohmic_power(cfg: RegionConfig, quad: QuadratureConfig) -> float:
    """Work per unit time and area done on the virtual pairs of region O."""
    power, _ = _quasi_ohmic(cfg, quad)
    return power


def conductivity(cfg: RegionConfig, quad: QuadratureConfig) -> float:
    """power_O / eps^2; equals e^2 / (4 pi h) for t_bal <= t_c."""
    if cfg.ratio > 1.0:
        logger.warning(
            "t_bal/t_c = %.3g > 1: O is shrunk to the F half-disk, conductivity is a model extension",
            cfg.ratio,
        )
    return quasi_ohmic_power(cfg, quad) / cfg.epsilon ** 2


def _schwinger(cfg: RegionConfig, quad: QuadratureConfig) -> Tuple[float, IntegralEstimate]:
    if cfg.ratio <= 1.0:
        raise RegimeError(
            f"region S is empty for t_bal <= t_c (t_bal/t_c = {cfg.ratio:.6g})"
        )
    estimate = region_integral(cfg, "S", quad)
    return creation_prefactor(cfg) * estimate.value, estimate


def schwinger_region_rate(cfg: RegionConfig, quad: QuadratureConfig) -> float:
    """Pairs created per unit time and area from region S."""
    rate, _ = _schwinger(cfg, quad)
    return rate


# Closed forms


def quasi_ohmic_power_closed_form(epsilon: float, units: UnitSystem) -> float:
    """e^2 eps^2 / (4 pi h)."""
    if not epsilon > 0:
        raise DomainError(f"field strength must be > 0, got {epsilon}")
    return units.e_charge ** 2 * epsilon ** 2 / (4.0 * math.pi * units.planck_h)


def quasi_ohmic_power_extended(cfg: RegionConfig) -> float:
    """Closed form at any t_bal: the t_bal <= t_c value times min(1, (t_c/t_bal)^2)."""
    return quasi_ohmic_power_closed_form(cfg.epsilon, cfg.units) * min(1.0, cfg.ratio ** -2)


def minimal_conductivity(units: UnitSystem) -> float:
    """e^2 / (4 pi h)."""
    return units.e_charge ** 2 / (4.0 * math.pi * units.planck_h)


def schwinger_reference_rate(mass: float, epsilon: float, units: UnitSystem) -> float:
    """
    Schwinger pair-creation rate per area in 2+1D with the light cone set by v_f,
    e^{3/2} eps^{3/2} / (4 pi^2 hbar^{3/2} c^{1/2}) exp(-pi m^2 c^3 / (e eps hbar)).
    """
    if mass < 0:
        raise DomainError(f"mass must be >= 0, got {mass}")
    if not epsilon > 0:
        raise DomainError(f"field strength must be > 0, got {epsilon}")
    c = units.c
    exponent = -math.pi * mass ** 2 * c ** 3 / (units.e_charge * epsilon * units.hbar)
    return rate_scale(units, epsilon) / (4.0 * math.pi ** 2) * math.exp(exponent)


def beta_function(a: float, b: float) -> float:
    """B(a, b) through log-Gamma."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta function needs a, b > 0, got ({a}, {b})")
    return math.exp(special.betaln(a, b))


def beta_function_trig(a: float, b: float, rel_tol: float = 1e-11) -> float:
    """B(a, b) = 2 * integral over [0, pi/2] of sin^(2a-1) cos^(2b-1)."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta function needs a, b > 0, got ({a}, {b})")
    est = adaptive_quad(
        lambda theta: math.sin(theta) ** (2 * a - 1) * math.cos(theta) ** (2 * b - 1),
        0.0,
        0.5 * math.pi,
        rel_tol,
        200000,
        region="beta",
    )
    return 2.0 * est.value


def schwinger_coefficient() -> float:
    """B(1/2, 3/4) / 4 ~ 0.59907: the S-region rate in units of e^{3/2} eps^{3/2} / (4 pi^2 hbar^{3/2} v_f^{1/2})."""
    return beta_function(0.5, 0.75) / 4.0


def prefactor_integral(rel_tol: float = 1e-11) -> float:
    """
    1/2 * integral over [0, 1] of arctan(sqrt(s^-4 - 1)) ds, which equals B(1/2, 3/4) / 4.

    The factor 1/2 is the half-width sqrt(k_V) of the V pinch measured in
    units of sqrt(e eps hbar / v_f).
    """

    def integrand(s):
        with np.errstate(over="ignore", divide="ignore"):
            inv4 = np.float64(s) ** -4
        return math.atan(math.sqrt(max(inv4 - 1.0, 0.0)))

    est = adaptive_quad(integrand, 0.0, 1.0, rel_tol, 200000, region="prefactor")
    return 0.5 * est.value


def schwinger_asymptotic_rate(epsilon: float, units: UnitSystem) -> float:
    """t_bal -> infinity limit of the S-region rate."""
    if not epsilon > 0:
        raise DomainError(f"field strength must be > 0, got {epsilon}")
    return rate_scale(units, epsilon) / (4.0 * math.pi ** 2) * schwinger_coefficient()


def schwinger_finite_correction(ratio: float) -> float:
    """Leading relative deficit (2 / B(1/2, 3/4)) (t_c / t_bal) of the finite-t_bal rate."""
    if not ratio > 1.0:
        raise RegimeError(f"finite-t_bal correction needs t_bal/t_c > 1, got {ratio}")
    return 2.0 / beta_function(0.5, 0.75) / ratio


# Assembled current


def regime_label(ratio: float) -> str:
    """Reporting label only; never used inside a computation."""
    if ratio < QUASI_OHMIC_BELOW:
        return "quasi-ohmic"
    if ratio > SCHWINGER_ABOVE:
        return "schwinger"
    return "crossover"


def current(epsilon: float, t_bal: float, units: UnitSystem, quad: QuadratureConfig) -> CurrentResult:
    """Per-channel current density j = sigma_O eps + e n(t_bal) v_f."""
    cfg = region_config(units, epsilon, t_bal)
    power, est_O = _quasi_ohmic(cfg, quad)
    sigma = power / epsilon ** 2
    j_quasi = sigma * epsilon

    rate, rate_stderr = 0.0, None
    if cfg.ratio > 1.0:
        rate, est_S = _schwinger(cfg, quad)
        if quad.method == "monte-carlo":
            rate_stderr = creation_prefactor(cfg) * est_S.error

    density = rate * t_bal
    j_schwinger = units.e_charge * density * units.v_f
    power_stderr = quasi_ohmic_prefactor(cfg) * est_O.error if quad.method == "monte-carlo" else None

    result = CurrentResult(
        epsilon=epsilon,
        t_bal=t_bal,
        t_c=cfg.t_c,
        ratio=cfg.ratio,
        power_O=max(power, 0.0),
        sigma_O=max(sigma, 0.0),
        rate_S=max(rate, 0.0),
        carrier_density=max(density, 0.0),
        j_quasi=max(j_quasi, 0.0),
        j_schwinger=max(j_schwinger, 0.0),
        j_total=max(j_quasi, 0.0) + max(j_schwinger, 0.0),
        regime=regime_label(cfg.ratio),
        method=quad.method,
        model_extension=cfg.ratio > 1.0,
        combination=COMBINATION,
        power_O_stderr=power_stderr,
        rate_S_stderr=rate_stderr,
    )
    logger.debug(
        "j(eps=%g, t_bal=%g) = %.6g (%s)", epsilon, t_bal, result.j_total, result.regime
    )
    return result


def _sweep_cell(epsilon: float, t_bal: float, units: UnitSystem, quad: QuadratureConfig) -> SweepRow:
    try:
        t_c = crossover_time(units, epsilon)
    except DomainError:
        t_c = math.nan
    try:
        result = current(epsilon, t_bal, units, quad)
    except WeakCurrentError as e:
        logger.error("Sweep cell eps=%g t_bal=%g failed: %s", epsilon, t_bal, e)
        record_sweep_cell(False)
        return SweepRow(epsilon=epsilon, t_bal=t_bal, t_c=t_c, error=f"{error_kind(e)}:{e}")
    record_sweep_cell(True)
    return SweepRow(epsilon=epsilon, t_bal=t_bal, t_c=t_c, result=result)


def sweep(eps_grid: Sequence[float], tbal_grid: Sequence[float], units: UnitSystem,
          quad: QuadratureConfig, workers: Optional[int] = None) -> List[SweepRow]:
    """
    One row per (eps, t_bal), eps outer and t_bal inner.

    Failing cells carry their error in-row and the sweep continues. Cells run on
    a thread pool when workers > 1; rows come back in grid order regardless.
    """
    eps_grid, tbal_grid = list(eps_grid), list(tbal_grid)
    if not eps_grid or not tbal_grid:
        raise DomainError("sweep grids must be nonempty")
    workers = quad.workers if workers is None else workers
    cells = [(eps, t_bal) for eps in eps_grid for t_bal in tbal_grid]
    logger.info("Sweeping %d cells on %d worker(s)", len(cells), workers)

    if workers > 1 and len(cells) > 1:
        cell_quad = quad.copy(update={"workers": 1})
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda cell: _sweep_cell(cell[0], cell[1], units, cell_quad), cells))
    return [_sweep_cell(eps, t_bal, units, quad) for eps, t_bal in cells]
