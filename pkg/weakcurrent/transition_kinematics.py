# weakcurrent/transition_kinematics.py

import logging
import math

from pydantic import ValidationError

from weakcurrent.dirac_weakvalue import selected_weak_velocity, selection_angles
from weakcurrent.errors import DomainError, NoTransitionError, UndefinedDirectionError
from weakcurrent.models import MomentumPoint, TransitionKinematics, TransitionSpec, UnitSystem

logger = logging.getLogger(__name__)


def make_transition(p: MomentumPoint, units: UnitSystem, epsilon: float) -> TransitionSpec:
    if not epsilon > 0:
        raise DomainError(f"field strength must be > 0, got {epsilon}")
    try:
        return TransitionSpec(p=p, units=units, epsilon=epsilon)
    except ValidationError as e:
        raise DomainError(str(e)) from e


def transition_probability(p: MomentumPoint) -> float:
    """
    T = cos^2(theta_post) = p_x^2 / (p_x^2 + p_y^2).

    States with p_x <= 0 have no +x-velocity initial state and get T = 0, so T
    can weight integrals over the whole plane.
    """
    magnitude = p.magnitude
    if magnitude == 0.0:
        raise UndefinedDirectionError("transition probability is undefined at the Dirac point")
    if p.p_x <= 0:
        return 0.0
    # ratio first: p_x^2 + p_y^2 underflows long before hypot does
    return (p.p_x / magnitude) ** 2


def kinematics(spec: TransitionSpec) -> TransitionKinematics:
    """Work/impulse bookkeeping of the creation transition in field epsilon."""
    p, units = spec.p, spec.units
    if not p.p_x > 0:
        raise NoTransitionError(f"a transition needs p_x > 0, got {p.p_x}")
    if not spec.epsilon > 0:
        raise DomainError(f"field strength must be > 0, got {spec.epsilon}")

    force = units.e_charge * spec.epsilon
    delta_E = 2.0 * p.energy(units)
    delta_px = 2.0 * p.p_x
    return TransitionKinematics(
        delta_E=delta_E,
        delta_px=delta_px,
        delta_t=delta_px / force,
        delta_x=delta_E / force,
        v_g=delta_E / delta_px,
        T=transition_probability(p),
    )


def check_flux_consistency(p: MomentumPoint, units: UnitSystem) -> float:
    """|T v_f <sigma_x>_w - v_f cos(theta_post)|; vanishes for the selected transition."""
    wv = selected_weak_velocity(p, units)
    _, theta_post = selection_angles(p)
    residual = abs(
        transition_probability(p) * units.v_f * wv.sigma_x_w - units.v_f * math.cos(theta_post)
    )
    if residual > 1e-12 * units.v_f:
        logger.warning("Flux consistency residual %.3e at p=(%g, %g)", residual, p.p_x, p.p_y)
    return residual


def transition_action(spec: TransitionSpec) -> float:
    """
    Delta_E * Delta_t / hbar.

    The weak-value factorisation keeps its second-order term below the first
    while this is <= 1, which is exactly membership of the virtual-particle region V.
    """
    k = kinematics(spec)
    return k.delta_E * k.delta_t / spec.units.hbar
