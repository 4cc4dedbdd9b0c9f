# weakcurrent/dirac_weakvalue.py

"""
Chirality spinors of the massless 2+1D Dirac Hamiltonian H = v_f (sigma_x p_x + sigma_y p_y)
and weak values of the Pauli operators under pre/post-selection.

Band convention for the closed forms: pre-selection in the negative-energy
chirality at angle theta, post-selection in the positive-energy chirality at
angle theta'. That is the pair-creation transition (-E, (-p_x, p_y)) -> (E, (p_x, p_y)).
"""

import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from weakcurrent.errors import DomainError, NoTransitionError, SingularPostselectionError
from weakcurrent.models import ChiralitySpinor, MomentumPoint, UnitSystem, WeakVelocity
from weakcurrent.units import natural_units
from weakcurrent.utils import loglog_slope

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-12

IDENTITY = np.eye(2, dtype=complex)
PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_ALIASES = {
    alias: axis for axis in "xyz" for alias in (axis, f"sigma_{axis}", f"σ_{axis}")
}


def _pauli(observable: str) -> np.ndarray:
    try:
        return PAULI[_ALIASES[observable]]
    except KeyError:
        raise DomainError(f"unknown observable {observable!r}; expected sigma_x, sigma_y or sigma_z")


def make_spinor(theta: float, band: int) -> ChiralitySpinor:
    try:
        return ChiralitySpinor(theta=theta, band=band)
    except ValidationError as e:
        raise DomainError(str(e)) from e


def weak_value_vectors(pre: np.ndarray, post: np.ndarray, operator: np.ndarray,
                       tol: float = SINGULAR_TOL) -> complex:
    """<post|O|pre> / <post|pre> for raw 2-vectors."""
    bra = np.conj(post)
    overlap = bra @ pre
    if abs(overlap) <= tol:
        raise SingularPostselectionError(f"|<post|pre>| = {abs(overlap):.3e} is below {tol:g}")
    return complex((bra @ operator @ pre) / overlap)


def overlap(pre: ChiralitySpinor, post: ChiralitySpinor) -> complex:
    return complex(np.conj(post.components) @ pre.components)


def weak_value(pre: ChiralitySpinor, post: ChiralitySpinor, observable: str,
               tol: float = SINGULAR_TOL) -> complex:
    """Weak value by direct spinor algebra; the reference for every closed form below."""
    return weak_value_vectors(pre.components, post.components, _pauli(observable), tol)


def weak_value_closed_form(theta_pre: float, theta_post: float,
                           tol: float = SINGULAR_TOL) -> WeakVelocity:
    """
    Closed-form weak values for negative-band pre-selection at theta_pre and
    positive-band post-selection at theta_post.
    """
    half_diff = 0.5 * (theta_pre - theta_post)
    half_sum = 0.5 * (theta_pre + theta_post)
    s = math.sin(half_diff)
    if abs(s) <= tol:
        raise SingularPostselectionError(
            f"theta_pre = theta_post (mod 2pi): sin[(theta-theta')/2] = {s:.3e}"
        )
    return WeakVelocity(
        sigma_x_w=math.sin(half_sum) / s,
        sigma_y_w=-math.cos(half_sum) / s,
        sigma_z_w=complex(0.0, math.cos(half_diff) / s),
        overlap=complex(0.0, -s),
    )


def selection_angles(p: MomentumPoint) -> Tuple[float, float]:
    """(theta_pre, theta_post) for the transition (-p_x, p_y) -> (p_x, p_y), full-quadrant."""
    return math.atan2(p.p_y, -p.p_x), math.atan2(p.p_y, p.p_x)


def selected_weak_velocity(p: MomentumPoint, units: UnitSystem) -> WeakVelocity:
    """
    Weak velocity of the selected transition theta + theta' = +-pi.

    sigma_y_w is exactly zero there and sigma_x_w = |p| / p_x >= 1. With
    (theta - theta')/2 = +-pi/2 - phi, sin and cos of the half difference are
    +-p_x/|p| and +-p_y/|p|, so sigma_z_w = i p_y / p_x and the overlap follow
    from the momentum without subtracting nearly equal angles.
    """
    if not p.p_x > 0:
        raise NoTransitionError(f"a transition needs p_x > 0 (+x group velocity), got {p.p_x}")
    magnitude = p.magnitude
    # same branch as atan2(p_y, -p_x): -0.0 selects -pi
    branch = math.copysign(1.0, p.p_y)
    wv = WeakVelocity(
        sigma_x_w=magnitude / p.p_x,
        sigma_y_w=0.0,
        sigma_z_w=complex(0.0, p.p_y / p.p_x),
        overlap=complex(0.0, -branch * (p.p_x / magnitude)),
    )
    logger.debug(
        "Selected transition at p=(%g, %g): v_g = %g", p.p_x, p.p_y, wv.group_velocity(units)
    )
    return wv


def evolution_operator(p: MomentumPoint, t: float, units: UnitSystem) -> np.ndarray:
    """exp(-i H t / hbar) for H = v_f sigma.p, from the axis-angle formula."""
    magnitude = p.magnitude
    if magnitude == 0.0:
        return IDENTITY.copy()
    phase = units.v_f * magnitude * t / units.hbar
    axis = (p.p_x * PAULI["x"] + p.p_y * PAULI["y"]) / magnitude
    return math.cos(phase) * IDENTITY - 1j * math.sin(phase) * axis


def second_order_coefficient(p: MomentumPoint, pre: ChiralitySpinor, post: ChiralitySpinor,
                             units: UnitSystem) -> complex:
    """(H_w^2 - E^2) / (2 hbar^2): the t^2 coefficient of the factorised-propagator remainder."""
    h_w = units.v_f * (weak_value(pre, post, "x") * p.p_x + weak_value(pre, post, "y") * p.p_y)
    energy = p.energy(units)
    return (h_w ** 2 - energy ** 2) / (2.0 * units.hbar ** 2)


def verify_weak_propagator(p: MomentumPoint, theta_pre: float, theta_post: float,
                           times: Iterable[float],
                           units: Optional[UnitSystem] = None) -> List[Tuple[float, float]]:
    """
    Compare the exact post-selected amplitude with its weak-value factorisation.

    Returns (t, |exact - factorised|) for each t; the remainder is O(t^2).
    """
    units = units or natural_units()
    pre = make_spinor(theta_pre, -1)
    post = make_spinor(theta_post, +1)
    sx = weak_value(pre, post, "x")
    sy = weak_value(pre, post, "y")
    amplitude0 = overlap(pre, post)
    bra = np.conj(post.components)

    rows = []
    for t in times:
        if t < 0:
            raise DomainError(f"times must be non-negative, got {t}")
        exact = bra @ evolution_operator(p, t, units) @ pre.components
        factorised = amplitude0 * np.exp(-1j * units.v_f * (sx * p.p_x + sy * p.p_y) * t / units.hbar)
        rows.append((float(t), float(abs(exact - factorised))))
    return rows


def propagator_error_slope(p: MomentumPoint, theta_pre: float, theta_post: float,
                           units: Optional[UnitSystem] = None, t_lo: float = 1e-4,
                           t_hi: float = 1e-2, points: int = 9) -> float:
    """Fitted log-log slope of the remainder over t in [t_lo, t_hi] * hbar / E."""
    units = units or natural_units()
    energy = p.energy(units)
    if energy == 0.0:
        raise DomainError("the Dirac point has no evolution time scale")
    scale = units.hbar / energy
    times = np.geomspace(t_lo, t_hi, points) * scale
    rows = verify_weak_propagator(p, theta_pre, theta_post, times, units)
    return loglog_slope([t for t, _ in rows], [err for _, err in rows])
