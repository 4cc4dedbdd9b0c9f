# weakcurrent/tests/test_transition_kinematics.py

import math

import numpy as np
import pytest

from weakcurrent.dirac_weakvalue import selected_weak_velocity
from weakcurrent.errors import DomainError, NoTransitionError, UndefinedDirectionError
from weakcurrent.models import MomentumPoint
from weakcurrent.momentum_regions import in_V, region_config
from weakcurrent.transition_kinematics import (
    check_flux_consistency,
    kinematics,
    make_transition,
    transition_action,
    transition_probability,
)


def _spec(units, p_x, p_y, epsilon=1.0):
    return make_transition(MomentumPoint(p_x=p_x, p_y=p_y), units, epsilon)


def test_kinematics_on_axis(natural):
    k = kinematics(_spec(natural, 1.0, 0.0))
    assert (k.delta_E, k.delta_px, k.delta_t, k.delta_x, k.v_g, k.T) == (2.0, 2.0, 2.0, 2.0, 1.0, 1.0)


def test_kinematics_off_axis(natural):
    k = kinematics(_spec(natural, 1.0, 1.0))
    assert k.v_g == pytest.approx(math.sqrt(2), rel=1e-15)
    assert k.T == pytest.approx(0.5, rel=1e-15)


def test_kinematics_doubling_field_halves_times(natural):
    k = kinematics(_spec(natural, 1.0, 0.0, epsilon=2.0))
    assert k.delta_t == 1.0
    assert k.delta_x == 1.0


def test_kinematics_errors(natural):
    with pytest.raises(NoTransitionError):
        kinematics(_spec(natural, 0.0, 1.0))
    with pytest.raises(NoTransitionError):
        kinematics(_spec(natural, -1.0, 1.0))
    with pytest.raises(DomainError):
        _spec(natural, 1.0, 0.0, epsilon=0.0)


@pytest.mark.parametrize("p_x, p_y, expected", [(1, 0, 1.0), (1, 1, 0.5), (0, 1, 0.0), (-1, 1, 0.0)])
def test_transition_probability(p_x, p_y, expected):
    assert transition_probability(MomentumPoint(p_x=p_x, p_y=p_y)) == pytest.approx(expected, rel=1e-15)


def test_transition_probability_at_dirac_point():
    with pytest.raises(UndefinedDirectionError):
        transition_probability(MomentumPoint(p_x=0.0, p_y=0.0))


@pytest.mark.parametrize(
    "p_x, p_y, expected",
    [(1e-170, 1e-170, 0.5), (1e-170, 0.0, 1.0), (3e-200, 4e-200, 0.36), (1e-300, 1.0, 0.0)],
)
def test_transition_probability_tiny_momenta(p_x, p_y, expected):
    """Momenta whose squares underflow are still away from the Dirac point."""
    assert transition_probability(MomentumPoint(p_x=p_x, p_y=p_y)) == pytest.approx(
        expected, rel=1e-14, abs=1e-300
    )


@pytest.mark.parametrize("p_x", [1e-9, 1e-20])
def test_flux_consistency_grazing_momentum(natural, p_x):
    assert check_flux_consistency(MomentumPoint(p_x=p_x, p_y=1.0), natural) <= 1e-12


@pytest.mark.parametrize("p_x, p_y", [(1, 0), (1, 1), (1, 5)])
def test_flux_consistency_examples(natural, p_x, p_y):
    assert check_flux_consistency(MomentumPoint(p_x=p_x, p_y=p_y), natural) <= 1e-12


def test_kinematic_identities(natural):
    """
    Over 10^4 random momenta: T sigma_x_w = cos(theta_post), v_g = v_f sigma_x_w,
    Delta_E / Delta_x = Delta_px / Delta_t = e eps, and T is scale invariant.
    """
    rng = np.random.default_rng(7)
    for p_x, p_y in zip(rng.uniform(1e-3, 5.0, 10000), rng.uniform(-5.0, 5.0, 10000)):
        p = MomentumPoint(p_x=p_x, p_y=p_y)
        assert check_flux_consistency(p, natural) <= 1e-12

        k = kinematics(make_transition(p, natural, 1.5))
        wv = selected_weak_velocity(p, natural)
        assert abs(k.v_g - natural.v_f * wv.sigma_x_w) <= 1e-12 * max(1.0, k.v_g)
        assert k.delta_E / k.delta_x == pytest.approx(1.5, rel=1e-14)
        assert k.delta_px / k.delta_t == pytest.approx(1.5, rel=1e-14)

        scaled = MomentumPoint(p_x=3.0 * p_x, p_y=3.0 * p_y)
        assert transition_probability(scaled) == pytest.approx(k.T, rel=1e-14)


def test_kinematics_si(si):
    p = MomentumPoint(p_x=1e-27, p_y=0.0)
    k = kinematics(make_transition(p, si, 1e5))
    assert k.delta_t == pytest.approx(2e-27 / (si.e_charge * 1e5), rel=1e-14)
    assert k.v_g == pytest.approx(si.v_f, rel=1e-14)


def test_transition_action_matches_virtual_region(natural):
    """Delta_E Delta_t <= hbar exactly on V, away from the boundary."""
    rng = np.random.default_rng(11)
    epsilon = 2.0
    cfg = region_config(natural, epsilon, 1.0)
    for p_x, p_y in zip(rng.uniform(1e-3, 1.5, 2000), rng.uniform(-3.0, 3.0, 2000)):
        action = transition_action(_spec(natural, p_x, p_y, epsilon))
        if abs(action - 1.0) < 1e-9:
            continue
        assert (action <= 1.0) == bool(in_V(p_x, p_y, cfg))
