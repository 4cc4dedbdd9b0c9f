# weakcurrent/momentum_regions.py

"""
Momentum-space regions feeding the current integrals.

V  virtual-particle candidates   p_x^2 (p_x^2 + p_y^2) <= k_V^2
B  ballistic reachability        |p| <= r_B = e eps t_bal / 2
F  ballistic energy fluctuation  |p| <= r_F = hbar / (2 v_f t_bal)

O = V & B & F and S = (V & B) minus F, both restricted to p_x >= 0.
All boundaries are closed.
"""

import logging
import math
from typing import List, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError
from scipy import integrate, optimize

from weakcurrent.errors import DomainError
from weakcurrent.models import MomentumPoint, RegionConfig, RegionLabel, UnitSystem

logger = logging.getLogger(__name__)

REGIONS = ("O", "S")
CURVES = ("V", "B", "F")


def region_config(units: UnitSystem, epsilon: float, t_bal: float) -> RegionConfig:
    try:
        return RegionConfig(units=units, epsilon=epsilon, t_bal=t_bal)
    except ValidationError as e:
        raise DomainError(str(e)) from e


def fluctuation_scales(p: MomentumPoint, units: UnitSystem, t_bal: float) -> dict:
    """Lifetime hbar/2E, extent hbar/2p_x and ballistic energy fluctuation hbar/t_bal."""
    if not t_bal > 0:
        raise DomainError(f"t_bal must be > 0, got {t_bal}")
    energy = p.energy(units)
    with np.errstate(divide="ignore"):
        lifetime = units.hbar / np.float64(2.0 * energy)
        extent = units.hbar / np.float64(2.0 * abs(p.p_x))
    return {
        "delta_t": float(lifetime),
        "delta_x": float(extent),
        "delta_E_bal": units.hbar / t_bal,
    }


# Vectorised membership predicates


def in_V(p_x, p_y, cfg: RegionConfig):
    p_x = np.asarray(p_x, dtype=float)
    p_y = np.asarray(p_y, dtype=float)
    return p_x * p_x * (p_x * p_x + p_y * p_y) <= cfg.k_V ** 2


def in_B(p_x, p_y, cfg: RegionConfig):
    p_x = np.asarray(p_x, dtype=float)
    p_y = np.asarray(p_y, dtype=float)
    return p_x * p_x + p_y * p_y <= cfg.r_B ** 2


def in_F(p_x, p_y, cfg: RegionConfig):
    p_x = np.asarray(p_x, dtype=float)
    p_y = np.asarray(p_y, dtype=float)
    return p_x * p_x + p_y * p_y <= cfg.r_F ** 2


def within_ballistic_time(p_x, cfg: RegionConfig):
    """Delta_t <= t_bal, i.e. 0 <= p_x <= e eps t_bal / 2; implied by B on the half-plane."""
    p_x = np.asarray(p_x, dtype=float)
    return (p_x >= 0) & (p_x <= cfg.r_B)


def impulse_within_lifetime(p_x, p_y, cfg: RegionConfig):
    """Delta_t <= delta_t: the field delivers the impulse 2p_x within the lifetime hbar/2E."""
    units = cfg.units
    p_x = np.abs(np.asarray(p_x, dtype=float))
    p_y = np.asarray(p_y, dtype=float)
    with np.errstate(divide="ignore"):
        transit = 2.0 * p_x / cfg.force
        lifetime = units.hbar / (2.0 * units.v_f * np.hypot(p_x, p_y))
    return transit <= lifetime


def work_within_extent(p_x, p_y, cfg: RegionConfig):
    """Delta_x <= delta_x: the field does the work 2E within the extent hbar/2p_x."""
    units = cfg.units
    p_x = np.abs(np.asarray(p_x, dtype=float))
    p_y = np.asarray(p_y, dtype=float)
    with np.errstate(divide="ignore"):
        distance = 2.0 * units.v_f * np.hypot(p_x, p_y) / cfg.force
        extent = units.hbar / (2.0 * p_x)
    return distance <= extent


def _klass(p_x, v, b, f):
    half_plane = np.asarray(p_x) >= 0
    core = v & b & half_plane
    return np.where(core & f, "O", np.where(core & ~f, "S", "none"))


def classify(p: MomentumPoint, cfg: RegionConfig) -> RegionLabel:
    v = bool(in_V(p.p_x, p.p_y, cfg))
    b = bool(in_B(p.p_x, p.p_y, cfg))
    f = bool(in_F(p.p_x, p.p_y, cfg))
    klass = str(_klass(p.p_x, np.bool_(v), np.bool_(b), np.bool_(f)))
    return RegionLabel(in_V=v, in_B=b, in_F=f, klass=klass)


def classify_grid(p_x, p_y, cfg: RegionConfig) -> pd.DataFrame:
    """Classify paired coordinate arrays; one row per point."""
    p_x = np.asarray(p_x, dtype=float).ravel()
    p_y = np.asarray(p_y, dtype=float).ravel()
    v, b, f = in_V(p_x, p_y, cfg), in_B(p_x, p_y, cfg), in_F(p_x, p_y, cfg)
    return pd.DataFrame(
        {
            "p_x": p_x,
            "p_y": p_y,
            "in_V": v,
            "in_B": b,
            "in_F": f,
            "klass": _klass(p_x, v, b, f),
        }
    )


def lattice(cfg: RegionConfig, n: int, extent: float = None) -> Tuple[np.ndarray, np.ndarray]:
    """n x n lattice over p_x in [0, X], p_y in [-X, X]; X defaults to 1.25 sqrt(k_V)."""
    if n < 1:
        raise DomainError(f"grid size must be >= 1, got {n}")
    extent = 1.25 * math.sqrt(cfg.k_V) if extent is None else extent
    if not extent > 0:
        raise DomainError(f"grid extent must be > 0, got {extent}")
    px, py = np.meshgrid(np.linspace(0.0, extent, n), np.linspace(-extent, extent, n), indexing="ij")
    return px.ravel(), py.ravel()


# Boundaries


def v_boundary(p_x: float, cfg: RegionConfig) -> float:
    """Largest |p_y| inside V at the given p_x (the S-region strip limit)."""
    k_V = cfg.k_V
    if not 0.0 < p_x <= math.sqrt(k_V):
        raise DomainError(f"p_x must lie in (0, sqrt(k_V)] = (0, {math.sqrt(k_V):g}], got {p_x}")
    return math.sqrt(max(k_V ** 2 / p_x ** 2 - p_x ** 2, 0.0))


def sample_boundaries(cfg: RegionConfig, n: int) -> pd.DataFrame:
    """n points on each of the V curve and the B and F circles, for plotting."""
    if n < 2:
        raise DomainError(f"need at least 2 points per curve, got {n}")
    k_V = cfg.k_V
    r_max = 4.0 * math.sqrt(k_V)
    theta_max = math.acos(k_V / r_max ** 2)
    theta = np.linspace(-theta_max, theta_max, n)
    r_v = np.sqrt(k_V / np.cos(theta))
    phi = 2.0 * np.pi * np.arange(n) / n

    frames = [
        pd.DataFrame({"p_x": r_v * np.cos(theta), "p_y": r_v * np.sin(theta), "curve": "V"}),
        pd.DataFrame({"p_x": cfg.r_B * np.cos(phi), "p_y": cfg.r_B * np.sin(phi), "curve": "B"}),
        pd.DataFrame({"p_x": cfg.r_F * np.cos(phi), "p_y": cfg.r_F * np.sin(phi), "curve": "F"}),
    ]
    return pd.concat(frames, ignore_index=True)


# Integration limits shared by the quadrature engines


def _check_region(label: str):
    if label not in REGIONS:
        raise DomainError(f"unknown region {label!r}; expected one of {REGIONS}")


def v_radius(theta, cfg: RegionConfig):
    """Polar radius of the V boundary, sqrt(k_V / cos(theta)); infinite along the p_y axis."""
    cos_t = np.cos(np.asarray(theta, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        radius = np.sqrt(cfg.k_V / cos_t)
    return np.where(cos_t > 0, radius, np.inf)


def radial_limits(theta, cfg: RegionConfig, label: str):
    """(r_lo, r_hi) of region O or S along the ray at angle theta in [-pi/2, pi/2]."""
    _check_region(label)
    reach = np.minimum(v_radius(theta, cfg), cfg.r_B)
    if label == "O":
        return np.zeros_like(reach), np.minimum(reach, cfg.r_F)
    return np.full_like(reach, cfg.r_F), np.maximum(reach, cfg.r_F)


def polar_break_points(cfg: RegionConfig) -> List[float]:
    """Angles where the V curve meets the B or F circle."""
    points = set()
    for ratio in (cfg.r_F / cfg.r_B, cfg.r_B / cfg.r_F):
        if 0.0 < ratio < 1.0:
            angle = math.acos(ratio)
            points.update((-angle, angle))
    return sorted(points)


def strip_x_max(cfg: RegionConfig, label: str) -> float:
    _check_region(label)
    x_max = min(math.sqrt(cfg.k_V), cfg.r_B)
    return min(x_max, cfg.r_F) if label == "O" else x_max


def strip_limits(p_x, cfg: RegionConfig, label: str):
    """(y_lo, y_hi) of the |p_y| interval of region O or S on the strip at p_x > 0."""
    _check_region(label)
    p_x = np.asarray(p_x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        y_v = np.sqrt(np.clip(cfg.k_V ** 2 / (p_x * p_x) - p_x * p_x, 0.0, None))
    y_b = np.sqrt(np.clip(cfg.r_B ** 2 - p_x * p_x, 0.0, None))
    y_f = np.sqrt(np.clip(cfg.r_F ** 2 - p_x * p_x, 0.0, None))
    y_vb = np.minimum(y_v, y_b)
    if label == "O":
        return np.zeros_like(y_vb), np.minimum(y_vb, y_f)
    return y_f, np.maximum(y_vb, y_f)


def strip_break_points(cfg: RegionConfig, label: str) -> List[float]:
    x_max = strip_x_max(cfg, label)
    return sorted({x for x in (cfg.r_F, cfg.r_B) if 0.0 < x < x_max})


# Geometry


def region_area(cfg: RegionConfig, label: str) -> float:
    """Lebesgue area of region O or S."""
    _check_region(label)

    def integrand(theta):
        lo, hi = radial_limits(theta, cfg, label)
        return 0.5 * float(hi * hi - lo * lo)

    points = polar_break_points(cfg) or None
    area, _ = integrate.quad(integrand, -0.5 * math.pi, 0.5 * math.pi, points=points, limit=200)
    return area


def tangency_gap(cfg: RegionConfig) -> Tuple[float, float]:
    """
    Minimise the relative V slack 1 - (r_B^2 cos(phi) / k_V)^2 over the half B circle.

    Returns (phi, slack) at the minimum. The slack is non-negative everywhere iff
    B lies inside V, and its minimum touches zero at phi = 0 when t_bal = t_c.
    """
    scale = cfg.r_B ** 2 / cfg.k_V

    def slack(phi):
        return 1.0 - (scale * math.cos(phi)) ** 2

    res = optimize.minimize_scalar(
        slack, bounds=(-0.5 * math.pi, 0.5 * math.pi), method="bounded", options={"xatol": 1e-10}
    )
    return float(res.x), float(res.fun)


def rejection_containment(cfg: RegionConfig, n: int, seed: int = 0) -> int:
    """Number of uniform samples of the B half-disk (p_x >= 0) that fall outside V."""
    rng = np.random.default_rng(seed)
    radius = cfg.r_B * np.sqrt(rng.random(n))
    phi = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, n)
    p_x, p_y = radius * np.cos(phi), radius * np.sin(phi)
    violations = int(np.count_nonzero(~in_V(p_x, p_y, cfg)))
    if violations:
        logger.info("%d of %d B samples fall outside V at t_bal/t_c = %.3g", violations, n, cfg.ratio)
    return violations
