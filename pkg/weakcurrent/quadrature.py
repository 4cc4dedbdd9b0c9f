# weakcurrent/quadrature.py

"""
Integration engines for the region kernel  I = integral over O or S of p_x / (p_x^2 + p_y^2).

adaptive-polar   radial integral done analytically (integrand cos(theta) after the
                 Jacobian), adaptive quad over theta with the kink angles as break points
cartesian-strip  p_y integral done analytically (arctan), adaptive quad over p_x
monte-carlo      seeded polar sampling with the region predicates as indicator
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from weakcurrent.config import MC_CHUNK_SIZE, QUAD_RETRY_ATTEMPTS
from weakcurrent.errors import DomainError, QuadratureConvergenceError
from weakcurrent.models import IntegralEstimate, QuadratureConfig, RegionConfig
from weakcurrent.momentum_regions import (
    in_B,
    in_F,
    in_V,
    polar_break_points,
    radial_limits,
    strip_break_points,
    strip_limits,
    strip_x_max,
    v_radius,
)
from weakcurrent.monitoring import (
    record_evaluations,
    record_mc_samples,
    record_retry,
    time_quadrature,
)

logger = logging.getLogger(__name__)

# GK21 rule: integrand evaluations per subinterval
EVALS_PER_INTERVAL = 21
BASE_LIMIT = 50
# quad rejects a purely relative tolerance tighter than ~50 machine epsilons
MIN_EPSREL = 1e-13

HALF_PI = 0.5 * math.pi


def adaptive_quad(func: Callable[[float], float], a: float, b: float, rel_tol: float,
                  max_evals: int, points: Optional[Sequence[float]] = None,
                  method: str = "adaptive-polar", region: str = "-") -> IntegralEstimate:
    """
    scipy quad with a purely relative tolerance.

    A non-converged run is retried with a doubled subdivision limit; the last
    failure raises QuadratureConvergenceError with the best estimate.
    """
    epsrel = max(rel_tol, MIN_EPSREL)
    limit_cap = max(max_evals // EVALS_PER_INTERVAL, BASE_LIMIT)
    points = list(points) if points else None
    evaluations = 0

    retrying = Retrying(
        stop=stop_after_attempt(QUAD_RETRY_ATTEMPTS),
        retry=retry_if_exception_type(QuadratureConvergenceError),
        reraise=True,
    )
    for attempt in retrying:
        with attempt:
            number = attempt.retry_state.attempt_number
            limit = min(BASE_LIMIT * 2 ** (number - 1), limit_cap)
            if number > 1:
                record_retry(method)
                logger.warning(
                    "%s quadrature over %s did not converge; retrying with limit=%d",
                    method, region, limit,
                )
            with time_quadrature(method, region):
                res = integrate.quad(
                    func, a, b, epsabs=0.0, epsrel=epsrel, limit=limit, points=points,
                    full_output=1,
                )
            value, abserr, info = res[0], res[1], res[2]
            evaluations += int(info.get("neval", 0))
            record_evaluations(method, region, int(info.get("neval", 0)))
            if len(res) > 3:
                raise QuadratureConvergenceError(
                    f"{method} quadrature over {region} did not reach rel_tol={rel_tol:g}: {res[3]}",
                    estimate=value,
                    error_bound=abserr,
                    evaluations=evaluations,
                )
    logger.debug("%s over %s: %.17g +- %.3g (%d evals)", method, region, value, abserr, evaluations)
    return IntegralEstimate(value=value, error=abserr, evaluations=evaluations, method=method)


# Deterministic engines


def polar_integrand(theta, cfg: RegionConfig, label: str):
    """cos(theta) * (r_hi - r_lo): the region kernel after the radial integration."""
    lo, hi = radial_limits(theta, cfg, label)
    return np.cos(theta) * (hi - lo)


def strip_integrand(p_x, cfg: RegionConfig, label: str):
    """2 [arctan(y_hi / p_x) - arctan(y_lo / p_x)]: the region kernel on the strip at p_x."""
    lo, hi = strip_limits(p_x, cfg, label)
    return 2.0 * (np.arctan2(hi, p_x) - np.arctan2(lo, p_x))


def adaptive_polar(cfg: RegionConfig, label: str, quad: QuadratureConfig) -> IntegralEstimate:
    return adaptive_quad(
        lambda theta: float(polar_integrand(theta, cfg, label)),
        -HALF_PI,
        HALF_PI,
        quad.rel_tol,
        quad.max_evals,
        points=polar_break_points(cfg),
        method="adaptive-polar",
        region=label,
    )


def cartesian_strip(cfg: RegionConfig, label: str, quad: QuadratureConfig) -> IntegralEstimate:
    x_max = strip_x_max(cfg, label)
    return adaptive_quad(
        lambda p_x: float(strip_integrand(p_x, cfg, label)),
        0.0,
        x_max,
        quad.rel_tol,
        quad.max_evals,
        points=strip_break_points(cfg, label),
        method="cartesian-strip",
        region=label,
    )


# Monte Carlo


def _chunk_sizes(samples: int, chunk_size: int):
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _mc_chunk(cfg: RegionConfig, label: str, seed: int, index: int, size: int) -> Tuple[float, float]:
    """Sum and sum of squares of the polar estimator over one chunk of the stream."""
    rng = np.random.Generator(np.random.Philox(seed).jumped(index))
    theta = rng.uniform(-HALF_PI, HALF_PI, size)
    reach = np.minimum(v_radius(theta, cfg), cfg.r_B)
    radius = reach * rng.random(size)
    p_x, p_y = radius * np.cos(theta), radius * np.sin(theta)

    inside = in_V(p_x, p_y, cfg) & in_B(p_x, p_y, cfg)
    inside &= in_F(p_x, p_y, cfg) if label == "O" else ~in_F(p_x, p_y, cfg)
    weight = np.where(inside, math.pi * reach * np.cos(theta), 0.0)
    return float(weight.sum()), float(np.square(weight).sum())


def monte_carlo(cfg: RegionConfig, label: str, quad: QuadratureConfig,
                chunk_size: int = MC_CHUNK_SIZE) -> IntegralEstimate:
    """
    Sample theta uniformly on (-pi/2, pi/2) and r uniformly on [0, R(theta)], R the
    V & B radial reach, weight pi R cos(theta) times the region indicator.

    Chunk i always draws from Philox(seed) jumped i times and chunk sums are
    reduced in chunk order, so the estimate does not depend on the worker count.
    Returns the mean with its standard error.
    """
    if label not in ("O", "S"):
        raise DomainError(f"unknown region {label!r}")
    sizes = _chunk_sizes(quad.mc_samples, chunk_size)

    with time_quadrature("monte-carlo", label):
        if quad.workers > 1 and len(sizes) > 1:
            with ThreadPoolExecutor(max_workers=quad.workers) as pool:
                sums = list(
                    pool.map(
                        lambda job: _mc_chunk(cfg, label, quad.seed, job[0], job[1]),
                        enumerate(sizes),
                    )
                )
        else:
            sums = [_mc_chunk(cfg, label, quad.seed, i, size) for i, size in enumerate(sizes)]

    n = quad.mc_samples
    total = math.fsum(s for s, _ in sums)
    total_sq = math.fsum(s2 for _, s2 in sums)
    mean = total / n
    variance = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    stderr = math.sqrt(variance / n)

    record_mc_samples(label, n)
    record_evaluations("monte-carlo", label, n)
    logger.debug("monte-carlo over %s: %.17g +- %.3g (%d samples)", label, mean, stderr, n)
    return IntegralEstimate(value=mean, error=stderr, evaluations=n, method="monte-carlo")


ENGINES = {
    "adaptive-polar": adaptive_polar,
    "cartesian-strip": cartesian_strip,
    "monte-carlo": monte_carlo,
}


def region_integral(cfg: RegionConfig, label: str, quad: QuadratureConfig) -> IntegralEstimate:
    """Integral of p_x / |p|^2 over region O or S with the configured engine."""
    if label not in ("O", "S"):
        raise DomainError(f"unknown region {label!r}")
    return ENGINES[quad.method](cfg, label, quad)
