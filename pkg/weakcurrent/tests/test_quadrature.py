# weakcurrent/tests/test_quadrature.py

import math

import numpy as np
import pytest

from weakcurrent.config import QUAD_RETRY_ATTEMPTS
from weakcurrent.errors import DomainError, QuadratureConvergenceError
from weakcurrent.models import QuadratureConfig
from weakcurrent.momentum_regions import region_config
from weakcurrent.monitoring import REGISTRY
from weakcurrent.quadrature import (
    adaptive_quad,
    monte_carlo,
    polar_integrand,
    region_integral,
    strip_integrand,
)

# B(1/2, 3/4)
BETA = math.gamma(0.5) * math.gamma(0.75) / math.gamma(1.25)

FAILED = (1.0, 0.5, {"neval": 21}, "The maximum number of subdivisions (50) has been achieved.")


@pytest.mark.parametrize("method", ["adaptive-polar", "cartesian-strip"])
@pytest.mark.parametrize("t_bal, expected", [(0.1, 0.1), (0.5, 0.5), (1.0, 1.0), (4.0, 0.25)])
def test_o_kernel_closed_form(natural, method, t_bal, expected):
    """O is the B half-disk (2 r_B) up to t_c and the F half-disk (2 r_F) beyond."""
    est = region_integral(region_config(natural, 1.0, t_bal), "O", QuadratureConfig(method=method))
    assert est.value == pytest.approx(expected, rel=1e-9)
    assert est.evaluations > 0
    assert est.method == method


@pytest.mark.parametrize("ratio", [10.0, 100.0, 1000.0])
def test_s_kernel_engines_agree(natural, ratio):
    cfg = region_config(natural, 1.0, ratio)
    polar = region_integral(cfg, "S", QuadratureConfig(method="adaptive-polar", rel_tol=1e-11))
    strip = region_integral(cfg, "S", QuadratureConfig(method="cartesian-strip", rel_tol=1e-11))
    assert polar.value == pytest.approx(strip.value, rel=1e-9)
    # sqrt(k_V) (B - 2 t_c / t_bal) up to O((t_c / t_bal)^3)
    assert polar.value == pytest.approx(0.5 * (BETA - 2.0 / ratio), rel=1.0 / ratio ** 3)


def test_s_kernel_empty_below_crossover(natural):
    est = region_integral(region_config(natural, 1.0, 0.5), "S", QuadratureConfig())
    assert est.value == 0.0


def test_integrands_are_non_negative(schwinger_cfg):
    thetas = np.linspace(-1.57, 1.57, 301)
    assert (polar_integrand(thetas, schwinger_cfg, "S") >= 0).all()
    assert (polar_integrand(thetas, schwinger_cfg, "O") >= 0).all()
    xs = np.linspace(1e-4, 0.5, 301)
    assert (strip_integrand(xs, schwinger_cfg, "S") >= 0).all()


def test_unknown_region(crossover_cfg):
    with pytest.raises(DomainError):
        region_integral(crossover_cfg, "V", QuadratureConfig())
    with pytest.raises(DomainError):
        monte_carlo(crossover_cfg, "X", QuadratureConfig(method="monte-carlo"))


def test_adaptive_quad_raises_after_retries(mocker):
    """Each retry doubles the subdivision limit; the last failure keeps the best estimate."""
    quad = mocker.patch("weakcurrent.quadrature.integrate.quad", return_value=FAILED)
    with pytest.raises(QuadratureConvergenceError) as excinfo:
        adaptive_quad(math.cos, 0.0, 1.0, 1e-9, 200000)

    assert quad.call_count == QUAD_RETRY_ATTEMPTS
    limits = [call.kwargs["limit"] for call in quad.call_args_list]
    assert limits == [50 * 2 ** i for i in range(QUAD_RETRY_ATTEMPTS)]
    assert excinfo.value.estimate == 1.0
    assert excinfo.value.error_bound == 0.5
    assert excinfo.value.evaluations == 21 * QUAD_RETRY_ATTEMPTS


def test_adaptive_quad_recovers_on_retry(mocker):
    before = REGISTRY.get_sample_value("quadrature_retries_total", {"method": "cartesian-strip"}) or 0.0
    mocker.patch(
        "weakcurrent.quadrature.integrate.quad",
        side_effect=[FAILED, (2.0, 1e-12, {"neval": 63})],
    )
    est = adaptive_quad(math.cos, 0.0, 1.0, 1e-9, 200000, method="cartesian-strip", region="S")
    assert est.value == 2.0
    assert est.evaluations == 84
    after = REGISTRY.get_sample_value("quadrature_retries_total", {"method": "cartesian-strip"})
    assert after == before + 1


def test_adaptive_quad_clamps_tolerance(mocker):
    """A purely relative tolerance below quad's floor is raised to it."""
    quad = mocker.patch("weakcurrent.quadrature.integrate.quad", return_value=(1.0, 0.0, {"neval": 21}))
    adaptive_quad(math.cos, 0.0, 1.0, 1e-20, 200000)
    assert quad.call_args.kwargs["epsrel"] == 1e-13
    assert quad.call_args.kwargs["epsabs"] == 0.0


def test_monte_carlo_independent_of_workers(natural):
    """Chunk streams are fixed by the seed, so the worker count cannot change the estimate."""
    cfg = region_config(natural, 1.0, 50.0)
    single = monte_carlo(cfg, "S", QuadratureConfig(method="monte-carlo", mc_samples=200000, seed=3))
    pooled = monte_carlo(
        cfg, "S", QuadratureConfig(method="monte-carlo", mc_samples=200000, seed=3, workers=4)
    )
    assert single == pooled
    other = monte_carlo(cfg, "S", QuadratureConfig(method="monte-carlo", mc_samples=200000, seed=4))
    assert other.value != single.value


def test_monte_carlo_uneven_chunks(crossover_cfg):
    est = monte_carlo(
        crossover_cfg, "O", QuadratureConfig(method="monte-carlo", mc_samples=1001), chunk_size=100
    )
    assert est.evaluations == 1001
    assert est.error > 0


@pytest.mark.slow
@pytest.mark.parametrize("t_bal, label", [(0.5, "O"), (100.0, "S")])
def test_monte_carlo_within_three_standard_errors(natural, t_bal, label):
    cfg = region_config(natural, 1.0, t_bal)
    reference = region_integral(cfg, label, QuadratureConfig(rel_tol=1e-10))
    est = region_integral(
        cfg, label, QuadratureConfig(method="monte-carlo", mc_samples=1000000, seed=20140901)
    )
    assert est.evaluations == 1000000
    assert abs(est.value - reference.value) <= 3 * est.error
