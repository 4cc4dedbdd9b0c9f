# weakcurrent/tests/test_monitoring.py

from weakcurrent.models import QuadratureConfig
from weakcurrent.monitoring import (
    QUADRATURE_SECONDS,
    REGISTRY,
    TimerContextManager,
    record_sweep_cell,
    write_metrics,
)
from weakcurrent.quadrature import region_integral


def _sample(name, labels):
    return REGISTRY.get_sample_value(name, labels) or 0.0


def test_timer_records_duration(mocker):
    mocker.patch("weakcurrent.monitoring.time.perf_counter", side_effect=[10.0, 12.5])
    labels = {"method": "adaptive-polar", "region": "timer-test"}
    with TimerContextManager(QUADRATURE_SECONDS, labels) as timer:
        pass
    assert timer.duration == 2.5
    assert _sample("quadrature_seconds_sum", labels) == 2.5
    assert _sample("quadrature_seconds_count", labels) == 1.0


def test_region_integral_counts_evaluations(crossover_cfg):
    labels = {"method": "cartesian-strip", "region": "O"}
    before = _sample("quadrature_evaluations_total", labels)
    est = region_integral(crossover_cfg, "O", QuadratureConfig(method="cartesian-strip"))
    assert _sample("quadrature_evaluations_total", labels) == before + est.evaluations


def test_monte_carlo_counts_samples(crossover_cfg):
    before = _sample("mc_samples_drawn_total", {"region": "O"})
    region_integral(crossover_cfg, "O", QuadratureConfig(method="monte-carlo", mc_samples=5000))
    assert _sample("mc_samples_drawn_total", {"region": "O"}) == before + 5000


def test_write_metrics(tmp_path):
    record_sweep_cell(ok=False)
    path = tmp_path / "nested" / "metrics.prom"
    write_metrics(str(path))
    text = path.read_text()
    assert 'sweep_cells_total{outcome="error"}' in text
