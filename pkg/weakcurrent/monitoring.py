# weakcurrent/monitoring.py

import logging
import time

from prometheus_client import (
    CollectorRegistry,
    Counter,
    Histogram,
    write_to_textfile,
)

from weakcurrent.utils import ensure_parent_dir_exists

logger = logging.getLogger(__name__)

# Dedicated registry so a metrics dump holds only the numerical workload
REGISTRY = CollectorRegistry()

QUADRATURE_SECONDS = Histogram(
    "quadrature_seconds", "Time spent integrating a region", ["method", "region"], registry=REGISTRY
)

QUADRATURE_EVALUATIONS = Counter(
    "quadrature_evaluations", "Integrand evaluations", ["method", "region"], registry=REGISTRY
)

QUADRATURE_RETRIES = Counter(
    "quadrature_retries", "Quadrature reruns with a raised subdivision limit", ["method"],
    registry=REGISTRY,
)

SWEEP_CELLS = Counter(
    "sweep_cells", "Sweep cells evaluated", ["outcome"], registry=REGISTRY
)

MC_SAMPLES_DRAWN = Counter(
    "mc_samples_drawn", "Monte Carlo samples drawn", ["region"], registry=REGISTRY
)


class TimerContextManager:
    """Context manager for timing operations and recording in Prometheus metrics."""

    def __init__(self, metric, labels=None):
        self.metric = metric
        self.labels = labels or {}
        self.start_time = None
        self.duration = None

    def __enter__(self):
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.start_time is not None:
            self.duration = time.perf_counter() - self.start_time
            if self.labels:
                self.metric.labels(**self.labels).observe(self.duration)
            else:
                self.metric.observe(self.duration)


def time_quadrature(method: str, region: str) -> TimerContextManager:
    """Time one region integral."""
    return TimerContextManager(QUADRATURE_SECONDS, {"method": method, "region": region})


def record_evaluations(method: str, region: str, count: int):
    if count > 0:
        QUADRATURE_EVALUATIONS.labels(method=method, region=region).inc(count)


def record_retry(method: str):
    QUADRATURE_RETRIES.labels(method=method).inc()


def record_sweep_cell(ok: bool):
    SWEEP_CELLS.labels(outcome="ok" if ok else "error").inc()


def record_mc_samples(region: str, count: int):
    MC_SAMPLES_DRAWN.labels(region=region).inc(count)


def write_metrics(path: str):
    """Dump the registry in Prometheus text exposition format."""
    ensure_parent_dir_exists(path)
    write_to_textfile(path, REGISTRY)
    logger.info("Wrote metrics to %s", path)
