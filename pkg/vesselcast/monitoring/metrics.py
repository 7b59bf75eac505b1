"""
Metrics collection for Prometheus monitoring.
"""

import logging
from typing import Dict

from prometheus_client import Counter, Gauge, Histogram, Info, start_http_server

logger = logging.getLogger(__name__)

# Ingestion metrics
records_ingested = Counter(
    "vesselcast_records_ingested_total",
    "AIS rows read, by outcome",
    ["outcome"],
)

# Preprocessing metrics
points_dropped = Counter(
    "vesselcast_points_dropped_total",
    "Points removed by a preprocessing stage",
    ["stage"],
)

trips_emitted = Counter(
    "vesselcast_trips_emitted_total",
    "Resampled trips produced",
)

# Training metrics
boosting_rounds = Counter(
    "vesselcast_boosting_rounds_total",
    "Boosting rounds completed",
    ["target"],
)

training_seconds = Gauge(
    "vesselcast_training_seconds",
    "Wall time of the last model fit",
)

# Inference metrics
inference_latency = Histogram(
    "vesselcast_inference_latency_us",
    "Per-record inference latency of a batch",
    buckets=[1, 5, 10, 25, 50, 100, 500, 1000],
)

positions_clamped = Counter(
    "vesselcast_positions_clamped_total",
    "Predicted positions clamped into valid coordinate ranges",
)

# Info metric
build_info = Info(
    "vesselcast",
    "Information about the running vesselcast build",
)


class MetricsCollector:
    """Collects and manages pipeline metrics."""

    def __init__(self):
        self._initialized = False

    def initialize(self, settings) -> None:
        """Publish build info and start the exporter when enabled."""
        from vesselcast import __version__

        build_info.info({
            "version": __version__,
            "rate_s": str(settings.prep.rate),
            "horizons": ",".join(str(h) for h in settings.horizons.horizons),
        })
        metrics = settings.monitoring.metrics
        if metrics.enabled:
            start_http_server(metrics.port, addr=metrics.host)
            logger.info(f"Metrics exporter listening on {metrics.host}:{metrics.port}")
        self._initialized = True

    def record_ingest(self, outcome: str, count: int = 1) -> None:
        """Record parsed rows by outcome (valid, malformed, out_of_range)."""
        if count > 0:
            records_ingested.labels(outcome=outcome).inc(count)

    def record_drops(self, drops: Dict[str, int]) -> None:
        """Record preprocessing drops keyed by stage name."""
        for stage, count in drops.items():
            if count > 0:
                points_dropped.labels(stage=stage).inc(count)

    def record_trips(self, count: int) -> None:
        if count > 0:
            trips_emitted.inc(count)

    def record_round(self, target: str) -> None:
        boosting_rounds.labels(target=target).inc()

    def record_training_time(self, seconds: float) -> None:
        training_seconds.set(seconds)

    def record_inference(self, per_record_us: float) -> None:
        inference_latency.observe(per_record_us)

    def record_clamped(self, count: int) -> None:
        if count > 0:
            positions_clamped.inc(count)
