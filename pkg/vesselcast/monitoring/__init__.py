
from vesselcast.monitoring.logs import configure_logging
from vesselcast.monitoring.metrics import MetricsCollector

__all__ = [
    "MetricsCollector",
    "configure_logging",
]
