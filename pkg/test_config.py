"""Tests for configuration loading, overrides and validation."""

import logging

import orjson
import pytest
from prometheus_client import REGISTRY

from vesselcast.config import (
    BenchConfig,
    HorizonSet,
    PrepConfig,
    Settings,
    load_config,
    resolve_columns,
    validate_config,
)
from vesselcast.errors import ConfigError
from vesselcast.monitoring import MetricsCollector, configure_logging

CONFIG = """
prep:
  rate: 60
gbdt:
  max_depth: 6
horizons:
  horizons: [5, 10]
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(CONFIG)
    return path


def test_yaml_sections_load(config_file):
    settings = load_config(str(config_file))
    assert settings.prep.rate == 60
    assert settings.prep.s_max == 50.0
    assert settings.gbdt.max_depth == 6
    assert settings.gbdt.n_estimators == 750
    assert settings.horizons.horizons == [5, 10]


def test_environment_overrides_file(config_file, monkeypatch):
    monkeypatch.setenv("VESSELCAST_GBDT__MAX_DEPTH", "9")
    monkeypatch.setenv("VESSELCAST_PREP__S_MIN", "0.5")
    settings = load_config(str(config_file))
    assert settings.gbdt.max_depth == 9
    assert settings.prep.s_min == 0.5


def test_thread_count_from_environment(config_file, monkeypatch):
    monkeypatch.setenv("FLPXR_THREADS", "3")
    assert load_config(str(config_file)).runtime.worker_count() == 3
    monkeypatch.setenv("FLPXR_THREADS", "zero")
    with pytest.raises(ConfigError):
        load_config(str(config_file))


def test_bad_values_are_config_errors(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("prep:\n  rate: 3000\n")  # not below gap_max
    with pytest.raises(ConfigError):
        load_config(str(path))
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.yaml"))


def test_cross_section_validation():
    assert validate_config(Settings()) == []
    settings = Settings(prep=PrepConfig(rate=900), horizons=HorizonSet(horizons=[10, 20]))
    errors = validate_config(settings)
    assert any("horizon" in e for e in errors)
    settings = Settings(bench=BenchConfig(batch_sizes=[10, 10]))
    assert validate_config(settings) == ["bench batch sizes must be unique"]


def test_horizons_must_ascend():
    with pytest.raises(ValueError):
        HorizonSet(horizons=[20, 10])
    with pytest.raises(ValueError):
        HorizonSet(horizons=[])


def test_dataset_presets():
    settings = Settings()
    assert resolve_columns(settings, None).vessel_id == "sourcemmsi"
    piraeus = resolve_columns(settings, "piraeus")
    assert piraeus.vessel_id == "vessel_id" and piraeus.timestamp_unit == "ms"
    with pytest.raises(ConfigError):
        resolve_columns(settings, "kiel")


def test_json_logs_go_to_stderr(capsys):
    configure_logging("INFO", structured=True)
    logging.getLogger("vesselcast.test").info("Wrote 3 trips")
    captured = capsys.readouterr()
    assert captured.out == ""
    event = orjson.loads(captured.err.strip().splitlines()[-1])
    assert event["event"] == "Wrote 3 trips"
    assert event["level"] == "info"
    configure_logging("WARNING")


def test_metrics_recorders_accept_pipeline_events():
    metrics = MetricsCollector()
    metrics.initialize(Settings())
    clamped = lambda: REGISTRY.get_sample_value("vesselcast_positions_clamped_total") or 0.0  # noqa: E731
    dropped = lambda: REGISTRY.get_sample_value("vesselcast_points_dropped_total", {"stage": "duplicates"}) or 0.0  # noqa: E731
    before_clamped, before_dropped = clamped(), dropped()
    metrics.record_drops({"duplicates": 2, "outliers": 0})
    metrics.record_clamped(1)
    metrics.record_clamped(0)
    assert clamped() == before_clamped + 1
    assert dropped() == before_dropped + 2
    metrics.record_training_time(1.5)
    assert REGISTRY.get_sample_value("vesselcast_training_seconds") == 1.5
