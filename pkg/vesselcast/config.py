"""
Configuration management for Vesselcast.

Loads configuration from environment variables and config.yaml.
"""

import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from vesselcast.errors import ConfigError


# ============================================================================
# Configuration Models
# ============================================================================

class PrepConfig(BaseModel):
    """Trajectory cleaning and resampling thresholds."""
    s_min: float = 1.0  # knots
    s_max: float = 50.0  # knots
    gap_max: int = 2700  # seconds
    length_min: int = 30  # raw points
    d_min: float = 1852.0  # meters
    rate: int = 90  # seconds

    @model_validator(mode="after")
    def _check_ranges(self) -> "PrepConfig":
        if not 0 <= self.s_min < self.s_max:
            raise ValueError("require 0 <= s_min < s_max")
        if not self.gap_max > self.rate > 0:
            raise ValueError("require gap_max > rate > 0")
        if self.length_min < 2:
            raise ValueError("length_min must be >= 2")
        if self.d_min <= 0:
            raise ValueError("d_min must be > 0")
        return self


class GbdtParams(BaseModel):
    """Boosting hyperparameters."""
    n_estimators: int = 750
    learning_rate: float = 0.01
    max_depth: int = 12
    n_bins: int = 256
    lambda_: float = 1.0
    gamma: float = 0.0
    min_child_weight: float = 1.0

    @model_validator(mode="after")
    def _check_ranges(self) -> "GbdtParams":
        if self.n_estimators < 0:
            raise ValueError("n_estimators must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not 2 <= self.n_bins <= 256:
            raise ValueError("n_bins must be within [2, 256]")
        if self.lambda_ < 0 or self.gamma < 0 or self.min_child_weight < 0:
            raise ValueError("lambda, gamma and min_child_weight must be >= 0")
        return self


class HorizonSet(BaseModel):
    """Prediction horizons in minutes."""
    horizons: List[int] = Field(default_factory=lambda: [10, 20, 30, 40, 50, 60])

    @field_validator("horizons")
    @classmethod
    def _ascending(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("at least one horizon is required")
        if any(h <= 0 for h in value):
            raise ValueError("horizons must be positive")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("horizons must be strictly ascending")
        return value


class SplitConfig(BaseModel):
    """Chronological train/test split."""
    train_fraction: float = 0.8

    @field_validator("train_fraction")
    @classmethod
    def _open_interval(cls, value: float) -> float:
        if not 0 < value < 1:
            raise ValueError("train_fraction must be within (0, 1)")
        return value


class ColumnMapping(BaseModel):
    """Names of the AIS CSV columns (defaults follow the Brest nari_dynamic schema)."""
    vessel_id: str = "sourcemmsi"
    timestamp: str = "t"
    lon: str = "lon"
    lat: str = "lat"
    vessel_type: Optional[str] = None
    timestamp_unit: str = "s"

    @field_validator("timestamp_unit")
    @classmethod
    def _unit(cls, value: str) -> str:
        if value not in ("s", "ms"):
            raise ValueError("timestamp_unit must be 's' or 'ms'")
        return value


class BenchConfig(BaseModel):
    """Throughput benchmark protocol."""
    batch_sizes: List[int] = Field(default_factory=lambda: [10000, 100000])
    repetitions: int = 3
    warmup_fraction: float = 0.5
    single_worker: bool = True

    @model_validator(mode="after")
    def _check(self) -> "BenchConfig":
        if self.repetitions < 3:
            raise ValueError("repetitions must be >= 3 (median-of-3 protocol)")
        if not 0 <= self.warmup_fraction < 1:
            raise ValueError("warmup_fraction must be within [0, 1)")
        return self


GRID_AXES = ("rate", "learning_rate", "max_depth", "n_estimators")


class GridConfig(BaseModel):
    """Default candidate values for the one-axis-at-a-time sweeps."""
    parallel: bool = False
    candidates: Dict[str, List[float]] = Field(
        default_factory=lambda: {
            "rate": [30, 60, 90, 120, 150],
            "max_depth": [6, 9, 12, 15, 18],
            "learning_rate": [0.001, 0.005, 0.01, 0.05, 0.1],
            "n_estimators": [500, 625, 750, 875, 1000],
        }
    )


class RuntimeConfig(BaseModel):
    """Worker pool sizing."""
    threads: Optional[int] = None

    @field_validator("threads")
    @classmethod
    def _positive(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("threads must be >= 1")
        return value

    def worker_count(self) -> int:
        return self.threads or os.cpu_count() or 1


class MetricsConfig(BaseModel):
    """Metrics configuration."""
    enabled: bool = False
    host: str = "0.0.0.0"
    port: int = 9305


class MonitoringConfig(BaseModel):
    """Monitoring configuration."""
    log_level: str = "INFO"
    structured_logging: bool = False
    metrics: MetricsConfig = Field(default_factory=MetricsConfig)


def _default_presets() -> Dict[str, ColumnMapping]:
    return {
        "brest": ColumnMapping(),
        "piraeus": ColumnMapping(vessel_id="vessel_id", timestamp_unit="ms"),
    }


class Settings(BaseSettings):
    """Main settings class that combines all configuration sections."""

    prep: PrepConfig = Field(default_factory=PrepConfig)
    gbdt: GbdtParams = Field(default_factory=GbdtParams)
    horizons: HorizonSet = Field(default_factory=HorizonSet)
    split: SplitConfig = Field(default_factory=SplitConfig)
    columns: ColumnMapping = Field(default_factory=ColumnMapping)
    datasets: Dict[str, ColumnMapping] = Field(default_factory=_default_presets)
    bench: BenchConfig = Field(default_factory=BenchConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    runtime: RuntimeConfig = Field(default_factory=RuntimeConfig)
    monitoring: MonitoringConfig = Field(default_factory=MonitoringConfig)

    model_config = SettingsConfigDict(
        env_prefix="VESSELCAST_",
        env_nested_delimiter="__",
        extra="ignore",
    )


# ============================================================================
# Configuration Loader
# ============================================================================

def load_config(config_path: Optional[str] = None) -> Settings:
    """
    Load configuration from YAML file and environment variables.

    Args:
        config_path: Path to config.yaml file. If None, looks in current directory.

    Returns:
        Settings object with all configuration loaded.

    Raises:
        ConfigError: if a value violates its section's invariants.
    """
    from dotenv import load_dotenv
    load_dotenv()

    if config_path is None:
        search_paths = [
            Path.cwd() / "config.yaml",
            Path(__file__).parent.parent / "config.yaml",
        ]
        for path in search_paths:
            if path.exists():
                config_path = str(path)
                break

    config_data: Dict[str, Any] = {}
    if config_path:
        if not Path(config_path).exists():
            raise ConfigError(f"config file not found: {config_path}")
        with open(config_path, "r", encoding="utf-8") as f:
            config_data = yaml.safe_load(f) or {}

    # Init kwargs outrank the environment in BaseSettings, so environment
    # overrides are folded into the file sections before construction.
    merged: Dict[str, Any] = {}
    for section, values in config_data.items():
        if section not in Settings.model_fields:
            continue
        if isinstance(values, dict):
            merged[section] = _deep_merge(values, _env_section_overrides(section))
        else:
            merged[section] = values

    try:
        settings = Settings(**merged)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e

    threads = os.getenv("FLPXR_THREADS")
    if threads:
        try:
            settings.runtime = RuntimeConfig(threads=int(threads))
        except (ValueError, ValidationError) as e:
            raise ConfigError(f"FLPXR_THREADS must be a positive integer, got {threads!r}") from e

    return settings


def _env_section_overrides(section: str) -> Dict[str, Any]:
    """Collect VESSELCAST_<SECTION>__<KEY> variables for one section."""
    prefix = f"VESSELCAST_{section.upper()}__"
    overrides: Dict[str, Any] = {}
    for key, value in os.environ.items():
        if not key.upper().startswith(prefix):
            continue
        path = key[len(prefix):].lower().split("__")
        node = overrides
        for part in path[:-1]:
            node = node.setdefault(part, {})
        node[path[-1]] = yaml.safe_load(value)
    return overrides


def _deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def validate_config(settings: Settings) -> List[str]:
    """
    Validate cross-section consistency and return list of errors.

    Args:
        settings: Settings object to validate.

    Returns:
        List of error messages (empty if valid).
    """
    errors = []

    # Horizons must reach beyond one resampling step
    smallest = settings.horizons.horizons[0] * 60
    if smallest <= settings.prep.rate:
        errors.append(
            f"smallest horizon ({smallest}s) must exceed the resampling rate ({settings.prep.rate}s)"
        )

    # Benchmark batches
    sizes = settings.bench.batch_sizes
    if not sizes or any(s <= 0 for s in sizes):
        errors.append("bench batch sizes must be positive")
    elif len(set(sizes)) != len(sizes):
        errors.append("bench batch sizes must be unique")

    # Grid candidates
    for axis, values in settings.grid.candidates.items():
        if axis not in GRID_AXES:
            errors.append(f"unknown grid axis in config: {axis}")
        elif not values:
            errors.append(f"grid axis {axis} has no candidates")

    return errors


def resolve_columns(settings: Settings, preset: Optional[str]) -> ColumnMapping:
    """Return the column mapping for a dataset preset, or the configured default."""
    if preset is None:
        return settings.columns
    if preset not in settings.datasets:
        known = ", ".join(sorted(settings.datasets))
        raise ConfigError(f"unknown dataset preset {preset!r} (known: {known})")
    return settings.datasets[preset]
