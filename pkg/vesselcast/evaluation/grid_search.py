"""
One-axis-at-a-time hyperparameter sweeps around a fixed base model.

Each candidate value replaces one knob of the base configuration; every other
knob stays at its base value. Sweeping ``rate`` re-runs preprocessing for each
value, so it needs the raw vessel records rather than prepared trips.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import pandas as pd
from pydantic import ValidationError

from vesselcast.bench.harness import measure_inference_us
from vesselcast.config import GRID_AXES, GbdtParams, PrepConfig, SplitConfig
from vesselcast.errors import ConfigError, VesselcastError
from vesselcast.evaluation.report import train_and_evaluate
from vesselcast.features import build_training_set
from vesselcast.gbdt import model_size_bytes
from vesselcast.ingest import AisRecord, PoiIndex
from vesselcast.io_utils import atomic_output
from vesselcast.prep import Trip, preprocess_fleet

logger = logging.getLogger(__name__)

AXIS_ALIASES = {
    "rate": "rate",
    "sr": "rate",
    "lr": "learning_rate",
    "learning_rate": "learning_rate",
    "depth": "max_depth",
    "max_depth": "max_depth",
    "rounds": "n_estimators",
    "boosters": "n_estimators",
    "n_estimators": "n_estimators",
}

INTEGER_AXES = {"rate", "max_depth", "n_estimators"}


def normalize_axis(name: str) -> str:
    """Map a CLI axis spelling to its canonical name; unknown names raise ConfigError."""
    axis = AXIS_ALIASES.get(name.strip().lower())
    if axis is None:
        raise ConfigError(f"unknown grid axis {name!r} (known: {', '.join(GRID_AXES)})")
    return axis


@dataclass
class GridSpec:
    """A sweep over one axis with every other knob held at its base value."""
    axis: str
    values: List[float]
    base: GbdtParams = field(default_factory=GbdtParams)

    def __post_init__(self) -> None:
        self.axis = normalize_axis(self.axis)
        if not self.values:
            raise ConfigError(f"grid axis {self.axis} has no candidate values")
        if self.axis in INTEGER_AXES:
            self.values = [int(v) for v in self.values]
        else:
            self.values = [float(v) for v in self.values]


@dataclass
class GridRow:
    axis: str
    value: float
    model_size_bytes: Optional[int] = None
    inference_us: Optional[float] = None
    training_s: Optional[float] = None
    errors: Dict[int, Optional[float]] = field(default_factory=dict)
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def _params_for(spec: GridSpec, value) -> GbdtParams:
    if spec.axis == "rate":
        return spec.base
    data = spec.base.model_dump()
    data[spec.axis] = value
    try:
        return GbdtParams.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid {spec.axis}={value}: {e}") from e


def _prep_for(spec: GridSpec, prep: PrepConfig, value) -> PrepConfig:
    if spec.axis != "rate":
        return prep
    data = prep.model_dump()
    data["rate"] = value
    try:
        return PrepConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid rate={value}: {e}") from e


def grid_search(
    spec: GridSpec,
    trips: Optional[Sequence[Trip]] = None,
    vessels: Optional[Mapping[str, Sequence[AisRecord]]] = None,
    poi_index: Optional[PoiIndex] = None,
    vessel_types: Optional[Mapping[str, int]] = None,
    prep: Optional[PrepConfig] = None,
    horizons: Sequence[int] = (10, 20, 30, 40, 50, 60),
    split: Optional[SplitConfig] = None,
    workers: int = 1,
    parallel: bool = False,
) -> List[GridRow]:
    """
    Train and evaluate one model per candidate value.

    A row whose training or evaluation fails records the error and the sweep
    moves on. With ``parallel`` the candidates run concurrently and the timing
    columns are left blank, since concurrent runs distort wall time.

    Raises:
        ConfigError: ``rate`` is swept without raw vessel records, or neither
            trips nor vessels are given.
    """
    prep = prep or PrepConfig()
    split = split or SplitConfig()
    if spec.axis == "rate" and vessels is None:
        raise ConfigError("sweeping the rate axis needs raw AIS input, not a trips file")
    if trips is None and vessels is None:
        raise ConfigError("grid search needs trips or raw vessel records")

    def run(value) -> GridRow:
        row = GridRow(axis=spec.axis, value=value)
        try:
            params = _params_for(spec, value)
            prep_cfg = _prep_for(spec, prep, value)
            if trips is not None and spec.axis != "rate":
                value_trips = trips
            else:
                value_trips, _ = preprocess_fleet(vessels, poi_index, vessel_types, prep_cfg, workers)
            examples = build_training_set(value_trips, horizons, rate=prep_cfg.rate)
            result = train_and_evaluate(examples, params, split, horizons, 1 if parallel else workers)
            row.model_size_bytes = model_size_bytes(result.model)
            row.errors = result.report.means()
            if not parallel:
                row.training_s = result.training_s
                row.inference_us = measure_inference_us(result.model, examples.X)
            logger.info(f"Grid {spec.axis}={value}: 10-min error {row.errors.get(horizons[0])}")
        except VesselcastError as e:
            row.failure = str(e)
            logger.error(f"Grid {spec.axis}={value} failed: {e}")
        return row

    if parallel and len(spec.values) > 1:
        with ThreadPoolExecutor(max_workers=max(1, min(workers, len(spec.values)))) as pool:
            return list(pool.map(run, spec.values))
    return [run(v) for v in spec.values]


def grid_frame(rows: Sequence[GridRow], horizons: Sequence[int]) -> pd.DataFrame:
    columns = ["axis", "value", "model_size_bytes", "inference_us", "training_s"]
    columns += [f"err{h}" for h in horizons]
    records = []
    for r in rows:
        record = {
            "axis": r.axis,
            "value": r.value,
            "model_size_bytes": r.model_size_bytes,
            "inference_us": r.inference_us,
            "training_s": r.training_s,
        }
        for h in horizons:
            record[f"err{h}"] = r.errors.get(h)
        records.append(record)
    frame = pd.DataFrame(records, columns=columns)
    frame["model_size_bytes"] = frame["model_size_bytes"].astype("Int64")
    return frame


def write_grid_csv(rows: Sequence[GridRow], horizons: Sequence[int], path: Union[str, Path]) -> None:
    with atomic_output(path) as f:
        grid_frame(rows, horizons).to_csv(f, index=False, na_rep="", lineterminator="\n")
    failed = sum(1 for r in rows if not r.ok)
    if failed:
        logger.warning(f"{failed} of {len(rows)} grid rows failed")
