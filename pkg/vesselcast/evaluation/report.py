"""
Chronological splitting and per-horizon displacement error reports.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from vesselcast.config import GbdtParams, SplitConfig
from vesselcast.errors import DataIOError, InsufficientDataError
from vesselcast.features import TrainingSet
from vesselcast.features.feature_factory import F_LAT, F_LON
from vesselcast.gbdt import GbdtModel, fit, predict_positions
from vesselcast.geo import GeoPoint, haversine_m
from vesselcast.geo.geodesy import haversine_m_np
from vesselcast.io_utils import atomic_output

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["dataset", "horizon_min", "count", "mean_m", "std_m"]
PREDICTION_COLUMNS = ["vessel_id", "timestamp", "horizon_min", "pred_lon", "pred_lat"]


@dataclass
class HorizonRow:
    horizon_min: int
    count: int
    mean_m: Optional[float]
    std_m: Optional[float]


@dataclass
class HorizonReport:
    """Mean and population standard deviation of the error at each horizon."""
    rows: List[HorizonRow] = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, horizon: int) -> HorizonRow:
        for r in self.rows:
            if r.horizon_min == horizon:
                return r
        raise KeyError(horizon)

    def means(self) -> Dict[int, Optional[float]]:
        return {r.horizon_min: r.mean_m for r in self.rows}

    def to_frame(self, dataset: str = "") -> pd.DataFrame:
        return pd.DataFrame(
            [[dataset, r.horizon_min, r.count, r.mean_m, r.std_m] for r in self.rows],
            columns=REPORT_COLUMNS,
        )

    def write_csv(self, path: Union[str, Path], dataset: str = "") -> None:
        with atomic_output(path) as f:
            self.to_frame(dataset).to_csv(f, index=False, na_rep="", lineterminator="\n")


# ============================================================================
# Splitting and scoring
# ============================================================================

def chronological_split(examples: TrainingSet, cfg: SplitConfig) -> Tuple[TrainingSet, TrainingSet]:
    """
    Order examples by source timestamp (stable) and cut after ceil(N * fraction).

    Raises:
        InsufficientDataError: fewer than two examples.
    """
    n = len(examples)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 examples to split, got {n}")
    order = np.argsort(examples.timestamps, kind="stable")
    # rounding keeps e.g. 100 * 0.8 = 80.00000000000001 from becoming 81
    n_train = math.ceil(round(n * cfg.train_fraction, 9))
    return examples.subset(order[:n_train]), examples.subset(order[n_train:])


def displacement_error_m(predicted: GeoPoint, actual: GeoPoint) -> float:
    """Haversine distance between a predicted and a true position."""
    return haversine_m(predicted, actual)


def report_from_errors(errors: np.ndarray, delta_t: np.ndarray, horizons: Sequence[int]) -> HorizonReport:
    """Group per-example errors by horizon; empty groups get blank statistics."""
    rows = []
    for h in horizons:
        group = errors[delta_t == h]
        if len(group) == 0:
            rows.append(HorizonRow(int(h), 0, None, None))
        else:
            rows.append(HorizonRow(int(h), len(group), float(np.mean(group)), float(np.std(group))))
    return HorizonReport(rows)


def prediction_errors(examples: TrainingSet, pred_lon: np.ndarray, pred_lat: np.ndarray) -> np.ndarray:
    return haversine_m_np(pred_lon, pred_lat, examples.future_lon, examples.future_lat)


def evaluate(model: GbdtModel, examples: TrainingSet, horizons: Sequence[int]) -> HorizonReport:
    """Score the model's predicted positions against the true future positions."""
    if len(examples) == 0:
        return report_from_errors(np.empty(0), np.empty(0), horizons)
    lon, lat = predict_positions(model, examples.X)
    return report_from_errors(prediction_errors(examples, lon, lat), examples.delta_t, horizons)


def persistence_baseline(examples: TrainingSet, horizons: Sequence[int]) -> HorizonReport:
    """Score the prediction that every vessel stays where it is."""
    errors = prediction_errors(examples, examples.X[:, F_LON], examples.X[:, F_LAT])
    return report_from_errors(errors, examples.delta_t, horizons)


# ============================================================================
# Predictions files (oracle mode)
# ============================================================================

def predictions_frame(vessel_ids, timestamps, horizons, pred_lon, pred_lat) -> pd.DataFrame:
    return pd.DataFrame({
        "vessel_id": vessel_ids,
        "timestamp": np.asarray(timestamps, dtype=np.int64),
        "horizon_min": np.asarray(horizons, dtype=np.int64),
        "pred_lon": pred_lon,
        "pred_lat": pred_lat,
    })


def read_predictions(source: Union[str, Path]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(source, dtype={"vessel_id": str}, keep_default_na=False, float_precision="round_trip")
    except (OSError, ValueError, pd.errors.ParserError) as e:
        raise DataIOError(f"cannot read predictions {source}: {e}") from e
    if list(frame.columns) != PREDICTION_COLUMNS:
        raise DataIOError(f"not a predictions file (header {list(frame.columns)})")
    return frame


def score_predictions(
    examples: TrainingSet,
    predictions: pd.DataFrame,
    horizons: Sequence[int],
) -> HorizonReport:
    """
    Score a predictions table against the examples it covers.

    Rows are matched on (vessel_id, timestamp, horizon); examples without a
    prediction are left out and counted in a warning.
    """
    lookup = {
        (v, int(t), int(h)): (x, y)
        for v, t, h, x, y in zip(
            predictions["vessel_id"].tolist(),
            predictions["timestamp"].tolist(),
            predictions["horizon_min"].tolist(),
            predictions["pred_lon"].tolist(),
            predictions["pred_lat"].tolist(),
        )
    }
    keys = zip(examples.vessel_ids.tolist(), examples.timestamps.tolist(), examples.delta_t.tolist())
    found = [lookup.get((str(v), int(t), int(round(h)))) for v, t, h in keys]
    present = np.array([p is not None for p in found], dtype=bool)
    if not present.all():
        logger.warning(f"{int((~present).sum())} examples have no prediction and are not scored")

    covered = examples.subset(present)
    pred = np.array([p for p in found if p is not None], dtype=np.float64).reshape(-1, 2)
    errors = prediction_errors(covered, pred[:, 0], pred[:, 1])
    return report_from_errors(errors, covered.delta_t, horizons)


# ============================================================================
# Train-and-evaluate
# ============================================================================

@dataclass
class HoldoutResult:
    """Outcome of fitting on the early part of a dataset and scoring the rest."""
    model: GbdtModel
    n_train: int
    n_test: int
    training_s: float
    report: HorizonReport
    baseline: HorizonReport


def train_and_evaluate(
    examples: TrainingSet,
    params: GbdtParams,
    split: SplitConfig,
    horizons: Sequence[int],
    workers: int = 1,
) -> HoldoutResult:
    """
    Chronological split, fit on the train part, report on the test part.

    Raises:
        InsufficientDataError: either side of the split is empty.
    """
    train, test = chronological_split(examples, split)
    if len(train) == 0 or len(test) == 0:
        raise InsufficientDataError(f"split left {len(train)} train / {len(test)} test examples")
    logger.info(
        f"Chronological split: {len(train)} train ({len(train) / len(examples):.0%}) / "
        f"{len(test)} test ({len(test) / len(examples):.0%})"
    )
    started = time.monotonic()
    model = fit(train, params, workers=workers)
    training_s = time.monotonic() - started
    return HoldoutResult(
        model=model,
        n_train=len(train),
        n_test=len(test),
        training_s=training_s,
        report=evaluate(model, test, horizons),
        baseline=persistence_baseline(test, horizons),
    )
