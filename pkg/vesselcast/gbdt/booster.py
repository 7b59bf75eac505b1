"""
Gradient boosting with squared-error loss for (Δlon, Δlat) prediction.

Each target gets its own ensemble. Both share one BinSchema built from the
training matrix.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from vesselcast.config import GbdtParams
from vesselcast.errors import InsufficientDataError, InvalidInputError, SchemaError
from vesselcast.features import FEATURE_NAMES, CategoryEncoders, FeatureVector, TrainingSet
from vesselcast.features.feature_factory import F_LAT, F_LON
from vesselcast.gbdt.binning import BinSchema, build_bins
from vesselcast.gbdt.grower import flat_keys, grow_tree
from vesselcast.gbdt.tree import Tree, TreeEnsemble
from vesselcast.geo import GeoPoint
from vesselcast.monitoring.metrics import MetricsCollector

logger = logging.getLogger(__name__)


@dataclass
class GbdtModel:
    """Two boosted ensembles plus what inference and serialization need."""
    params: GbdtParams
    lon: TreeEnsemble
    lat: TreeEnsemble
    feature_names: Tuple[str, ...] = FEATURE_NAMES
    encoders: CategoryEncoders = field(default_factory=CategoryEncoders)
    rate: Optional[int] = None
    horizons: Tuple[int, ...] = ()
    # per-round training MSE; kept in memory only
    history_lon: List[float] = field(default_factory=list, repr=False)
    history_lat: List[float] = field(default_factory=list, repr=False)

    @property
    def base_score_lon(self) -> float:
        return self.lon.base_score

    @property
    def base_score_lat(self) -> float:
        return self.lat.base_score

    @property
    def trees_lon(self) -> List[Tree]:
        return self.lon.trees

    @property
    def trees_lat(self) -> List[Tree]:
        return self.lat.trees

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def check_matrix(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise SchemaError(
                f"model expects {self.n_features} features {list(self.feature_names)}, "
                f"got shape {X.shape}"
            )
        return X

    def predict_deltas(self, X) -> Tuple[np.ndarray, np.ndarray]:
        X = self.check_matrix(X)
        return self.lon.predict(X), self.lat.predict(X)


# ============================================================================
# Training
# ============================================================================

def squared_error_gradient(pred: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gradient and hessian of ½(pred - y)² with respect to pred."""
    return pred - y, np.ones_like(pred)


def _check_targets(y: np.ndarray, name: str) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if len(y) == 0:
        raise InsufficientDataError("cannot fit a model on zero examples")
    if not np.isfinite(y).all():
        raise InvalidInputError(f"non-finite values in target {name}")
    return y


def train_ensemble(
    X: np.ndarray,
    y: np.ndarray,
    params: GbdtParams,
    schema: Optional[BinSchema] = None,
    codes: Optional[np.ndarray] = None,
    target: str = "y",
) -> Tuple[TreeEnsemble, List[float]]:
    """
    Boost one target.

    Args:
        X: Raw feature matrix (n, F); NaN marks missing values.
        y: Targets.
        params: Hyperparameters.
        schema, codes: Precomputed binning of X (built here when omitted).
        target: Label for logs and metrics.

    Returns:
        Tuple of (ensemble, training MSE before the first round and after each round).
    """
    y = _check_targets(y, target)
    if schema is None:
        schema = build_bins(X, params.n_bins)
    if codes is None:
        codes = schema.transform(X)
    keys = flat_keys(codes, schema)
    metrics = MetricsCollector()

    base = float(np.mean(y))
    pred = np.full(len(y), base)
    history = [float(np.mean((pred - y) ** 2))]
    trees: List[Tree] = []
    for r in range(params.n_estimators):
        g, h = squared_error_gradient(pred, y)
        tree, leaf = grow_tree(codes, keys, g, h, schema, params)
        pred += params.learning_rate * tree.value[leaf]
        trees.append(tree)
        history.append(float(np.mean((pred - y) ** 2)))
        metrics.record_round(target)
        if (r + 1) % 100 == 0:
            logger.debug(f"[{target}] round {r + 1}/{params.n_estimators}: mse={history[-1]:.6g}")

    return TreeEnsemble(base_score=base, learning_rate=params.learning_rate, trees=trees), history


def fit_arrays(
    X: np.ndarray,
    dlon: np.ndarray,
    dlat: np.ndarray,
    params: GbdtParams,
    feature_names: Sequence[str] = FEATURE_NAMES,
    encoders: Optional[CategoryEncoders] = None,
    rate: Optional[int] = None,
    horizons: Sequence[int] = (),
    workers: int = 1,
) -> GbdtModel:
    """Fit both ensembles on a raw feature matrix (any feature count)."""
    X = np.asarray(X, dtype=np.float64)
    dlon = _check_targets(dlon, "lon")
    dlat = _check_targets(dlat, "lat")
    if X.ndim != 2 or X.shape[0] != len(dlon) or X.shape[1] != len(feature_names):
        raise SchemaError(f"feature matrix of shape {X.shape} does not match {len(feature_names)} features")

    started = time.monotonic()
    schema = build_bins(X, params.n_bins)
    codes = schema.transform(X)

    def run(target: Tuple[str, np.ndarray]):
        name, y = target
        return train_ensemble(X, y, params, schema=schema, codes=codes, target=name)

    jobs = [("lon", dlon), ("lat", dlat)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            (lon, hist_lon), (lat, hist_lat) = pool.map(run, jobs)
    else:
        (lon, hist_lon), (lat, hist_lat) = map(run, jobs)

    elapsed = time.monotonic() - started
    MetricsCollector().record_training_time(elapsed)
    logger.info(
        f"Fitted {params.n_estimators} rounds x 2 targets on {len(dlon)} examples "
        f"in {elapsed:.2f}s ({lon.n_nodes + lat.n_nodes} nodes)"
    )
    return GbdtModel(
        params=params,
        lon=lon,
        lat=lat,
        feature_names=tuple(feature_names),
        encoders=encoders or CategoryEncoders(),
        rate=rate,
        horizons=tuple(horizons),
        history_lon=hist_lon,
        history_lat=hist_lat,
    )


def fit(training_set: TrainingSet, params: GbdtParams, workers: int = 1) -> GbdtModel:
    """Fit a position model on a training set built by the feature factory."""
    return fit_arrays(
        training_set.X,
        training_set.dlon,
        training_set.dlat,
        params,
        feature_names=FEATURE_NAMES,
        encoders=training_set.encoders,
        rate=training_set.rate,
        horizons=training_set.horizons,
        workers=workers,
    )


# ============================================================================
# Inference
# ============================================================================

def predict_delta(model: GbdtModel, features: Union[FeatureVector, Sequence[float]]) -> Tuple[float, float]:
    """(dlon, dlat) for one feature vector."""
    values = features.values if isinstance(features, FeatureVector) else features
    dlon, dlat = model.predict_deltas(values)
    return float(dlon[0]), float(dlat[0])


def clamp_positions(lon: np.ndarray, lat: np.ndarray) -> Tuple[np.ndarray, np.ndarray, int]:
    """Clamp to valid coordinates; returns (lon, lat, rows clamped)."""
    out_lon = np.clip(lon, -180.0, 180.0)
    out_lat = np.clip(lat, -90.0, 90.0)
    clamped = int(((out_lon != lon) | (out_lat != lat)).sum())
    return out_lon, out_lat, clamped


def predict_positions(model: GbdtModel, X) -> Tuple[np.ndarray, np.ndarray]:
    """Predicted future (lon, lat) for every row of a 12-feature matrix."""
    X = model.check_matrix(X)
    dlon, dlat = model.predict_deltas(X)
    lon, lat, clamped = clamp_positions(X[:, F_LON] + dlon, X[:, F_LAT] + dlat)
    if clamped:
        MetricsCollector().record_clamped(clamped)
        logger.warning(f"Clamped {clamped} predicted positions into valid coordinate ranges")
    return lon, lat


def predict_position(model: GbdtModel, features: Union[FeatureVector, Sequence[float]]) -> GeoPoint:
    """Latest known position plus the predicted delta."""
    values = features.values if isinstance(features, FeatureVector) else features
    lon, lat = predict_positions(model, values)
    return GeoPoint(float(lon[0]), float(lat[0]))
