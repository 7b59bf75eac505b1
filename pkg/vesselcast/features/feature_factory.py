"""
Feature extraction for position prediction.

Every example pairs a trip grid point with one horizon Δt. The twelve
features, in their frozen order:

    v_type, lon, lat, sp, br, extrap_diff_lon, extrap_diff_lat,
    last_diff_lon, last_diff_lat, origin, orig_dist, delta_t

The targets are the change in lon and lat between the grid point and the
trip's interpolated position Δt minutes later. Missing values are NaN.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from vesselcast.errors import InvalidInputError
from vesselcast.features.encoding import MISSING, CategoryEncoders
from vesselcast.geo.geodesy import GeoPoint, KNOT_MS, destination_point_np, haversine_m_np, lerp_np
from vesselcast.io_utils import atomic_output
from vesselcast.prep.trips import Trip

logger = logging.getLogger(__name__)

FEATURE_NAMES: Tuple[str, ...] = (
    "v_type",
    "lon",
    "lat",
    "sp",
    "br",
    "extrap_diff_lon",
    "extrap_diff_lat",
    "last_diff_lon",
    "last_diff_lat",
    "origin",
    "orig_dist",
    "delta_t",
)
N_FEATURES = len(FEATURE_NAMES)

# column indices used outside this module
F_VTYPE, F_LON, F_LAT, F_SP, F_BR = 0, 1, 2, 3, 4
F_EXTRAP_LON, F_EXTRAP_LAT, F_LAST_LON, F_LAST_LAT = 5, 6, 7, 8
F_ORIGIN, F_ORIG_DIST, F_DELTA_T = 9, 10, 11


@dataclass(frozen=True)
class FeatureVector:
    """One row of the feature matrix."""
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (N_FEATURES,):
            raise InvalidInputError(f"a feature vector holds {N_FEATURES} values, got {self.values.shape}")

    def __getitem__(self, key: Union[int, str]) -> float:
        if isinstance(key, str):
            key = FEATURE_NAMES.index(key)
        return float(self.values[key])

    def __len__(self) -> int:
        return N_FEATURES

    def is_missing(self, key: Union[int, str]) -> bool:
        return bool(np.isnan(self[key]))

    def as_dict(self) -> dict:
        return dict(zip(FEATURE_NAMES, self.values.tolist()))


@dataclass(frozen=True)
class TrainingExample:
    features: FeatureVector
    target_dlon: float
    target_dlat: float
    source_timestamp: int
    vessel_id: str = ""


@dataclass
class TrainingSet:
    """
    Column-wise collection of training examples.

    ``future_lon``/``future_lat`` hold the true position at the horizon, so
    evaluation can score predictions without revisiting the trips.
    """
    X: np.ndarray
    dlon: np.ndarray
    dlat: np.ndarray
    timestamps: np.ndarray
    vessel_ids: np.ndarray
    future_lon: np.ndarray
    future_lat: np.ndarray
    encoders: CategoryEncoders = field(default_factory=CategoryEncoders)
    horizons: Tuple[int, ...] = ()
    rate: Optional[int] = None

    def __len__(self) -> int:
        return len(self.dlon)

    def __iter__(self) -> Iterator[TrainingExample]:
        for i in range(len(self)):
            yield self.example(i)

    def example(self, i: int) -> TrainingExample:
        return TrainingExample(
            features=FeatureVector(self.X[i].copy()),
            target_dlon=float(self.dlon[i]),
            target_dlat=float(self.dlat[i]),
            source_timestamp=int(self.timestamps[i]),
            vessel_id=str(self.vessel_ids[i]),
        )

    @property
    def delta_t(self) -> np.ndarray:
        return self.X[:, F_DELTA_T]

    def subset(self, idx) -> "TrainingSet":
        return TrainingSet(
            X=self.X[idx],
            dlon=self.dlon[idx],
            dlat=self.dlat[idx],
            timestamps=self.timestamps[idx],
            vessel_ids=self.vessel_ids[idx],
            future_lon=self.future_lon[idx],
            future_lat=self.future_lat[idx],
            encoders=self.encoders,
            horizons=self.horizons,
            rate=self.rate,
        )

    @classmethod
    def empty(cls, encoders: Optional[CategoryEncoders] = None, horizons=(), rate=None) -> "TrainingSet":
        return cls(
            X=np.empty((0, N_FEATURES)),
            dlon=np.empty(0),
            dlat=np.empty(0),
            timestamps=np.empty(0, dtype=np.int64),
            vessel_ids=np.empty(0, dtype=object),
            future_lon=np.empty(0),
            future_lat=np.empty(0),
            encoders=encoders or CategoryEncoders(),
            horizons=tuple(horizons),
            rate=rate,
        )

    @classmethod
    def from_examples(cls, examples: Sequence[TrainingExample], **kwargs) -> "TrainingSet":
        if not examples:
            return cls.empty(**kwargs)
        X = np.stack([e.features.values for e in examples])
        dlon = np.array([e.target_dlon for e in examples])
        dlat = np.array([e.target_dlat for e in examples])
        return cls(
            X=X,
            dlon=dlon,
            dlat=dlat,
            timestamps=np.array([e.source_timestamp for e in examples], dtype=np.int64),
            vessel_ids=np.array([e.vessel_id for e in examples], dtype=object),
            future_lon=X[:, F_LON] + dlon,
            future_lat=X[:, F_LAT] + dlat,
            **kwargs,
        )

    @classmethod
    def concat(cls, parts: Sequence["TrainingSet"], **kwargs) -> "TrainingSet":
        parts = [p for p in parts if len(p)]
        if not parts:
            return cls.empty(**kwargs)
        return cls(
            X=np.concatenate([p.X for p in parts]),
            dlon=np.concatenate([p.dlon for p in parts]),
            dlat=np.concatenate([p.dlat for p in parts]),
            timestamps=np.concatenate([p.timestamps for p in parts]),
            vessel_ids=np.concatenate([p.vessel_ids for p in parts]),
            future_lon=np.concatenate([p.future_lon for p in parts]),
            future_lat=np.concatenate([p.future_lat for p in parts]),
            **kwargs,
        )


@dataclass
class InferenceBatch:
    """Feature rows for every (grid point, horizon) pair, with their keys."""
    X: np.ndarray
    vessel_ids: np.ndarray
    timestamps: np.ndarray
    horizons: np.ndarray

    def __len__(self) -> int:
        return len(self.timestamps)


# ============================================================================
# Interpolation
# ============================================================================

def positions_at(trip: Trip, times: np.ndarray):
    """
    Interpolated trip positions at many times.

    Returns (lon, lat, inside) where ``inside`` flags times within the trip's
    first and last grid timestamps; lon/lat are NaN elsewhere.
    """
    times = np.asarray(times, dtype=np.int64)
    t = trip.timestamps
    inside = (times >= t[0]) & (times <= t[-1])
    lon = np.full(times.shape, np.nan)
    lat = np.full(times.shape, np.nan)
    if len(t) == 1:
        lon[inside] = trip.lon[0]
        lat[inside] = trip.lat[0]
        return lon, lat, inside

    q = times[inside]
    left = np.clip(np.searchsorted(t, q, side="right") - 1, 0, len(t) - 2)
    frac = (q - t[left]).astype(np.float64) / (t[left + 1] - t[left]).astype(np.float64)
    lon[inside] = lerp_np(trip.lon[left], trip.lon[left + 1], frac)
    lat[inside] = lerp_np(trip.lat[left], trip.lat[left + 1], frac)
    return lon, lat, inside


def position_at(trip: Trip, t: int) -> Optional[GeoPoint]:
    """Trip position at time ``t`` (unix seconds), or None outside the trip."""
    lon, lat, inside = positions_at(trip, np.array([t]))
    if not inside[0]:
        return None
    return GeoPoint(float(lon[0]), float(lat[0]))


# ============================================================================
# Features
# ============================================================================

def _feature_block(
    trip: Trip,
    idx: np.ndarray,
    dt: float,
    encoders: Optional[CategoryEncoders],
) -> np.ndarray:
    """Feature rows for grid indices ``idx`` at horizon ``dt`` minutes."""
    n = len(idx)
    X = np.empty((n, N_FEATURES))
    lon = trip.lon[idx]
    lat = trip.lat[idx]
    sp = trip.speed[idx]
    br = trip.bearing[idx]

    if encoders is None:
        vtype = MISSING if trip.vessel_type is None else float(trip.vessel_type)
        origin = MISSING if trip.origin_poi is None else float(trip.origin_poi)
    else:
        vtype = encoders.vessel_type.encode(trip.vessel_type)
        origin = encoders.origin.encode(trip.origin_poi)

    ex_lon, ex_lat = destination_point_np(lon, lat, br, sp * KNOT_MS * dt * 60.0)
    past_lon, past_lat, has_past = positions_at(trip, trip.timestamps[idx] - int(round(dt * 60)))

    X[:, F_VTYPE] = vtype
    X[:, F_LON] = lon
    X[:, F_LAT] = lat
    X[:, F_SP] = sp
    X[:, F_BR] = br
    X[:, F_EXTRAP_LON] = ex_lon - lon
    X[:, F_EXTRAP_LAT] = ex_lat - lat
    X[:, F_LAST_LON] = np.where(has_past, lon - past_lon, MISSING)
    X[:, F_LAST_LAT] = np.where(has_past, lat - past_lat, MISSING)
    X[:, F_ORIGIN] = origin
    X[:, F_ORIG_DIST] = haversine_m_np(lon, lat, trip.start_pos.lon, trip.start_pos.lat)
    X[:, F_DELTA_T] = dt
    return X


def extract_features(
    trip: Trip,
    i: int,
    dt: float,
    encoders: Optional[CategoryEncoders] = None,
) -> FeatureVector:
    """
    Features of grid point ``i`` for a prediction ``dt`` minutes ahead.

    Without encoders, categorical fields carry the raw vessel type / POI id.

    Raises:
        InvalidInputError: ``i`` is not a grid index of the trip.
    """
    if not 0 <= i < len(trip):
        raise InvalidInputError(f"grid index {i} outside trip of {len(trip)} points")
    return FeatureVector(_feature_block(trip, np.array([i]), dt, encoders)[0])


def build_training_set(
    trips: Sequence[Trip],
    horizons: Sequence[int],
    encoders: Optional[CategoryEncoders] = None,
    rate: Optional[int] = None,
) -> TrainingSet:
    """
    Emit one example for every trip grid point and horizon whose future
    position lies inside the trip.

    Encoders are fitted on ``trips`` (first-seen order) unless given.
    Examples are ordered by trip, then horizon, then grid index.
    """
    if encoders is None:
        encoders = CategoryEncoders.fit_trips(trips)

    parts: List[TrainingSet] = []
    for trip in trips:
        for h in horizons:
            ahead = 60 * int(h)
            eligible = np.flatnonzero(trip.timestamps + ahead <= trip.end_time)
            if len(eligible) == 0:
                continue
            X = _feature_block(trip, eligible, float(h), encoders)
            f_lon, f_lat, _ = positions_at(trip, trip.timestamps[eligible] + ahead)
            parts.append(TrainingSet(
                X=X,
                dlon=f_lon - X[:, F_LON],
                dlat=f_lat - X[:, F_LAT],
                timestamps=trip.timestamps[eligible],
                vessel_ids=np.full(len(eligible), trip.vessel_id, dtype=object),
                future_lon=f_lon,
                future_lat=f_lat,
            ))

    out = TrainingSet.concat(parts, encoders=encoders, horizons=tuple(horizons), rate=rate)
    logger.info(f"Built {len(out)} training examples from {len(trips)} trips")
    return out


def build_inference_matrix(
    trips: Sequence[Trip],
    horizons: Sequence[int],
    encoders: CategoryEncoders,
) -> InferenceBatch:
    """Feature rows for every trip grid point at every horizon (trip, point, horizon order)."""
    blocks, vids, ts, hs = [], [], [], []
    k = len(horizons)
    for trip in trips:
        n = len(trip)
        idx = np.arange(n)
        per_horizon = [_feature_block(trip, idx, float(h), encoders) for h in horizons]
        # rows (p0,h0), (p0,h1), ..., (p1,h0), ...
        blocks.append(np.stack(per_horizon, axis=1).reshape(n * k, N_FEATURES))
        vids.append(np.full(n * k, trip.vessel_id, dtype=object))
        ts.append(np.repeat(trip.timestamps, k))
        hs.append(np.tile(np.asarray(horizons, dtype=np.int64), n))

    if not blocks:
        return InferenceBatch(
            X=np.empty((0, N_FEATURES)),
            vessel_ids=np.empty(0, dtype=object),
            timestamps=np.empty(0, dtype=np.int64),
            horizons=np.empty(0, dtype=np.int64),
        )
    return InferenceBatch(
        X=np.concatenate(blocks),
        vessel_ids=np.concatenate(vids),
        timestamps=np.concatenate(ts),
        horizons=np.concatenate(hs),
    )


def matrix_frame(training_set: TrainingSet) -> pd.DataFrame:
    frame = pd.DataFrame(training_set.X, columns=[f"f{i}" for i in range(N_FEATURES)])
    frame.insert(0, "ts", training_set.timestamps)
    frame.insert(0, "dlat", training_set.dlat)
    frame.insert(0, "dlon", training_set.dlon)
    return frame


def write_matrix(training_set: TrainingSet, path: Union[str, Path]) -> None:
    """Dump targets, source timestamps and features; missing values stay empty."""
    with atomic_output(path) as f:
        matrix_frame(training_set).to_csv(f, index=False, na_rep="", lineterminator="\n")
    logger.info(f"Wrote feature matrix ({len(training_set)} rows) to {path}")
