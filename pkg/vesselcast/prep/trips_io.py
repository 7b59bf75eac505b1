"""
Trips CSV: one row per resampled point, grouped by trip.
"""

import logging
from pathlib import Path
from typing import IO, List, Sequence, Union

import numpy as np
import pandas as pd

from vesselcast.errors import DataIOError
from vesselcast.geo import GeoPoint
from vesselcast.io_utils import atomic_output
from vesselcast.prep.trips import Trip

logger = logging.getLogger(__name__)

TRIPS_COLUMNS = [
    "vessel_id", "trip_id", "vessel_type", "origin_poi",
    "timestamp", "lon", "lat", "speed", "bearing",
]
TRIPS_HEADER = ",".join(TRIPS_COLUMNS)


def trips_frame(trips: Sequence[Trip]) -> pd.DataFrame:
    """Flatten trips into the trips-file table."""
    if not trips:
        return pd.DataFrame({c: pd.Series(dtype=object) for c in TRIPS_COLUMNS})
    sizes = [len(t) for t in trips]

    def repeat(values, dtype):
        return pd.array(np.repeat(np.array(values, dtype=object), sizes), dtype=dtype)

    return pd.DataFrame({
        "vessel_id": repeat([t.vessel_id for t in trips], "string"),
        "trip_id": np.repeat([t.trip_id for t in trips], sizes),
        "vessel_type": repeat([t.vessel_type for t in trips], "Int64"),
        "origin_poi": repeat([t.origin_poi for t in trips], "Int64"),
        "timestamp": np.concatenate([t.timestamps for t in trips]),
        "lon": np.concatenate([t.lon for t in trips]),
        "lat": np.concatenate([t.lat for t in trips]),
        "speed": np.concatenate([t.speed for t in trips]),
        "bearing": np.concatenate([t.bearing for t in trips]),
    })


def write_trips(trips: Sequence[Trip], path: Union[str, Path]) -> None:
    """Write trips atomically; floats use the shortest round-trip representation."""
    frame = trips_frame(trips)
    with atomic_output(path) as f:
        frame.to_csv(f, index=False, lineterminator="\n")
    logger.info(f"Wrote {len(trips)} trips ({len(frame)} points) to {path}")


def read_trips(source: Union[str, Path, IO]) -> List[Trip]:
    """
    Read a trips file back into Trip objects, in file order.

    Raises:
        DataIOError: unreadable file or a header that is not the trips header.
    """
    try:
        frame = pd.read_csv(
            source,
            dtype={"vessel_id": str, "vessel_type": "Int64", "origin_poi": "Int64"},
            keep_default_na=False,
            na_values={"vessel_type": [""], "origin_poi": [""]},
            float_precision="round_trip",
        )
    except pd.errors.EmptyDataError as e:
        raise DataIOError(f"trips file is empty: {source}") from e
    except (OSError, UnicodeDecodeError, ValueError, pd.errors.ParserError) as e:
        raise DataIOError(f"cannot read trips file {source}: {e}") from e

    if list(frame.columns) != TRIPS_COLUMNS:
        raise DataIOError(f"not a trips file (header {list(frame.columns)})")
    if frame.empty:
        return []

    try:
        ts = frame["timestamp"].to_numpy(dtype=np.int64)
        lon = frame["lon"].to_numpy(dtype=np.float64)
        lat = frame["lat"].to_numpy(dtype=np.float64)
        speed = frame["speed"].to_numpy(dtype=np.float64)
        bearing = frame["bearing"].to_numpy(dtype=np.float64)
        trip_ids = frame["trip_id"].to_numpy(dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise DataIOError(f"malformed trips file {source}: {e}") from e
    vids = frame["vessel_id"].to_numpy()

    changes = np.flatnonzero((vids[1:] != vids[:-1]) | (trip_ids[1:] != trip_ids[:-1])) + 1
    bounds = np.concatenate(([0], changes, [len(frame)]))

    trips: List[Trip] = []
    for s, e in zip(bounds[:-1], bounds[1:]):
        vtype = frame["vessel_type"].iat[s]
        origin = frame["origin_poi"].iat[s]
        trips.append(Trip(
            vessel_id=str(vids[s]),
            trip_id=int(trip_ids[s]),
            vessel_type=None if pd.isna(vtype) else int(vtype),
            origin_poi=None if pd.isna(origin) else int(origin),
            start_pos=GeoPoint(float(lon[s]), float(lat[s])),
            timestamps=ts[s:e].copy(),
            lon=lon[s:e].copy(),
            lat=lat[s:e].copy(),
            speed=speed[s:e].copy(),
            bearing=bearing[s:e].copy(),
        ))
    return trips
