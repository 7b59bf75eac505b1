"""
Per-vessel trajectory cleaning.

Each step takes and returns a columnar ``Track``, in the order the pipeline
applies them:

    deduplicate -> annotate_kinematics -> filter_speed_outliers
    -> split_and_filter_stationary -> assign_origin -> resample_trip
"""

import logging
from typing import List, Optional, Sequence, Union

import numpy as np

from vesselcast.config import PrepConfig
from vesselcast.geo.geodesy import (
    GeoPoint,
    haversine_m_np,
    initial_bearing_deg_np,
    lerp_np,
    speed_knots_np,
)
from vesselcast.ingest import AisRecord, PoiIndex
from vesselcast.prep.trips import Track, Trip

logger = logging.getLogger(__name__)


def compute_kinematics(timestamps: np.ndarray, lon: np.ndarray, lat: np.ndarray):
    """
    Speed (knots) and bearing (degrees) of every point against its predecessor.

    Point 0 copies point 1; a single point gets speed 0 and bearing 0. A
    point that has not moved keeps the previous point's bearing (0 when
    there is none).
    """
    n = len(timestamps)
    speed = np.zeros(n)
    bearing = np.zeros(n)
    if n < 2:
        return speed, bearing

    dt = np.diff(timestamps).astype(np.float64)
    dist = haversine_m_np(lon[:-1], lat[:-1], lon[1:], lat[1:])
    speed[1:] = speed_knots_np(dist, dt)

    raw = initial_bearing_deg_np(lon[:-1], lat[:-1], lon[1:], lat[1:])
    still = (lon[1:] == lon[:-1]) & (lat[1:] == lat[:-1])
    if still.any():
        # forward-fill the last defined bearing over steps without movement
        last = np.maximum.accumulate(np.where(still, -1, np.arange(n - 1)))
        raw = np.where(last >= 0, raw[np.maximum(last, 0)], 0.0)
    bearing[1:] = raw

    speed[0] = speed[1]
    bearing[0] = bearing[1]
    return speed, bearing


def deduplicate(records: Sequence[AisRecord]) -> List[AisRecord]:
    """Keep the first record of every timestamp (input sorted by timestamp)."""
    out: List[AisRecord] = []
    last_ts = None
    for r in records:
        if r.timestamp != last_ts:
            out.append(r)
            last_ts = r.timestamp
    return out


def deduplicate_track(track: Track) -> Track:
    """Array form of ``deduplicate``."""
    if len(track) < 2:
        return track
    keep = np.ones(len(track), dtype=bool)
    keep[1:] = track.timestamps[1:] != track.timestamps[:-1]
    return track if keep.all() else track.take(keep)


def annotate_kinematics(records: Union[Track, Sequence[AisRecord]]) -> Track:
    """Attach speed and bearing to deduplicated records (a record list or a Track)."""
    track = records if isinstance(records, Track) else Track.from_records(records)
    speed, bearing = compute_kinematics(track.timestamps, track.lon, track.lat)
    return Track(
        vessel_id=track.vessel_id,
        timestamps=track.timestamps,
        lon=track.lon,
        lat=track.lat,
        speed=speed,
        bearing=bearing,
        vessel_type=track.vessel_type,
    )


def filter_speed_outliers(track: Track, cfg: PrepConfig) -> Track:
    """
    Drop points that imply more than ``s_max`` knots from the last kept point.

    The scan keeps an anchor (the last retained point). Survivors get their
    kinematics recomputed against it, which equals recomputing kinematics
    over the retained sequence.
    """
    n = len(track)
    if n < 2 or not (track.speed[1:] > cfg.s_max).any():
        return track

    t, lon, lat = track.timestamps, track.lon, track.lat
    keep = np.zeros(n, dtype=bool)
    keep[0] = True
    anchor = 0
    for i in range(1, n):
        if anchor == i - 1:
            v = track.speed[i]
        else:
            d = haversine_m_np(lon[anchor], lat[anchor], lon[i], lat[i])
            v = float(speed_knots_np(d, float(t[i] - t[anchor])))
        if v > cfg.s_max:
            continue
        keep[i] = True
        anchor = i

    return annotate_kinematics(track.take(keep))


def split_and_filter_stationary(track: Track, cfg: PrepConfig) -> List[Track]:
    """
    Remove stationary points and cut the track into raw trips.

    A point slower than ``s_min`` is dropped and ends the current trip; a gap
    longer than ``gap_max`` between consecutive kept points also ends it.
    Trips shorter than ``length_min`` points are discarded.
    """
    n = len(track)
    if n == 0:
        return []

    moving = track.speed >= cfg.s_min
    joined = np.zeros(n, dtype=bool)  # joined[i]: point i continues the trip of i-1
    if n > 1:
        joined[1:] = moving[1:] & moving[:-1] & (np.diff(track.timestamps) <= cfg.gap_max)
    starts = np.flatnonzero(moving & ~joined)
    ends = np.flatnonzero(moving & ~np.append(joined[1:], False))

    return [
        track.take(slice(s, e + 1))
        for s, e in zip(starts, ends)
        if e + 1 - s >= cfg.length_min
    ]


def assign_origin(track: Track, poi_index: Optional[PoiIndex], cfg: PrepConfig) -> Optional[int]:
    """POI id within ``d_min`` meters of the trip's first point, if any."""
    if poi_index is None or len(poi_index) == 0 or len(track) == 0:
        return None
    poi, dist = poi_index.nearest(GeoPoint(float(track.lon[0]), float(track.lat[0])))
    return poi.poi_id if dist <= cfg.d_min else None


def resample_trip(
    track: Track,
    cfg: PrepConfig,
    trip_id: int = 0,
    origin_poi: Optional[int] = None,
) -> Optional[Trip]:
    """
    Resample a raw trip onto the grid t0, t0 + rate, ... up to its last timestamp.

    Positions are interpolated linearly in lon/lat between the bracketing raw
    points; kinematics are recomputed on the grid. Returns None when the grid
    holds fewer than two points.
    """
    if len(track) < 2:
        return None
    t = track.timestamps
    t0 = int(t[0])
    count = (int(t[-1]) - t0) // cfg.rate + 1
    if count < 2:
        return None

    grid = t0 + cfg.rate * np.arange(count, dtype=np.int64)
    left = np.clip(np.searchsorted(t, grid, side="right") - 1, 0, len(t) - 2)
    frac = (grid - t[left]).astype(np.float64) / (t[left + 1] - t[left]).astype(np.float64)

    lon = lerp_np(track.lon[left], track.lon[left + 1], frac)
    lat = lerp_np(track.lat[left], track.lat[left + 1], frac)
    speed, bearing = compute_kinematics(grid, lon, lat)

    return Trip(
        vessel_id=track.vessel_id,
        trip_id=trip_id,
        vessel_type=track.vessel_type,
        origin_poi=origin_poi,
        start_pos=GeoPoint(float(track.lon[0]), float(track.lat[0])),
        timestamps=grid,
        lon=lon,
        lat=lat,
        speed=speed,
        bearing=bearing,
    )
