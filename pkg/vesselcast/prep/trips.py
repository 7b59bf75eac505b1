"""
Trajectory data types: raw per-vessel tracks and resampled trips.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from vesselcast.geo import GeoPoint
from vesselcast.ingest import AisRecord


@dataclass(frozen=True, slots=True)
class KinematicPoint:
    """A cleaned position with its speed (knots) and bearing (degrees)."""
    timestamp: int
    pos: GeoPoint
    speed: float
    bearing: float


def _materialize(timestamps, lon, lat, speed, bearing) -> List[KinematicPoint]:
    return [
        KinematicPoint(int(t), GeoPoint(x, y), s, b)
        for t, x, y, s, b in zip(
            timestamps.tolist(), lon.tolist(), lat.tolist(), speed.tolist(), bearing.tolist()
        )
    ]


@dataclass(eq=False)
class Track:
    """Time-ordered points of one vessel, stored column-wise."""
    vessel_id: str
    timestamps: np.ndarray  # int64 unix seconds
    lon: np.ndarray
    lat: np.ndarray
    speed: Optional[np.ndarray] = None
    bearing: Optional[np.ndarray] = None
    vessel_type: Optional[int] = None

    def __post_init__(self) -> None:
        n = len(self.timestamps)
        if self.speed is None:
            self.speed = np.zeros(n)
        if self.bearing is None:
            self.bearing = np.zeros(n)

    def __len__(self) -> int:
        return len(self.timestamps)

    @classmethod
    def from_records(cls, records: Sequence[AisRecord]) -> "Track":
        n = len(records)
        return cls(
            vessel_id=records[0].vessel_id if n else "",
            timestamps=np.fromiter((r.timestamp for r in records), dtype=np.int64, count=n),
            lon=np.fromiter((r.pos.lon for r in records), dtype=np.float64, count=n),
            lat=np.fromiter((r.pos.lat for r in records), dtype=np.float64, count=n),
            vessel_type=next((r.vessel_type for r in records if r.vessel_type is not None), None),
        )

    def take(self, idx) -> "Track":
        """Sub-track at the given indices, mask or slice (kinematics carried as-is)."""
        return Track(
            vessel_id=self.vessel_id,
            timestamps=self.timestamps[idx],
            lon=self.lon[idx],
            lat=self.lat[idx],
            speed=self.speed[idx],
            bearing=self.bearing[idx],
            vessel_type=self.vessel_type,
        )

    @property
    def points(self) -> List[KinematicPoint]:
        return _materialize(self.timestamps, self.lon, self.lat, self.speed, self.bearing)


@dataclass(eq=False)
class Trip:
    """
    One voyage of a vessel resampled to a fixed rate.

    ``timestamps`` step by exactly the resampling rate. ``start_pos`` is the
    first raw point of the trip, which the grid reproduces as its first point.
    """
    vessel_id: str
    trip_id: int
    vessel_type: Optional[int]
    origin_poi: Optional[int]
    start_pos: GeoPoint
    timestamps: np.ndarray
    lon: np.ndarray
    lat: np.ndarray
    speed: np.ndarray
    bearing: np.ndarray
    _points: Optional[List[KinematicPoint]] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def points(self) -> List[KinematicPoint]:
        if self._points is None:
            self._points = _materialize(self.timestamps, self.lon, self.lat, self.speed, self.bearing)
        return self._points

    @property
    def start_time(self) -> int:
        return int(self.timestamps[0])

    @property
    def end_time(self) -> int:
        return int(self.timestamps[-1])
