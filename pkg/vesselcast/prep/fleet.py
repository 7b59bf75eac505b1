"""
Fleet-level preprocessing: the cleaning pipeline applied to every vessel.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from vesselcast.config import PrepConfig
from vesselcast.ingest import AisRecord, PoiIndex
from vesselcast.monitoring.metrics import MetricsCollector
from vesselcast.prep.cleaning import (
    annotate_kinematics,
    assign_origin,
    deduplicate_track,
    filter_speed_outliers,
    resample_trip,
    split_and_filter_stationary,
)
from vesselcast.prep.trips import Track, Trip

logger = logging.getLogger(__name__)


@dataclass
class PrepStats:
    """Point accounting across the pipeline stages."""
    records_in: int = 0
    duplicates: int = 0
    outliers: int = 0
    stationary: int = 0
    short_trip_points: int = 0
    short_grid_points: int = 0
    retained_points: int = 0
    trips: int = 0
    vessels: int = 0

    @property
    def dropped(self) -> Dict[str, int]:
        return {
            "duplicate": self.duplicates,
            "outlier": self.outliers,
            "stationary": self.stationary,
            "short_trip": self.short_trip_points,
            "short_grid": self.short_grid_points,
        }

    def is_balanced(self) -> bool:
        return sum(self.dropped.values()) + self.retained_points == self.records_in

    def __add__(self, other: "PrepStats") -> "PrepStats":
        return PrepStats(**{k: v + getattr(other, k) for k, v in asdict(self).items()})

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


@dataclass
class DatasetStatistics:
    """Size of a processed dataset: vessels, trips and usable points per horizon."""
    vessels: int
    trips: int
    points: int
    points_per_horizon: Dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "vessels": self.vessels,
            "trips": self.trips,
            "points": self.points,
            "points_per_horizon": {str(k): v for k, v in self.points_per_horizon.items()},
        }


def process_vessel(
    records: Sequence[AisRecord],
    poi_index: Optional[PoiIndex],
    cfg: PrepConfig,
    vessel_type: Optional[int] = None,
) -> Tuple[List[Trip], PrepStats]:
    """
    Run the full cleaning pipeline over one vessel's time-sorted records.

    Trip ids count up from 0 over the trips this vessel emits.
    """
    stats = PrepStats(records_in=len(records), vessels=1)
    if not records:
        return [], stats

    track = Track.from_records(records)
    if vessel_type is not None:
        track.vessel_type = vessel_type

    deduped = deduplicate_track(track)
    stats.duplicates = len(track) - len(deduped)

    annotated = annotate_kinematics(deduped)
    cleaned = filter_speed_outliers(annotated, cfg)
    stats.outliers = len(annotated) - len(cleaned)

    stationary = int((cleaned.speed < cfg.s_min).sum())
    stats.stationary = stationary
    raw_trips = split_and_filter_stationary(cleaned, cfg)
    kept_raw = sum(len(t) for t in raw_trips)
    stats.short_trip_points = len(cleaned) - stationary - kept_raw

    trips: List[Trip] = []
    for raw in raw_trips:
        origin = assign_origin(raw, poi_index, cfg)
        trip = resample_trip(raw, cfg, trip_id=len(trips), origin_poi=origin)
        if trip is None:
            stats.short_grid_points += len(raw)
            continue
        stats.retained_points += len(raw)
        trips.append(trip)

    stats.trips = len(trips)
    return trips, stats


def preprocess_fleet(
    vessels: Mapping[str, Sequence[AisRecord]],
    poi_index: Optional[PoiIndex],
    vessel_types: Optional[Mapping[str, int]],
    cfg: PrepConfig,
    workers: int = 1,
) -> Tuple[List[Trip], PrepStats]:
    """
    Preprocess every vessel, concurrently when ``workers`` > 1.

    Args:
        vessels: vessel_id -> time-sorted records (see ``group_by_vessel``).
        poi_index: Ports used for trip origins; None disables origins.
        vessel_types: vessel_id -> type code; overrides types carried by records.
        cfg: Cleaning thresholds.
        workers: Thread count. Vessels share no state, and results come back
            in input vessel order whatever the count.

    Returns:
        Tuple of (trips in vessel order, aggregated PrepStats).
    """
    types = vessel_types or {}

    def run(item: Tuple[str, Sequence[AisRecord]]):
        vid, recs = item
        return process_vessel(recs, poi_index, cfg, types.get(vid))

    items = list(vessels.items())
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, items))
    else:
        results = [run(item) for item in items]

    trips: List[Trip] = []
    total = PrepStats()
    for vessel_trips, stats in results:
        trips.extend(vessel_trips)
        total = total + stats

    metrics = MetricsCollector()
    metrics.record_drops(total.dropped)
    metrics.record_trips(total.trips)

    logger.info(
        f"Preprocessed {total.vessels} vessels: {total.trips} trips, "
        f"{total.retained_points}/{total.records_in} points retained"
    )
    if total.trips == 0:
        logger.warning("No trips survived preprocessing")
    return trips, total


def dataset_statistics(trips: Iterable[Trip], horizons: Sequence[int]) -> DatasetStatistics:
    """
    Count vessels, trips and grid points, plus the points that have a known
    future position at each horizon (the examples each horizon can yield).
    """
    vessels = set()
    n_trips = 0
    points = 0
    per_horizon = {h: 0 for h in horizons}
    for trip in trips:
        vessels.add(trip.vessel_id)
        n_trips += 1
        points += len(trip)
        for h in horizons:
            last_source = trip.end_time - 60 * h
            per_horizon[h] += int(np.searchsorted(trip.timestamps, last_source, side="right"))
    return DatasetStatistics(
        vessels=len(vessels),
        trips=n_trips,
        points=points,
        points_per_horizon=per_horizon,
    )
