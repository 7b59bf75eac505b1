"""
Trajectory preprocessing: cleaning, segmentation, origins and resampling.
"""

from vesselcast.prep.cleaning import (
    annotate_kinematics,
    assign_origin,
    compute_kinematics,
    deduplicate,
    deduplicate_track,
    filter_speed_outliers,
    resample_trip,
    split_and_filter_stationary,
)
from vesselcast.prep.fleet import (
    DatasetStatistics,
    PrepStats,
    dataset_statistics,
    preprocess_fleet,
    process_vessel,
)
from vesselcast.prep.trips import KinematicPoint, Track, Trip
from vesselcast.prep.trips_io import TRIPS_HEADER, read_trips, trips_frame, write_trips

__all__ = [
    "DatasetStatistics",
    "KinematicPoint",
    "PrepStats",
    "TRIPS_HEADER",
    "Track",
    "Trip",
    "annotate_kinematics",
    "assign_origin",
    "compute_kinematics",
    "dataset_statistics",
    "deduplicate",
    "deduplicate_track",
    "filter_speed_outliers",
    "preprocess_fleet",
    "process_vessel",
    "read_trips",
    "resample_trip",
    "split_and_filter_stationary",
    "trips_frame",
    "write_trips",
]
