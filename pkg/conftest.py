"""Shared fixtures for the vesselcast test suite."""

from typing import List, Sequence, Tuple

import numpy as np
import pytest

from vesselcast.config import GbdtParams, PrepConfig
from vesselcast.geo import GeoPoint
from vesselcast.ingest import AisRecord, PoiIndex, group_by_vessel
from vesselcast.prep import preprocess_fleet
from vesselcast.synthetic import FleetSpec, generate_fleet


def make_records(vessel_id: str, points: Sequence[Tuple[int, float, float]], vessel_type=None) -> List[AisRecord]:
    """Records from (timestamp, lon, lat) triples."""
    return [AisRecord(vessel_id, t, GeoPoint(lon, lat), vessel_type) for t, lon, lat in points]


def straight_track(vessel_id: str = "1", n: int = 60, interval: int = 30, speed_kt: float = 10.0,
                   t0: int = 1_000_000, lon0: float = -5.0, lat0: float = 48.0) -> List[AisRecord]:
    """A vessel sailing due north at constant speed."""
    step_deg = np.degrees(speed_kt * 0.514444 * interval / 6_371_000.0)
    return make_records(vessel_id, [(t0 + i * interval, lon0, lat0 + i * step_deg) for i in range(n)])


@pytest.fixture
def prep_cfg():
    return PrepConfig()


@pytest.fixture
def fast_params():
    return GbdtParams(n_estimators=40, learning_rate=0.3, max_depth=4, n_bins=64)


@pytest.fixture(scope="session")
def small_fleet():
    """Six clean constant-velocity vessels, three hours each."""
    return generate_fleet(FleetSpec(n_vessels=6, duration_s=3 * 3600), seed=7)


@pytest.fixture(scope="session")
def fleet_trips(small_fleet):
    records, pois = small_fleet
    trips, stats = preprocess_fleet(group_by_vessel(records), PoiIndex(pois), None, PrepConfig())
    return trips, stats
