"""Tests for trajectory cleaning, segmentation, resampling and the trips file."""

import numpy as np
import pytest

from vesselcast.config import PrepConfig
from vesselcast.errors import DataIOError
from vesselcast.geo import GeoPoint, haversine_m
from vesselcast.ingest import Poi, PoiIndex, group_by_vessel
from vesselcast.prep import (
    Track,
    annotate_kinematics,
    assign_origin,
    compute_kinematics,
    dataset_statistics,
    deduplicate,
    filter_speed_outliers,
    preprocess_fleet,
    process_vessel,
    read_trips,
    resample_trip,
    split_and_filter_stationary,
    write_trips,
)
from vesselcast.synthetic import FleetSpec, generate_fleet
from conftest import make_records, straight_track


def test_deduplicate_keeps_first_of_each_timestamp():
    records = make_records("1", [(10, 0.0, 0.0), (10, 0.5, 0.5), (20, 0.1, 0.0), (20, 0.1, 0.0)])
    out = deduplicate(records)
    assert [r.timestamp for r in out] == [10, 20]
    assert out[0].pos == GeoPoint(0.0, 0.0)


def test_kinematics_first_point_copies_second():
    t = np.array([0, 60, 120])
    lon = np.array([0.0, 0.0, 0.01])
    lat = np.array([0.0, 0.01, 0.01])
    speed, bearing = compute_kinematics(t, lon, lat)
    assert speed[0] == speed[1]
    assert bearing[0] == bearing[1] == pytest.approx(0.0, abs=1e-9)
    assert bearing[2] == pytest.approx(90.0, abs=0.01)


def test_kinematics_singleton_and_stationary_bearing():
    speed, bearing = compute_kinematics(np.array([5]), np.array([1.0]), np.array([1.0]))
    assert speed.tolist() == [0.0] and bearing.tolist() == [0.0]

    # a point that has not moved keeps the previous bearing
    t = np.array([0, 60, 120])
    lon = np.array([0.0, 0.01, 0.01])
    lat = np.array([0.0, 0.0, 0.0])
    speed, bearing = compute_kinematics(t, lon, lat)
    assert speed[2] == 0.0
    assert bearing[2] == bearing[1] == pytest.approx(90.0, abs=1e-9)


def test_annotate_ten_knots():
    track = annotate_kinematics(straight_track(speed_kt=10.0, n=5))
    assert track.speed == pytest.approx(np.full(5, 10.0), rel=1e-9)
    points = track.points
    assert [p.timestamp for p in points] == track.timestamps.tolist()
    assert points[2].pos == GeoPoint(float(track.lon[2]), float(track.lat[2]))
    assert points[2].speed == pytest.approx(10.0, rel=1e-9)


def test_outlier_spike_is_removed_and_kinematics_recomputed():
    records = straight_track(n=10)
    spike = records[5]
    far = GeoPoint(spike.pos.lon + 0.1, spike.pos.lat)  # ~7 km in 30 s
    records[5] = type(spike)(spike.vessel_id, spike.timestamp, far)
    cleaned = filter_speed_outliers(annotate_kinematics(records), PrepConfig())
    assert len(cleaned) == 9
    assert 0 < cleaned.speed.max() <= 50.0
    # the survivor after the gap is measured from the last kept point
    expected = haversine_m(records[4].pos, records[6].pos) / 60 / 0.514444
    assert cleaned.speed[5] == pytest.approx(expected, rel=1e-9)


def test_outlier_filter_without_violations_is_identity():
    track = annotate_kinematics(straight_track(n=10))
    assert filter_speed_outliers(track, PrepConfig()) is track


def test_stationary_points_split_trips(prep_cfg):
    moving_a = straight_track(n=40)
    last = moving_a[-1]
    stopped = make_records("1", [(last.timestamp + 30 * (i + 1), last.pos.lon, last.pos.lat) for i in range(10)])
    moving_b = straight_track(n=40, t0=stopped[-1].timestamp + 30, lat0=last.pos.lat)
    track = annotate_kinematics(moving_a + stopped + moving_b)
    trips = split_and_filter_stationary(track, prep_cfg)
    assert len(trips) == 2
    assert all((t.speed >= prep_cfg.s_min).all() for t in trips)


def test_gap_splits_and_short_trips_drop(prep_cfg):
    a = straight_track(n=40)
    b = straight_track(n=20, t0=a[-1].timestamp + 3000, lat0=a[-1].pos.lat)
    track = annotate_kinematics(a + b)
    trips = split_and_filter_stationary(track, prep_cfg)
    # the 20-point trip after the 50-minute gap is below length_min
    assert [len(t) for t in trips] == [40]


def test_assign_origin(prep_cfg):
    track = annotate_kinematics(straight_track(lon0=-5.0, lat0=48.0))
    near = PoiIndex([Poi(1, GeoPoint(-5.0, 48.01)), Poi(2, GeoPoint(-3.0, 48.0))])
    assert assign_origin(track, near, prep_cfg) == 1
    far = PoiIndex([Poi(2, GeoPoint(-3.0, 48.0))])
    assert assign_origin(track, far, prep_cfg) is None
    assert assign_origin(track, None, prep_cfg) is None


def test_resample_grid_spacing_and_endpoints(prep_cfg):
    track = annotate_kinematics(straight_track(n=61, interval=30))
    trip = resample_trip(track, prep_cfg, trip_id=3, origin_poi=9)
    assert trip.trip_id == 3 and trip.origin_poi == 9
    assert (np.diff(trip.timestamps) == 90).all()
    assert trip.timestamps[0] == track.timestamps[0]
    assert trip.timestamps[-1] <= track.timestamps[-1]
    assert len(trip) == 21
    assert trip.lon[0] == track.lon[0] and trip.lat[0] == track.lat[0]
    assert trip.start_pos == GeoPoint(float(track.lon[0]), float(track.lat[0]))
    assert trip.speed == pytest.approx(np.full(21, 10.0), rel=1e-6)
    points = trip.points
    assert len(points) == 21
    assert all(b.timestamp - a.timestamp == 90 for a, b in zip(points, points[1:]))
    assert points[0].pos == trip.start_pos
    assert points[-1].bearing == trip.bearing[-1]


def test_resample_interpolates_between_raw_points():
    track = annotate_kinematics(make_records("1", [(0, 0.0, 0.0), (100, 1.0, 2.0), (400, 1.0, 5.0)]))
    trip = resample_trip(track, PrepConfig(rate=50, gap_max=2700))
    assert trip.timestamps.tolist() == [0, 50, 100, 150, 200, 250, 300, 350, 400]
    assert trip.lon[1] == pytest.approx(0.5)
    assert trip.lat[3] == pytest.approx(2.5)
    assert trip.lat[-1] == 5.0


def test_resample_too_short_returns_none():
    track = annotate_kinematics(make_records("1", [(0, 0.0, 0.0), (60, 0.0, 0.01)]))
    assert resample_trip(track, PrepConfig()) is None


def test_all_stationary_vessel_yields_no_trips(prep_cfg):
    records = make_records("1", [(i * 30, -4.0, 48.0) for i in range(50)])
    trips, stats = process_vessel(records, None, prep_cfg)
    assert trips == []
    assert stats.stationary == 50
    assert stats.is_balanced()


def test_fleet_accounting_balances_with_faults():
    """Every input record ends up in exactly one drop counter or retained."""
    spec = FleetSpec(
        n_vessels=40, duration_s=3 * 3600, speed_jitter=0.05,
        duplicate_rate=0.02, spike_rate=0.01, stop_probability=0.5, gap_probability=0.5,
    )
    records, pois = generate_fleet(spec, seed=11)
    cfg = PrepConfig()
    trips, stats = preprocess_fleet(group_by_vessel(records), PoiIndex(pois), None, cfg, workers=4)

    assert stats.records_in == len(records)
    assert stats.is_balanced()
    assert stats.duplicates > 0 and stats.outliers > 0 and stats.stationary > 0
    for trip in trips:
        assert (np.diff(trip.timestamps) == cfg.rate).all()
        assert trip.speed.max() <= cfg.s_max


def test_fleet_preprocessing_is_deterministic():
    records, pois = generate_fleet(FleetSpec(n_vessels=10, spike_rate=0.01, duplicate_rate=0.01), seed=3)
    vessels = group_by_vessel(records)
    a, _ = preprocess_fleet(vessels, PoiIndex(pois), None, PrepConfig(), workers=1)
    b, _ = preprocess_fleet(vessels, PoiIndex(pois), None, PrepConfig(), workers=4)
    assert [(t.vessel_id, t.trip_id) for t in a] == [(t.vessel_id, t.trip_id) for t in b]
    for x, y in zip(a, b):
        assert np.array_equal(x.lon, y.lon) and np.array_equal(x.lat, y.lat)


def test_vessel_type_table_overrides_records(small_fleet):
    records, _ = small_fleet
    vessels = group_by_vessel(records)
    first = next(iter(vessels))
    trips, _ = preprocess_fleet(vessels, None, {first: 99}, PrepConfig())
    assert {t.vessel_type for t in trips if t.vessel_id == first} == {99}


def test_trips_file_round_trip_is_bitwise(tmp_path, fleet_trips):
    trips, _ = fleet_trips
    path = tmp_path / "trips.csv"
    write_trips(trips, path)
    again = read_trips(path)
    assert len(again) == len(trips)
    for a, b in zip(trips, again):
        assert (a.vessel_id, a.trip_id, a.vessel_type, a.origin_poi) == (b.vessel_id, b.trip_id, b.vessel_type, b.origin_poi)
        assert a.start_pos == b.start_pos
        for col in ("timestamps", "lon", "lat", "speed", "bearing"):
            assert np.array_equal(getattr(a, col), getattr(b, col)), col
    assert path.read_bytes().count(b"\r") == 0


def test_read_trips_rejects_other_files(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(DataIOError):
        read_trips(path)


def test_dataset_statistics(fleet_trips):
    trips, _ = fleet_trips
    ds = dataset_statistics(trips, [10, 60])
    assert ds.vessels == 6
    assert ds.trips == len(trips)
    assert ds.points == sum(len(t) for t in trips)
    assert ds.points_per_horizon[10] > ds.points_per_horizon[60] > 0
