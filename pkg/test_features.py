"""Tests for feature extraction and category encoding."""

import math

import numpy as np
import pandas as pd
import pytest

from vesselcast.config import PrepConfig
from vesselcast.errors import InvalidInputError
from vesselcast.features import (
    FEATURE_NAMES,
    N_FEATURES,
    CategoryEncoder,
    CategoryEncoders,
    TrainingSet,
    build_inference_matrix,
    build_training_set,
    encode_categories,
    extract_features,
    position_at,
    write_matrix,
)
from vesselcast.geo import GeoPoint
from vesselcast.prep import Trip, annotate_kinematics, resample_trip
from conftest import straight_track


def make_trip(n_raw=241, vessel_type=70, origin=4) -> Trip:
    """Two hours of due-north sailing at 10 kt on a 90 s grid."""
    track = annotate_kinematics(straight_track(n=n_raw, interval=30))
    track.vessel_type = vessel_type
    return resample_trip(track, PrepConfig(), trip_id=0, origin_poi=origin)


def test_feature_order_is_frozen():
    assert FEATURE_NAMES == (
        "v_type", "lon", "lat", "sp", "br", "extrap_diff_lon", "extrap_diff_lat",
        "last_diff_lon", "last_diff_lat", "origin", "orig_dist", "delta_t",
    )
    assert N_FEATURES == 12


def test_extract_features_values():
    trip = make_trip()
    fv = extract_features(trip, 20, 10)
    assert fv["v_type"] == 70.0
    assert fv["origin"] == 4.0
    assert fv["lon"] == trip.lon[20] and fv["lat"] == trip.lat[20]
    assert fv["sp"] == pytest.approx(10.0, rel=1e-6)
    assert fv["delta_t"] == 10.0
    # 10 kt for 10 minutes due north
    expected_dlat = math.degrees(10 * 0.514444 * 600 / 6_371_000.0)
    assert fv["extrap_diff_lat"] == pytest.approx(expected_dlat, rel=1e-6)
    assert fv["extrap_diff_lon"] == pytest.approx(0.0, abs=1e-9)
    assert fv["last_diff_lat"] == pytest.approx(expected_dlat, rel=1e-6)
    assert fv["orig_dist"] == pytest.approx(20 * 90 * 10 * 0.514444, rel=1e-6)


def test_last_diff_missing_near_trip_start():
    trip = make_trip()
    fv = extract_features(trip, 2, 10)
    assert fv.is_missing("last_diff_lon") and fv.is_missing("last_diff_lat")
    assert not fv.is_missing("extrap_diff_lat")


def test_extract_features_rejects_bad_index():
    with pytest.raises(InvalidInputError):
        extract_features(make_trip(), 10_000, 10)


def test_position_at_interpolates_and_bounds():
    trip = make_trip()
    mid = position_at(trip, int(trip.timestamps[0]) + 45)
    assert mid.lat == pytest.approx((trip.lat[0] + trip.lat[1]) / 2)
    assert position_at(trip, trip.end_time + 1) is None
    assert position_at(trip, trip.start_time) == GeoPoint(float(trip.lon[0]), float(trip.lat[0]))


def test_training_set_targets_and_eligibility():
    trip = make_trip()
    ts = build_training_set([trip], [10, 60])
    n10 = int((trip.timestamps + 600 <= trip.end_time).sum())
    n60 = int((trip.timestamps + 3600 <= trip.end_time).sum())
    assert len(ts) == n10 + n60
    assert ts.delta_t[:n10].tolist() == [10.0] * n10
    # target is the future position minus the current one
    i = 5
    future = position_at(trip, int(trip.timestamps[i]) + 600)
    assert ts.dlat[i] == future.lat - trip.lat[i]
    assert ts.future_lat[i] == future.lat
    assert ts.horizons == (10, 60)


def test_training_set_encodes_categories_first_seen():
    a = make_trip(vessel_type=80, origin=None)
    b = make_trip(vessel_type=30, origin=7)
    ts = build_training_set([a, b], [10])
    assert ts.encoders.vessel_type.mapping == {80: 0, 30: 1}
    assert ts.encoders.origin.mapping == {7: 0}
    assert np.isnan(ts.X[0, 9])
    assert ts.X[-1, 0] == 1.0


def test_short_trip_yields_no_examples():
    trip = make_trip(n_raw=30)
    ts = build_training_set([trip], [60])
    assert len(ts) == 0
    assert ts.X.shape == (0, N_FEATURES)


def test_training_set_iteration_and_subset():
    ts = build_training_set([make_trip()], [10])
    ex = ts.example(3)
    assert ex.source_timestamp == int(ts.timestamps[3])
    sub = ts.subset(np.array([3, 4]))
    assert len(sub) == 2 and sub.example(0).target_dlat == ex.target_dlat
    rebuilt = TrainingSet.from_examples(list(sub))
    assert np.array_equal(rebuilt.X, sub.X, equal_nan=True)


def test_inference_matrix_fans_out_per_horizon():
    trip = make_trip()
    enc = CategoryEncoders.fit_trips([trip])
    batch = build_inference_matrix([trip], [10, 20], enc)
    assert len(batch) == 2 * len(trip)
    assert batch.horizons[:4].tolist() == [10, 20, 10, 20]
    assert batch.timestamps[0] == batch.timestamps[1] == trip.timestamps[0]
    # rows agree with the training-set rows of the same point and horizon
    ts = build_training_set([trip], [10, 20], encoders=enc)
    assert np.array_equal(batch.X[2 * 5], ts.X[5], equal_nan=True)


def test_category_encoder_unknown_and_round_trip():
    enc = CategoryEncoder().fit([5, 3, 5, None])
    assert enc.encode(3) == 1.0
    assert np.isnan(enc.encode(99)) and np.isnan(enc.encode(None))
    assert CategoryEncoder.from_dict(enc.to_dict()).mapping == enc.mapping
    codes = encode_categories([9, 8, 9])
    assert codes.tolist() == [0.0, 1.0, 0.0]


def test_write_matrix_leaves_missing_empty(tmp_path):
    ts = build_training_set([make_trip()], [10])
    path = tmp_path / "matrix.csv"
    write_matrix(ts, path)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["dlon", "dlat", "ts"] + [f"f{i}" for i in range(12)]
    assert frame["f7"].isna().sum() == int(np.isnan(ts.X[:, 7]).sum()) > 0
    assert ",," in path.read_text().splitlines()[1]
