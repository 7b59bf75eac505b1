"""Tests for spherical geodesy."""

import math

import numpy as np
import pytest

from vesselcast.errors import InvalidInputError, InvalidIntervalError, UndefinedBearingError
from vesselcast.geo import (
    EARTH_RADIUS_M,
    GeoPoint,
    destination_point,
    haversine_m,
    initial_bearing_deg,
    lerp_point,
    speed_knots,
)
from vesselcast.geo.geodesy import haversine_m_np, initial_bearing_deg_np

PAIRS = [
    ((0.0, 0.0), (0.0, 1.0)),
    ((0.0, 0.0), (1.0, 0.0)),
    ((-4.5, 48.4), (-4.4, 48.3)),
    ((23.6, 37.9), (25.1, 36.4)),
    ((179.5, 10.0), (-179.5, 10.0)),
    ((-70.0, -33.0), (151.2, -33.9)),
    ((10.0, 60.0), (10.0, 61.0)),
    ((0.0, 89.0), (180.0, 89.0)),
    ((-5.1, 47.9), (-5.1, 47.95)),
    ((-4.0, 48.0), (-3.99, 48.0)),
    ((120.3, -10.2), (121.0, -9.8)),
    ((-45.0, 0.0), (45.0, 0.0)),
    ((2.35, 48.86), (-0.13, 51.51)),
    ((-122.4, 37.8), (139.7, 35.7)),
    ((18.4, -33.9), (115.9, -31.9)),
    ((-0.001, -0.001), (0.001, 0.001)),
    ((90.0, 45.0), (90.0, -45.0)),
    ((-179.9, -60.0), (179.9, -60.5)),
    ((23.63, 37.94), (23.64, 37.94)),
    ((-8.6, 41.1), (-9.1, 38.7)),
]


def reference_haversine(a, b):
    phi1, phi2 = math.radians(a[1]), math.radians(b[1])
    dphi = phi2 - phi1
    dlmb = math.radians(b[0] - a[0])
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def test_haversine_matches_closed_form():
    """Distance agrees with an independent haversine on fixed pairs."""
    for a, b in PAIRS:
        got = haversine_m(GeoPoint(*a), GeoPoint(*b))
        assert got == pytest.approx(reference_haversine(a, b), rel=1e-9), (a, b)


def test_haversine_examples():
    # Test 1: one degree of latitude
    assert haversine_m(GeoPoint(0, 0), GeoPoint(0, 1)) == pytest.approx(111_194.93, abs=0.01)
    # Test 2: identical points
    assert haversine_m(GeoPoint(-4.5, 48.4), GeoPoint(-4.5, 48.4)) == 0.0
    # Test 3: symmetry
    a, b = GeoPoint(-4.5, 48.4), GeoPoint(-4.4, 48.3)
    assert haversine_m(a, b) == haversine_m(b, a)


def test_bearing_cardinal_directions():
    o = GeoPoint(0, 0)
    assert initial_bearing_deg(o, GeoPoint(0, 1)) == pytest.approx(0.0, abs=1e-9)
    assert initial_bearing_deg(o, GeoPoint(1, 0)) == pytest.approx(90.0, abs=1e-9)
    assert initial_bearing_deg(o, GeoPoint(0, -1)) == pytest.approx(180.0, abs=1e-9)
    assert initial_bearing_deg(o, GeoPoint(-1, 0)) == pytest.approx(270.0, abs=1e-9)


def test_bearing_range_and_undefined():
    b = initial_bearing_deg_np(np.array([0.0, 0.0]), np.array([0.0, 0.0]), np.array([-1e-12, 0.0]), np.array([1.0, -1.0]))
    assert ((b >= 0) & (b < 360)).all()
    with pytest.raises(UndefinedBearingError):
        initial_bearing_deg(GeoPoint(3, 4), GeoPoint(3, 4))


def test_speed_knots():
    # one nautical mile in one hour
    a = GeoPoint(0, 0)
    b = destination_point(a, 0.0, 1852.0)
    assert speed_knots(a, b, 3600) == pytest.approx(1852.0 / 3600 / 0.514444, rel=1e-9)
    with pytest.raises(InvalidIntervalError):
        speed_knots(a, b, 0)


def test_destination_round_trip():
    """Projecting forward and measuring back recovers distance and bearing."""
    for (lon, lat), _ in PAIRS[:7]:
        origin = GeoPoint(lon, lat)
        for bearing in (0.0, 45.0, 133.0, 270.0):
            for distance in (10.0, 5_000.0, 150_000.0):
                p = destination_point(origin, bearing, distance)
                assert haversine_m(origin, p) == pytest.approx(distance, rel=1e-6)
                got = initial_bearing_deg(origin, p)
                diff = (got - bearing + 180.0) % 360.0 - 180.0
                assert abs(diff) < 1e-6


def test_destination_zero_distance_is_identity():
    o = GeoPoint(-4.123456789, 48.987654321)
    assert destination_point(o, 77.0, 0.0) == o
    with pytest.raises(InvalidInputError):
        destination_point(o, 0.0, -1.0)


def test_destination_wraps_antimeridian():
    p = destination_point(GeoPoint(179.9, 0.0), 90.0, 50_000.0)
    assert -180.0 <= p.lon < -179.0


def test_lerp_point():
    a, b = GeoPoint(0, 0), GeoPoint(2, 4)
    assert lerp_point(a, b, 0.5) == GeoPoint(1, 2)
    assert lerp_point(a, b, 1.0) == b
    with pytest.raises(InvalidInputError):
        lerp_point(a, b, 1.5)


def test_geopoint_validation():
    with pytest.raises(InvalidInputError):
        GeoPoint(181.0, 0.0)
    with pytest.raises(InvalidInputError):
        GeoPoint(0.0, -90.5)
    with pytest.raises(InvalidInputError):
        GeoPoint(float("nan"), 0.0)


def test_vectorized_matches_scalar():
    lon1 = np.array([a[0] for a, _ in PAIRS])
    lat1 = np.array([a[1] for a, _ in PAIRS])
    lon2 = np.array([b[0] for _, b in PAIRS])
    lat2 = np.array([b[1] for _, b in PAIRS])
    vec = haversine_m_np(lon1, lat1, lon2, lat2)
    for i, (a, b) in enumerate(PAIRS):
        assert vec[i] == haversine_m(GeoPoint(*a), GeoPoint(*b))


def test_bearing_matches_closed_form():
    for a, b in PAIRS:
        phi1, phi2 = math.radians(a[1]), math.radians(b[1])
        dlmb = math.radians(b[0] - a[0])
        y = math.sin(dlmb) * math.cos(phi2)
        x = math.cos(phi1) * math.sin(phi2) - math.sin(phi1) * math.cos(phi2) * math.cos(dlmb)
        expected = math.degrees(math.atan2(y, x)) % 360.0
        got = initial_bearing_deg(GeoPoint(*a), GeoPoint(*b))
        diff = (got - expected + 180.0) % 360.0 - 180.0
        assert abs(diff) < 1e-6, (a, b)
