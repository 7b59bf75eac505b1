"""
Spherical-earth geodesy.

Distance, bearing, speed, forward projection and linear interpolation on a
sphere of radius ``EARTH_RADIUS_M``. Every scalar operation is a thin wrapper
over the vectorized numpy kernel of the same name with an ``_np`` suffix, so
the pipeline (which works on arrays) and the public per-point API produce the
same numbers.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from vesselcast.errors import InvalidInputError, InvalidIntervalError, UndefinedBearingError

ArrayLike = Union[float, np.ndarray]

EARTH_RADIUS_M = 6_371_000.0
KNOT_MS = 0.514444  # meters per second in one knot
NAUTICAL_MILE_M = 1852.0


@dataclass(frozen=True)
class EarthModel:
    """Sphere used for every distance in a process."""
    radius_m: float = EARTH_RADIUS_M

    def __post_init__(self) -> None:
        if not self.radius_m > 0:
            raise InvalidInputError(f"earth radius must be positive, got {self.radius_m}")


EARTH = EarthModel()


@dataclass(frozen=True, slots=True)
class GeoPoint:
    """A lon/lat position in degrees."""
    lon: float
    lat: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lon) and math.isfinite(self.lat)):
            raise InvalidInputError(f"non-finite coordinate ({self.lon}, {self.lat})")
        if not -180.0 <= self.lon <= 180.0:
            raise InvalidInputError(f"longitude {self.lon} outside [-180, 180]")
        if not -90.0 <= self.lat <= 90.0:
            raise InvalidInputError(f"latitude {self.lat} outside [-90, 90]")


# ============================================================================
# Vectorized kernels
# ============================================================================

def haversine_m_np(lon1: ArrayLike, lat1: ArrayLike, lon2: ArrayLike, lat2: ArrayLike) -> np.ndarray:
    """Great-circle distance in meters between coordinate arrays (degrees)."""
    phi1 = np.radians(lat1)
    phi2 = np.radians(lat2)
    dphi = np.abs(phi2 - phi1)
    dlmb = np.abs(np.radians(lon2) - np.radians(lon1))
    a = np.sin(dphi / 2.0) ** 2 + (np.cos(phi1) * np.cos(phi2)) * np.sin(dlmb / 2.0) ** 2
    return 2.0 * EARTH.radius_m * np.arcsin(np.sqrt(np.minimum(a, 1.0)))


def initial_bearing_deg_np(lon1: ArrayLike, lat1: ArrayLike, lon2: ArrayLike, lat2: ArrayLike) -> np.ndarray:
    """Initial great-circle bearing in [0, 360), clockwise from true north."""
    phi1 = np.radians(lat1)
    phi2 = np.radians(lat2)
    dlmb = np.radians(lon2) - np.radians(lon1)
    y = np.sin(dlmb) * np.cos(phi2)
    x = np.cos(phi1) * np.sin(phi2) - np.sin(phi1) * np.cos(phi2) * np.cos(dlmb)
    deg = np.mod(np.degrees(np.arctan2(y, x)), 360.0)
    # mod of a tiny negative angle rounds up to exactly 360
    return np.where(deg >= 360.0, 0.0, deg)


def speed_knots_np(distance_m: ArrayLike, dt_s: ArrayLike) -> np.ndarray:
    """Speed over ground in knots from a distance and a positive interval."""
    return np.asarray(distance_m, dtype=np.float64) / np.asarray(dt_s, dtype=np.float64) / KNOT_MS


def destination_point_np(lon: ArrayLike, lat: ArrayLike, bearing_deg: ArrayLike, distance_m: ArrayLike):
    """Forward great-circle projection; returns (lon, lat) arrays in degrees."""
    lon = np.asarray(lon, dtype=np.float64)
    lat = np.asarray(lat, dtype=np.float64)
    distance_m = np.asarray(distance_m, dtype=np.float64)
    delta = distance_m / EARTH.radius_m
    theta = np.radians(bearing_deg)
    phi1 = np.radians(lat)
    lmb1 = np.radians(lon)
    sin_phi2 = np.sin(phi1) * np.cos(delta) + np.cos(phi1) * np.sin(delta) * np.cos(theta)
    phi2 = np.arcsin(np.clip(sin_phi2, -1.0, 1.0))
    lmb2 = lmb1 + np.arctan2(
        np.sin(theta) * np.sin(delta) * np.cos(phi1),
        np.cos(delta) - np.sin(phi1) * sin_phi2,
    )
    out_lon = np.degrees(lmb2)
    out_lon = np.where(np.abs(out_lon) > 180.0, np.mod(out_lon + 540.0, 360.0) - 180.0, out_lon)
    out_lat = np.degrees(phi2)
    # zero distance is the identity, bit for bit
    still = distance_m == 0.0
    return np.where(still, lon, out_lon), np.where(still, lat, out_lat)


def lerp_np(a: ArrayLike, b: ArrayLike, f: ArrayLike) -> np.ndarray:
    """Component-wise a + f*(b - a), returning b exactly when f == 1."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    return np.where(f == 1.0, b, a + f * (b - a))


# ============================================================================
# Per-point API
# ============================================================================

def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters."""
    _require_finite(a, b)
    return float(haversine_m_np(a.lon, a.lat, b.lon, b.lat))


def initial_bearing_deg(a: GeoPoint, b: GeoPoint) -> float:
    """Initial bearing from a to b in [0, 360)."""
    _require_finite(a, b)
    if a.lon == b.lon and a.lat == b.lat:
        raise UndefinedBearingError(f"bearing undefined between identical points {a}")
    return float(initial_bearing_deg_np(a.lon, a.lat, b.lon, b.lat))


def speed_knots(a: GeoPoint, b: GeoPoint, dt: float) -> float:
    """Average speed in knots covering a -> b in dt seconds."""
    if not dt > 0:
        raise InvalidIntervalError(f"interval must be positive, got {dt}")
    return float(speed_knots_np(haversine_m(a, b), dt))


def destination_point(origin: GeoPoint, bearing: float, distance: float) -> GeoPoint:
    """Point reached travelling ``distance`` meters from origin on ``bearing`` degrees."""
    if not distance >= 0:
        raise InvalidInputError(f"distance must be non-negative, got {distance}")
    if distance == 0:
        return origin
    lon, lat = destination_point_np(origin.lon, origin.lat, bearing, distance)
    return GeoPoint(float(lon), float(np.clip(lat, -90.0, 90.0)))


def lerp_point(a: GeoPoint, b: GeoPoint, f: float) -> GeoPoint:
    """Linear interpolation in raw lon/lat (no antimeridian unwrapping)."""
    if not 0.0 <= f <= 1.0:
        raise InvalidInputError(f"interpolation fraction {f} outside [0, 1]")
    if f == 0.0:
        return a
    if f == 1.0:
        return b
    return GeoPoint(a.lon + f * (b.lon - a.lon), a.lat + f * (b.lat - a.lat))


def _require_finite(*points: GeoPoint) -> None:
    # GeoPoint validates on construction; this catches objects built around it
    for p in points:
        if not (math.isfinite(p.lon) and math.isfinite(p.lat)):
            raise InvalidInputError(f"non-finite coordinate ({p.lon}, {p.lat})")
