
from vesselcast.geo.geodesy import (
    EARTH,
    EARTH_RADIUS_M,
    KNOT_MS,
    NAUTICAL_MILE_M,
    EarthModel,
    GeoPoint,
    destination_point,
    haversine_m,
    initial_bearing_deg,
    lerp_point,
    speed_knots,
)

__all__ = [
    "EARTH",
    "EARTH_RADIUS_M",
    "KNOT_MS",
    "NAUTICAL_MILE_M",
    "EarthModel",
    "GeoPoint",
    "destination_point",
    "haversine_m",
    "initial_bearing_deg",
    "lerp_point",
    "speed_knots",
]
