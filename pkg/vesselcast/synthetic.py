"""
Synthetic AIS fleets.

Vessels sail great-circle courses at a constant (optionally jittered) speed
and report at a fixed interval. Faults seen in real feeds can be injected:
repeated reports, GPS spikes, stops and transmission gaps. Every vessel gets
a port at its starting position, so generated trips carry an origin.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, model_validator

from vesselcast.config import ColumnMapping
from vesselcast.geo import KNOT_MS, GeoPoint
from vesselcast.geo.geodesy import destination_point_np
from vesselcast.ingest import AisRecord, Poi
from vesselcast.io_utils import atomic_output

logger = logging.getLogger(__name__)

MMSI_BASE = 244_000_000
SPIKE_DISTANCE_M = 5_000.0


class FleetSpec(BaseModel):
    """Shape of a generated fleet."""
    n_vessels: int = 100
    interval_s: int = 30
    duration_s: int = 4 * 3600
    start_time: int = 1_443_657_600  # 2015-10-01 UTC
    start_spread_s: int = 3600
    speed_range_kt: Tuple[float, float] = (8.0, 16.0)
    speed_jitter: float = 0.0  # relative std of per-step speed
    lon_range: Tuple[float, float] = (-6.0, -4.0)
    lat_range: Tuple[float, float] = (47.5, 48.8)
    vessel_types: Tuple[int, ...] = (30, 52, 60, 70, 80)
    duplicate_rate: float = 0.0  # per report
    spike_rate: float = 0.0  # per report
    stop_probability: float = 0.0  # per vessel
    stop_s: int = 1800
    gap_probability: float = 0.0  # per vessel
    gap_s: int = 3600

    @model_validator(mode="after")
    def _check(self) -> "FleetSpec":
        if self.n_vessels < 1 or self.interval_s < 1 or self.duration_s < self.interval_s:
            raise ValueError("need at least one vessel and one reporting interval")
        lo, hi = self.speed_range_kt
        if not 0 < lo <= hi:
            raise ValueError("speed range must be positive and ordered")
        for name in ("duplicate_rate", "spike_rate", "stop_probability", "gap_probability"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must be within [0, 1]")
        if self.speed_jitter < 0:
            raise ValueError("speed_jitter must be >= 0")
        if not self.vessel_types:
            raise ValueError("at least one vessel type is required")
        return self


def _window(rng: np.random.Generator, n: int, width: int) -> Optional[Tuple[int, int]]:
    """A random [a, b) index window away from both ends of an n-point track."""
    margin = max(1, n // 10)
    if n - 2 * margin <= width:
        return None
    a = int(rng.integers(margin, n - margin - width))
    return a, a + width


def _vessel_track(spec: FleetSpec, rng: np.random.Generator):
    n = spec.duration_s // spec.interval_s + 1
    t0 = spec.start_time + int(rng.integers(0, spec.start_spread_s + 1))
    t = t0 + spec.interval_s * np.arange(n, dtype=np.int64)

    speed = np.full(n - 1, rng.uniform(*spec.speed_range_kt))
    if spec.speed_jitter > 0:
        speed = speed * np.clip(1.0 + spec.speed_jitter * rng.standard_normal(n - 1), 0.1, None)
    step = speed * KNOT_MS * spec.interval_s

    if rng.random() < spec.stop_probability:
        w = _window(rng, n - 1, spec.stop_s // spec.interval_s)
        if w:
            step[w[0]:w[1]] = 0.0
    cumdist = np.concatenate([[0.0], np.cumsum(step)])

    lon0 = rng.uniform(*spec.lon_range)
    lat0 = rng.uniform(*spec.lat_range)
    bearing = rng.uniform(0.0, 360.0)
    lon, lat = destination_point_np(np.full(n, lon0), np.full(n, lat0), bearing, cumdist)

    keep = np.ones(n, dtype=bool)
    if rng.random() < spec.gap_probability:
        w = _window(rng, n, spec.gap_s // spec.interval_s)
        if w:
            keep[w[0]:w[1]] = False

    spikes = rng.random(n) < spec.spike_rate
    margin = max(1, n // 20)
    spikes[:margin] = False
    spikes[-margin:] = False
    if spikes.any():
        k = int(spikes.sum())
        lon[spikes], lat[spikes] = destination_point_np(
            lon[spikes], lat[spikes], rng.uniform(0.0, 360.0, k), np.full(k, SPIKE_DISTANCE_M),
        )

    duplicates = rng.random(n) < spec.duplicate_rate
    return t, lon, lat, keep, duplicates, GeoPoint(float(lon0), float(lat0))


def generate_fleet(spec: Optional[FleetSpec] = None, seed: int = 0) -> Tuple[List[AisRecord], List[Poi]]:
    """
    Generate a fleet and its ports.

    Returns:
        Tuple of (records in timestamp order, one POI per vessel start).
        The same spec and seed always yield the same output.
    """
    spec = spec or FleetSpec()
    rng = np.random.default_rng(seed)
    records: List[AisRecord] = []
    pois: List[Poi] = []
    for i in range(spec.n_vessels):
        vid = str(MMSI_BASE + i)
        vtype = int(rng.choice(spec.vessel_types))
        t, lon, lat, keep, dup, start = _vessel_track(spec, rng)
        pois.append(Poi(poi_id=i + 1, pos=start, name=f"port-{i + 1}"))
        for j in np.flatnonzero(keep):
            record = AisRecord(vid, int(t[j]), GeoPoint(float(lon[j]), float(lat[j])), vtype)
            records.append(record)
            if dup[j]:
                records.append(record)

    records.sort(key=lambda r: r.timestamp)
    logger.info(f"Generated {len(records)} reports for {spec.n_vessels} vessels (seed {seed})")
    return records, pois


# ============================================================================
# Writers in the ingestion formats
# ============================================================================

def write_ais_csv(
    records: Sequence[AisRecord],
    path: Union[str, Path],
    mapping: Optional[ColumnMapping] = None,
) -> None:
    m = mapping or ColumnMapping()
    scale = 1000 if m.timestamp_unit == "ms" else 1
    frame = pd.DataFrame({
        m.vessel_id: [r.vessel_id for r in records],
        m.timestamp: np.array([r.timestamp for r in records], dtype=np.int64) * scale,
        m.lon: [r.pos.lon for r in records],
        m.lat: [r.pos.lat for r in records],
    })
    if m.vessel_type:
        frame[m.vessel_type] = pd.array([r.vessel_type for r in records], dtype="Int64")
    with atomic_output(path) as f:
        frame.to_csv(f, index=False, lineterminator="\n")


def write_poi_csv(pois: Iterable[Poi], path: Union[str, Path]) -> None:
    pois = list(pois)
    frame = pd.DataFrame({
        "poi_id": [p.poi_id for p in pois],
        "lon": [p.pos.lon for p in pois],
        "lat": [p.pos.lat for p in pois],
        "name": [p.name or "" for p in pois],
    })
    with atomic_output(path) as f:
        frame.to_csv(f, index=False, lineterminator="\n")


def vessel_type_table(records: Iterable[AisRecord]) -> Dict[str, int]:
    table: Dict[str, int] = {}
    for r in records:
        if r.vessel_type is not None:
            table.setdefault(r.vessel_id, r.vessel_type)
    return table


def write_vessel_types_csv(types: Dict[str, int], path: Union[str, Path]) -> None:
    frame = pd.DataFrame({"vessel_id": list(types), "vessel_type": list(types.values())})
    with atomic_output(path) as f:
        frame.to_csv(f, index=False, lineterminator="\n")
