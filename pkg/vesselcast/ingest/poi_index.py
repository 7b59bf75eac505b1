"""
Points of interest (ports) and nearest-POI lookup.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from vesselcast.errors import DataIOError
from vesselcast.geo import GeoPoint
from vesselcast.geo.geodesy import haversine_m_np

logger = logging.getLogger(__name__)

POI_COLUMNS = ("poi_id", "lon", "lat", "name")


@dataclass(frozen=True)
class Poi:
    """A labelled location a trip can start from."""
    poi_id: int
    pos: GeoPoint
    name: Optional[str] = None


class PoiIndex:
    """
    Nearest-neighbour lookup over a set of POIs.

    A brute-force haversine scan: POI tables hold a few hundred entries, and
    the scan runs once per trip. Ties resolve to the lowest ``poi_id``.
    """

    def __init__(self, pois: Iterable[Poi] = ()):
        by_id: Dict[int, Poi] = {}
        for poi in pois:
            by_id[poi.poi_id] = poi
        self._pois: List[Poi] = [by_id[k] for k in sorted(by_id)]
        self._lon = np.array([p.pos.lon for p in self._pois], dtype=np.float64)
        self._lat = np.array([p.pos.lat for p in self._pois], dtype=np.float64)

    def __len__(self) -> int:
        return len(self._pois)

    def __iter__(self):
        return iter(self._pois)

    def get(self, poi_id: int) -> Optional[Poi]:
        for poi in self._pois:
            if poi.poi_id == poi_id:
                return poi
        return None

    def nearest(self, p: GeoPoint) -> Optional[Tuple[Poi, float]]:
        """Return (closest POI, distance in meters), or None for an empty index."""
        if not self._pois:
            return None
        dist = haversine_m_np(p.lon, p.lat, self._lon, self._lat)
        best = int(np.argmin(dist))  # first minimum = lowest poi_id
        return self._pois[best], float(dist[best])


def parse_poi_csv(source: Union[str, Path, IO]) -> PoiIndex:
    """
    Load a POI table with header ``poi_id,lon,lat[,name]``.

    Rows with unparseable or out-of-range values are skipped with a warning.
    When a ``poi_id`` repeats, the last row wins.
    """
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return PoiIndex()
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        raise DataIOError(f"cannot read POI table: {e}") from e

    frame.columns = [c.strip() for c in frame.columns]
    missing = [c for c in POI_COLUMNS[:3] if c not in frame.columns]
    if missing:
        raise DataIOError(f"POI table lacks column(s) {missing}")

    pois: Dict[int, Poi] = {}
    skipped = 0
    for row in frame.itertuples(index=False):
        try:
            poi_id = int(getattr(row, "poi_id"))
            pos = GeoPoint(float(getattr(row, "lon")), float(getattr(row, "lat")))
        except ValueError:
            skipped += 1
            continue
        name = getattr(row, "name", "") or None
        if poi_id in pois:
            logger.warning(f"Duplicate poi_id {poi_id}; keeping the later row")
        pois[poi_id] = Poi(poi_id=poi_id, pos=pos, name=name)

    if skipped:
        logger.warning(f"Skipped {skipped} invalid POI rows")
    return PoiIndex(pois.values())


def parse_vessel_types_csv(source: Union[str, Path, IO]) -> Dict[str, int]:
    """Load a ``vessel_id,vessel_type`` table into a lookup dictionary."""
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return {}
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        raise DataIOError(f"cannot read vessel-type table: {e}") from e

    frame.columns = [c.strip() for c in frame.columns]
    if "vessel_id" not in frame.columns or "vessel_type" not in frame.columns:
        raise DataIOError("vessel-type table needs columns vessel_id,vessel_type")

    codes = pd.to_numeric(frame["vessel_type"], errors="coerce").to_numpy(dtype=np.float64)
    usable = np.isfinite(codes)
    usable[usable] = codes[usable] == np.trunc(codes[usable])
    table: Dict[str, int] = {}
    skipped = 0
    for vid, code, ok in zip(frame["vessel_id"].str.strip(), codes.tolist(), usable.tolist()):
        if vid and ok:
            table[vid] = int(code)
        else:
            skipped += 1
    if skipped:
        logger.warning(f"Skipped {skipped} vessel-type rows without an integer type")
    return table
