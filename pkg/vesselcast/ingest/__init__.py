"""
AIS, POI and vessel-type ingestion.
"""

from vesselcast.ingest.ais_reader import (
    AisCsvReader,
    AisRecord,
    IngestStats,
    filter_window,
    group_by_vessel,
    parse_ais_csv,
    read_ais_records,
)
from vesselcast.ingest.poi_index import Poi, PoiIndex, parse_poi_csv, parse_vessel_types_csv

__all__ = [
    "AisCsvReader",
    "AisRecord",
    "IngestStats",
    "Poi",
    "PoiIndex",
    "filter_window",
    "group_by_vessel",
    "parse_ais_csv",
    "parse_poi_csv",
    "parse_vessel_types_csv",
    "read_ais_records",
]
