"""Tests for AIS, POI and vessel-type ingestion."""

import io

import numpy as np
import pytest

from vesselcast.config import ColumnMapping
from vesselcast.errors import ConfigError, DataIOError
from vesselcast.geo import GeoPoint, haversine_m
from vesselcast.ingest import (
    Poi,
    PoiIndex,
    filter_window,
    group_by_vessel,
    parse_ais_csv,
    parse_poi_csv,
    parse_vessel_types_csv,
    read_ais_records,
)
from conftest import make_records

BREST_CSV = """sourcemmsi,navigationalstatus,rateofturn,speedoverground,courseoverground,trueheading,lon,lat,t
227705102,15,-127,0.0,264.0,511,-4.4657183,48.38249,1443650402
227705102,15,-127,0.0,264.0,511,-4.4657183,48.38249,1443650412
245257000,0,0,0.1,13.1,36,-4.4960117,48.38304,1443650406
"""


def test_parse_brest_schema():
    records, stats = read_ais_records(io.StringIO(BREST_CSV))
    assert len(records) == 3
    assert records[0].vessel_id == "227705102"
    assert records[0].timestamp == 1443650402
    assert records[0].pos == GeoPoint(-4.4657183, 48.38249)
    assert stats.rows_read == 3 and stats.rows_valid == 3


def test_malformed_and_out_of_range_rows_are_counted():
    """Bad rows are skipped and counted, never fatal."""
    text = (
        "sourcemmsi,t,lon,lat\n"
        "1,100,-4.0,48.0\n"
        "2,abc,-4.0,48.0\n"
        ",100,-4.0,48.0\n"
        "3,100,-4.0,95.0\n"
        "4,100,190.0,48.0\n"
        "5,110,-4.1,48.1\n"
    )
    records, stats = read_ais_records(io.StringIO(text))
    assert [r.vessel_id for r in records] == ["1", "5"]
    assert stats.rows_read == 6
    assert stats.rows_malformed == 2
    assert stats.rows_out_of_range == 2


def test_millisecond_timestamps_and_custom_columns():
    mapping = ColumnMapping(vessel_id="vessel_id", timestamp="t", timestamp_unit="ms", vessel_type="shiptype")
    text = "vessel_id,t,lon,lat,shiptype\nabc,1546300800123,23.6,37.9,70\nabc,1546300810999,23.61,37.91,\n"
    records, _ = read_ais_records(io.StringIO(text), mapping)
    assert [r.timestamp for r in records] == [1546300800, 1546300810]
    assert records[0].vessel_type == 70
    assert records[1].vessel_type is None


def test_missing_mapped_column_is_config_error():
    with pytest.raises(ConfigError):
        parse_ais_csv(io.StringIO("mmsi,t,lon,lat\n1,1,0,0\n"))


def test_unreadable_file_is_io_error(tmp_path):
    with pytest.raises(DataIOError):
        parse_ais_csv(tmp_path / "missing.csv")


def test_stream_is_lazy_and_in_file_order():
    stream, stats = parse_ais_csv(io.StringIO(BREST_CSV), chunk_size=1)
    first = next(stream)
    assert first.timestamp == 1443650402
    rest = list(stream)
    assert [r.timestamp for r in rest] == [1443650412, 1443650406]
    assert stats.rows_read == 3


def test_group_by_vessel_sorts_stably():
    records = make_records("a", [(30, 0.0, 0.0), (10, 0.1, 0.0), (10, 0.2, 0.0)])
    records += make_records("b", [(5, 1.0, 1.0)])
    groups = group_by_vessel(records)
    assert list(groups) == ["a", "b"]
    assert [r.timestamp for r in groups["a"]] == [10, 10, 30]
    assert [r.pos.lon for r in groups["a"]][:2] == [0.1, 0.2]


def test_filter_window_half_open():
    records = make_records("a", [(t, 0.0, 0.0) for t in (10, 20, 30, 40)])
    assert [r.timestamp for r in filter_window(records, 20, 40)] == [20, 30]


def test_poi_table_and_nearest():
    text = "poi_id,lon,lat,name\n2,-4.49,48.38,Brest\n1,-4.77,48.36,Le Conquet\nx,1,1,bad\n"
    index = parse_poi_csv(io.StringIO(text))
    assert len(index) == 2
    poi, dist = index.nearest(GeoPoint(-4.48, 48.38))
    assert poi.poi_id == 2 and poi.name == "Brest"
    assert dist < 1000.0
    assert PoiIndex().nearest(GeoPoint(0, 0)) is None


def test_poi_ties_resolve_to_lowest_id():
    index = parse_poi_csv(io.StringIO("poi_id,lon,lat\n7,1.0,0.0\n3,-1.0,0.0\n"))
    poi, _ = index.nearest(GeoPoint(0.0, 0.0))
    assert poi.poi_id == 3


def test_vessel_types_table():
    table = parse_vessel_types_csv(io.StringIO("vessel_id,vessel_type\n227705102,30\n245257000,\n"))
    assert table == {"227705102": 30}


def test_unusable_vessel_type_is_missing_not_fatal():
    mapping = ColumnMapping(vessel_type="type")
    text = "sourcemmsi,t,lon,lat,type\n1,100,-4.4,48.3,inf\n2,101,-4.4,48.3,30\n3,102,-4.4,48.3,7.5\n"
    records, stats = read_ais_records(io.StringIO(text), mapping)
    assert [r.vessel_type for r in records] == [None, 30, None]
    assert stats.rows_valid == 3

    table = parse_vessel_types_csv(io.StringIO("vessel_id,vessel_type\n1,inf\n2,30\n3,-inf\n4,2.5\n"))
    assert table == {"2": 30}


def test_timestamp_beyond_int64_is_out_of_range():
    text = "sourcemmsi,t,lon,lat\n1,1e19,-4.4,48.3\n1,9.3e18,-4.4,48.3\n1,1443650402,-4.4,48.3\n"
    records, stats = read_ais_records(io.StringIO(text))
    assert [r.timestamp for r in records] == [1443650402]
    assert stats.rows_out_of_range == 2
    assert all(r.timestamp >= 0 for r in records)


def test_repeated_poi_id_keeps_later_row():
    index = parse_poi_csv(io.StringIO("poi_id,lon,lat\n7,1.0,1.0\n7,2.0,2.0\n"))
    assert len(index) == 1
    assert index.get(7).pos == GeoPoint(2.0, 2.0)
    assert index.get(8) is None


def test_nearest_poi_agrees_with_full_scan():
    """Every lookup returns the closest POI, lowest id first on ties."""
    rng = np.random.default_rng(17)
    pois = [
        Poi(poi_id=int(i), pos=GeoPoint(float(x), float(y)))
        for i, x, y in zip(
            rng.permutation(200)[:60], rng.uniform(-6.0, -3.0, 60), rng.uniform(47.0, 49.0, 60)
        )
    ]
    # an exact duplicate location under two ids
    pois.append(Poi(poi_id=500, pos=pois[0].pos))
    index = PoiIndex(pois)

    queries = [GeoPoint(float(x), float(y)) for x, y in zip(rng.uniform(-6.5, -2.5, 300), rng.uniform(46.5, 49.5, 300))]
    queries.append(pois[0].pos)
    for q in queries:
        poi, dist = index.nearest(q)
        best = min(pois, key=lambda p: (haversine_m(q, p.pos), p.poi_id))
        assert poi.poi_id == best.poi_id
        assert dist == pytest.approx(haversine_m(q, best.pos), abs=1e-6)
