"""
AIS position CSV reader.

Streams validated ``AisRecord`` objects out of a CSV file in chunks. Rows that
cannot be parsed or that fall outside valid ranges are skipped and counted,
never fatal: multi-million-row feeds must survive a handful of bad lines.
"""

import csv
import io
import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from vesselcast.config import ColumnMapping
from vesselcast.errors import ConfigError, DataIOError
from vesselcast.geo import GeoPoint
from vesselcast.io_utils import open_source
from vesselcast.monitoring.metrics import MetricsCollector

logger = logging.getLogger(__name__)

Source = Union[str, Path, IO]

DEFAULT_CHUNK_SIZE = 100_000

# first raw timestamp value that no longer fits an int64
TIMESTAMP_LIMIT = float(2**63)


@dataclass(frozen=True, slots=True)
class AisRecord:
    """One raw AIS position report."""
    vessel_id: str
    timestamp: int  # unix seconds
    pos: GeoPoint
    vessel_type: Optional[int] = None


@dataclass
class IngestStats:
    """Row accounting for one parsed file."""
    rows_read: int = 0
    rows_malformed: int = 0
    rows_out_of_range: int = 0

    @property
    def rows_valid(self) -> int:
        return self.rows_read - self.rows_malformed - self.rows_out_of_range


class AisCsvReader:
    """
    Chunked reader over one AIS CSV source.

    The header is checked against the column mapping on construction; records
    are produced lazily by iteration and ``stats`` is filled as rows go by.
    """

    def __init__(
        self,
        source: Source,
        mapping: ColumnMapping,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
    ):
        self.mapping = mapping
        self.chunk_size = chunk_size
        self.stats = IngestStats()
        self._metrics = MetricsCollector()
        self._stream, self._owned = _text_stream(source)
        header_line = self._stream.readline()
        if not header_line:
            self.columns: List[str] = []
        else:
            self.columns = [c.strip() for c in next(csv.reader([header_line]))]

        required = [mapping.vessel_id, mapping.timestamp, mapping.lon, mapping.lat]
        if mapping.vessel_type:
            required.append(mapping.vessel_type)
        missing = [c for c in required if c not in self.columns]
        if missing:
            self.close()
            raise ConfigError(
                f"AIS header lacks mapped column(s) {missing}; found {self.columns}"
            )

    def close(self) -> None:
        if self._owned:
            self._stream.close()

    def _on_bad_line(self, bad_line: List[str]) -> None:
        self.stats.rows_read += 1
        self.stats.rows_malformed += 1
        self._metrics.record_ingest("malformed")
        return None

    def __iter__(self) -> Iterator[AisRecord]:
        try:
            chunks = pd.read_csv(
                self._stream,
                header=None,
                names=self.columns,
                dtype=str,
                keep_default_na=False,
                engine="python",
                on_bad_lines=self._on_bad_line,
                chunksize=self.chunk_size,
                skip_blank_lines=True,
            )
            for chunk in chunks:
                yield from self._convert(chunk)
        except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
            raise DataIOError(f"failed reading AIS source: {e}") from e
        finally:
            self.close()

    def _convert(self, chunk: pd.DataFrame) -> Iterator[AisRecord]:
        m = self.mapping
        n = len(chunk)
        self.stats.rows_read += n

        ids = chunk[m.vessel_id].fillna("").astype(str).str.strip()
        ts = pd.to_numeric(chunk[m.timestamp], errors="coerce").to_numpy(dtype=np.float64)
        lon = pd.to_numeric(chunk[m.lon], errors="coerce").to_numpy(dtype=np.float64)
        lat = pd.to_numeric(chunk[m.lat], errors="coerce").to_numpy(dtype=np.float64)

        malformed = (ids == "").to_numpy() | np.isnan(ts) | np.isnan(lon) | np.isnan(lat)
        with np.errstate(invalid="ignore"):
            out_of_range = ~malformed & (
                ~np.isfinite(ts) | (ts < 0) | (ts >= TIMESTAMP_LIMIT)
                | ~np.isfinite(lon) | (np.abs(lon) > 180.0)
                | ~np.isfinite(lat) | (np.abs(lat) > 90.0)
            )
        valid = ~malformed & ~out_of_range

        n_malformed = int(malformed.sum())
        n_oor = int(out_of_range.sum())
        self.stats.rows_malformed += n_malformed
        self.stats.rows_out_of_range += n_oor
        self._metrics.record_ingest("malformed", n_malformed)
        self._metrics.record_ingest("out_of_range", n_oor)
        self._metrics.record_ingest("valid", int(valid.sum()))

        seconds = np.trunc(ts[valid]).astype(np.int64)
        if m.timestamp_unit == "ms":
            seconds = seconds // 1000

        if m.vessel_type:
            vtype = pd.to_numeric(chunk[m.vessel_type], errors="coerce").to_numpy(dtype=np.float64)[valid]
            with np.errstate(invalid="ignore"):
                # inf, 7.5 and the like carry no category
                vtype[~np.isfinite(vtype) | (vtype != np.trunc(vtype))] = np.nan
        else:
            vtype = np.full(len(seconds), np.nan)

        for vid, t, x, y, vt in zip(
            ids.to_numpy()[valid], seconds.tolist(), lon[valid].tolist(), lat[valid].tolist(), vtype.tolist()
        ):
            yield AisRecord(
                vessel_id=vid,
                timestamp=t,
                pos=GeoPoint(x, y),
                vessel_type=None if vt != vt else int(vt),  # NaN check
            )


def parse_ais_csv(
    source: Source,
    mapping: Optional[ColumnMapping] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> Tuple[Iterator[AisRecord], IngestStats]:
    """
    Parse an AIS CSV into a lazy record stream plus its (live) row statistics.

    Args:
        source: Path or open stream (bytes or text) of a CSV with a header row.
        mapping: Column names; defaults to the Brest schema.
        chunk_size: Rows parsed per pandas chunk.

    Returns:
        Tuple of (record iterator in file order, IngestStats filled while iterating).

    Raises:
        ConfigError: a mapped column is absent from the header.
        DataIOError: the source cannot be read.
    """
    reader = AisCsvReader(source, mapping or ColumnMapping(), chunk_size=chunk_size)
    return iter(reader), reader.stats


def read_ais_records(
    source: Source,
    mapping: Optional[ColumnMapping] = None,
) -> Tuple[List[AisRecord], IngestStats]:
    """Parse a whole AIS CSV into memory and log its row accounting."""
    records, stats = parse_ais_csv(source, mapping)
    out = list(records)
    logger.info(
        f"Ingested {stats.rows_valid} of {stats.rows_read} rows "
        f"({stats.rows_malformed} malformed, {stats.rows_out_of_range} out of range)"
    )
    return out, stats


def group_by_vessel(records: Iterable[AisRecord]) -> Dict[str, List[AisRecord]]:
    """
    Partition records by vessel, each list sorted ascending by timestamp.

    The sort is stable, so records sharing a timestamp keep their input order.
    Vessels appear in first-seen order.
    """
    groups: Dict[str, List[AisRecord]] = defaultdict(list)
    for record in records:
        groups[record.vessel_id].append(record)
    for recs in groups.values():
        recs.sort(key=lambda r: r.timestamp)
    return dict(groups)


def filter_window(
    records: Iterable[AisRecord],
    start: Optional[int] = None,
    end: Optional[int] = None,
) -> Iterator[AisRecord]:
    """Keep records with start <= timestamp < end (either bound optional)."""
    for r in records:
        if start is not None and r.timestamp < start:
            continue
        if end is not None and r.timestamp >= end:
            continue
        yield r


def _text_stream(source: Source) -> Tuple[IO, bool]:
    """Return (text stream, whether we own it) for a path or an open stream."""
    if isinstance(source, (str, Path)):
        return open_source(source), True
    if isinstance(source, io.TextIOBase):
        return source, False
    try:
        return io.TextIOWrapper(source, encoding="utf-8", newline=""), False
    except (AttributeError, TypeError) as e:
        raise DataIOError(f"unreadable AIS source {source!r}") from e
