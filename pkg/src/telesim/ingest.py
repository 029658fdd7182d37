"""Parsers turning SAR-style and perf-style CSV exports into samples.

Both dialects are delimited text with a single header line. The first
column is time: Unix epoch seconds for sar, elapsed seconds since
collection start for perf. Text-valued columns (device names, interface
names, per-CPU selectors) never enter the metric schema; they only
decide which rows to keep when several records share one timestamp.
Blank or missing cells in numeric columns become NaN and are removed by
drop_incomplete_rows.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import (
    EmptyFile,
    MalformedRecord,
    NegativeElapsed,
    NonMonotonicTimestamps,
    TooFewRows,
)
from .samples import DIALECTS, MetricSchema, MtsSample

_DELIMITERS = (",", ";")


def _pick_delimiter(header_line):
    # comma or semicolon, whichever splits the header into more fields
    best = max(_DELIMITERS, key=lambda d: len(header_line.split(d)))
    return best if len(header_line.split(best)) > 1 else ","


@dataclass
class RawTelemetryFile:
    """One delimited telemetry export: header names plus raw records.

    Records keep their string fields; each has exactly as many fields as
    the header. Line numbers are 1-based positions in the original file.
    """

    dialect: str
    name: str
    header: list[str]
    records: list[list[str]]
    line_numbers: list[int]

    @classmethod
    def from_text(cls, text, dialect, name="<memory>"):
        if dialect not in DIALECTS:
            raise ValueError(f"unknown dialect {dialect!r}, expected one of {DIALECTS}")
        rows = [(i + 1, line) for i, line in enumerate(text.splitlines()) if line.strip()]
        if not rows:
            raise EmptyFile(name, "no header line")
        header_no, header_line = rows[0]
        delimiter = _pick_delimiter(header_line)
        header = [f.strip() for f in header_line.split(delimiter)]
        if len(set(header)) != len(header):
            dup = next(h for h in header if header.count(h) > 1)
            raise MalformedRecord(name, header_no, f"duplicate header name {dup!r}")
        records, line_numbers = [], []
        for lineno, line in rows[1:]:
            fields = [f.strip() for f in line.split(delimiter)]
            if len(fields) != len(header):
                raise MalformedRecord(
                    name, lineno, f"{len(fields)} fields, header has {len(header)}")
            records.append(fields)
            line_numbers.append(lineno)
        return cls(dialect=dialect, name=name, header=header,
                   records=records, line_numbers=line_numbers)

    @classmethod
    def from_path(cls, path, dialect):
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), dialect, name=str(path))


def _float_or_nan(field):
    """Float value of a cell; NaN when blank, None when non-numeric text."""
    if not field:
        return np.nan
    try:
        return float(field)
    except ValueError:
        return None


def _classify_columns(file, first_data_col=1):
    """Split columns into numeric metrics and text-valued selectors.

    A column is numeric when every non-blank value parses as a float and
    at least one value is non-blank; all-blank columns carry no signal
    and count as text.
    """
    numeric, text = [], []
    for col in range(first_data_col, len(file.header)):
        saw_value = False
        is_text = False
        for record in file.records:
            value = _float_or_nan(record[col])
            if value is None:
                is_text = True
                break
            if not np.isnan(value):
                saw_value = True
        if is_text or not saw_value:
            text.append(col)
        else:
            numeric.append(col)
    return numeric, text


def parse_sar(file, *, label=None, collection_id=0, sort_timestamps=True):
    """Parse a sar export into a sample.

    The first column must hold Unix-epoch timestamps; rows come out
    ordered by ascending timestamp and the timestamp itself moves to
    start_epoch. Records sharing one timestamp (one per device or
    interface) collapse into a single row: the "all" summary record when
    one exists, otherwise the element-wise sum. With
    sort_timestamps=False a decreasing timestamp raises instead.
    """
    if file.dialect != "sar":
        raise ValueError(f"expected sar dialect, got {file.dialect!r}")
    if not file.records:
        raise EmptyFile(file.name)

    timestamps = []
    for record, lineno in zip(file.records, file.line_numbers):
        try:
            timestamps.append(int(round(float(record[0]))))
        except ValueError:
            raise MalformedRecord(file.name, lineno, f"bad timestamp {record[0]!r}") from None

    if sort_timestamps:
        order = sorted(range(len(timestamps)), key=lambda i: timestamps[i])
    else:
        for pos in range(1, len(timestamps)):
            if timestamps[pos] < timestamps[pos - 1]:
                raise NonMonotonicTimestamps(file.name, file.line_numbers[pos])
        order = list(range(len(timestamps)))

    numeric_cols, text_cols = _classify_columns(file)
    if not numeric_cols:
        raise EmptyFile(file.name, "no numeric metric columns")

    groups = []
    for idx in order:
        if groups and timestamps[groups[-1][0]] == timestamps[idx]:
            groups[-1].append(idx)
        else:
            groups.append([idx])

    data = np.empty((len(groups), len(numeric_cols)))
    for g, members in enumerate(groups):
        if len(members) > 1 and text_cols:
            summary = [i for i in members
                       if any(file.records[i][c].lower() == "all" for c in text_cols)]
            if summary:
                members = summary
        acc = np.zeros(len(numeric_cols))
        for i in members:
            record = file.records[i]
            acc += np.array([_float_or_nan(record[c]) for c in numeric_cols], dtype=np.float64)
        data[g] = acc

    schema = MetricSchema(tuple(file.header[c] for c in numeric_cols), "sar")
    name = label if label is not None else Path(file.name).stem
    return MtsSample(label=name, collection_id=collection_id, schema=schema,
                     data=data, start_epoch=timestamps[order[0]])


def perf_epoch_times(elapsed_seconds, collection_start_epoch):
    """Absolute Unix-epoch seconds for perf rows: start + round(elapsed)."""
    elapsed = np.asarray(elapsed_seconds, dtype=np.float64)
    return (int(collection_start_epoch) + np.rint(elapsed)).astype(np.int64)


def parse_perf(file, collection_start_epoch, *, label=None, collection_id=0):
    """Parse a perf export into a sample.

    The first column holds elapsed seconds since collection start; each
    row's absolute time is collection_start_epoch + round(elapsed), on
    the 1-second sampling grid. Event-count columns keep header order.
    """
    if file.dialect != "perf":
        raise ValueError(f"expected perf dialect, got {file.dialect!r}")
    if not file.records:
        raise EmptyFile(file.name)

    elapsed = []
    for record, lineno in zip(file.records, file.line_numbers):
        try:
            value = float(record[0])
        except ValueError:
            raise MalformedRecord(file.name, lineno, f"bad elapsed time {record[0]!r}") from None
        if value < 0:
            raise NegativeElapsed(f"{file.name}, line {lineno}: elapsed {value} is negative")
        elapsed.append(value)

    numeric_cols, _ = _classify_columns(file)
    if not numeric_cols:
        raise EmptyFile(file.name, "no numeric metric columns")
    data = np.empty((len(file.records), len(numeric_cols)))
    for r, record in enumerate(file.records):
        data[r] = [_float_or_nan(record[c]) for c in numeric_cols]

    schema = MetricSchema(tuple(file.header[c] for c in numeric_cols), "perf")
    name = label if label is not None else Path(file.name).stem
    return MtsSample(label=name, collection_id=collection_id, schema=schema,
                     data=data, start_epoch=int(collection_start_epoch))


def drop_incomplete_rows(sample):
    """Remove rows containing missing or non-numeric fields.

    Returns the cleaned sample and the number of rows removed; relative
    row order is preserved.
    """
    keep = np.isfinite(sample.data).all(axis=1)
    dropped = int((~keep).sum())
    if dropped == 0:
        return sample, 0
    if int(keep.sum()) < 2:
        raise TooFewRows(
            f"sample ({sample.label}, {sample.collection_id}): "
            f"only {int(keep.sum())} complete rows remain")
    return replace(sample, data=sample.data[keep]), dropped


@dataclass
class IngestReport:
    """Per-file accounting emitted by the ingest pipeline."""

    path: str
    rows_read: int
    rows_collapsed: int
    rows_dropped: int
    rows_kept: int


def ingest_path(path, dialect, *, label=None, collection_id=0,
                collection_start_epoch=0, sort_timestamps=True):
    """Read, parse and clean one telemetry file.

    Returns the finished sample plus an IngestReport; rows_collapsed
    counts duplicate-timestamp records merged by the sar summary/sum
    rule.
    """
    raw = RawTelemetryFile.from_path(path, dialect)
    if dialect == "sar":
        sample = parse_sar(raw, label=label, collection_id=collection_id,
                           sort_timestamps=sort_timestamps)
    else:
        sample = parse_perf(raw, collection_start_epoch,
                            label=label, collection_id=collection_id)
    parsed_rows = sample.n_steps
    sample, dropped = drop_incomplete_rows(sample)
    sample.validate(require_finite=True)
    return sample, IngestReport(
        path=str(path),
        rows_read=len(raw.records),
        rows_collapsed=len(raw.records) - parsed_rows,
        rows_dropped=dropped,
        rows_kept=sample.n_steps,
    )
