"""Parser tests: golden fixtures, aggregation rules, error paths, properties."""

import numpy as np
import pytest

from telesim.errors import (
    EmptyFile,
    MalformedRecord,
    NegativeElapsed,
    NonMonotonicTimestamps,
    TooFewRows,
)
from telesim.ingest import (
    RawTelemetryFile,
    drop_incomplete_rows,
    ingest_path,
    parse_perf,
    parse_sar,
    perf_epoch_times,
)
from telesim.samples import MtsSample, MetricSchema


def sar_file(text, name="test.csv"):
    return RawTelemetryFile.from_text(text, "sar", name=name)


def perf_file(text, name="test.csv"):
    return RawTelemetryFile.from_text(text, "perf", name=name)


class TestRawTelemetryFile:
    def test_empty_text(self):
        with pytest.raises(EmptyFile):
            RawTelemetryFile.from_text("", "sar")

    def test_blank_lines_skipped(self):
        f = sar_file("timestamp,a\n\n1,2\n\n3,4\n")
        assert len(f.records) == 2
        assert f.line_numbers == [3, 5]

    def test_field_count_mismatch(self):
        with pytest.raises(MalformedRecord) as exc:
            sar_file("timestamp,a,b\n1,2\n")
        assert exc.value.line == 2

    def test_duplicate_header(self):
        with pytest.raises(MalformedRecord):
            sar_file("timestamp,a,a\n1,2,3\n")

    def test_semicolon_delimiter(self):
        f = sar_file("timestamp;a;b\n1;2;3\n")
        assert f.header == ["timestamp", "a", "b"]
        assert f.records == [["1", "2", "3"]]


class TestParseSar:
    def test_golden_fixture(self, sar_fixture):
        sample = parse_sar(RawTelemetryFile.from_path(sar_fixture, "sar"), label="MLC")
        assert sample.start_epoch == 1632834009
        assert sample.n_steps == 5
        assert sample.schema.names[0] == "%user"
        user = sample.data[:, sample.schema.names.index("%user")]
        system = sample.data[:, sample.schema.names.index("%system")]
        # row for timestamp 1632834010 is the second one
        assert user[1] == 99.88
        assert system[1] == 0.12

    def test_header_only_is_empty(self):
        with pytest.raises(EmptyFile):
            parse_sar(sar_file("timestamp,a,b\n"))

    def test_device_rows_summed(self):
        f = sar_file(
            "timestamp,DEV,tps\n"
            "100,sda,3\n"
            "100,sdb,5\n"
            "101,sda,4\n"
            "101,sdb,1\n")
        sample = parse_sar(f)
        assert sample.schema.names == ("tps",)
        assert sample.data.tolist() == [[8.0], [5.0]]

    def test_summary_row_preferred_over_sum(self):
        f = sar_file(
            "timestamp,CPU,%user\n"
            "100,all,50\n"
            "100,0,30\n"
            "100,1,20\n"
            "101,all,60\n"
            "101,0,35\n"
            "101,1,25\n")
        sample = parse_sar(f)
        assert sample.schema.names == ("%user",)
        assert sample.data.tolist() == [[50.0], [60.0]]

    def test_text_columns_dropped(self):
        f = sar_file("timestamp,IFACE,rxkB/s\n100,eth0,1.5\n101,eth0,2.5\n")
        sample = parse_sar(f)
        assert sample.schema.names == ("rxkB/s",)

    def test_unsorted_timestamps_sorted(self):
        f = sar_file("timestamp,a\n102,3\n100,1\n101,2\n")
        sample = parse_sar(f)
        assert sample.start_epoch == 100
        assert sample.data[:, 0].tolist() == [1.0, 2.0, 3.0]

    def test_sort_disabled_rejects_decrease(self):
        f = sar_file("timestamp,a\n102,3\n100,1\n101,2\n")
        with pytest.raises(NonMonotonicTimestamps):
            parse_sar(f, sort_timestamps=False)

    def test_bad_timestamp(self):
        with pytest.raises(MalformedRecord):
            parse_sar(sar_file("timestamp,a\noops,1\n2,2\n"))

    def test_wrong_dialect(self, perf_fixture):
        raw = RawTelemetryFile.from_path(perf_fixture, "perf")
        with pytest.raises(ValueError):
            parse_sar(raw)

    def test_label_defaults_to_file_stem(self, sar_fixture):
        sample = parse_sar(RawTelemetryFile.from_path(sar_fixture, "sar"))
        assert sample.label == "mlc_sar_sample"

    def test_deterministic(self, sar_fixture):
        text = sar_fixture.read_text()
        a = parse_sar(sar_file(text))
        b = parse_sar(sar_file(text))
        assert a.schema == b.schema
        assert a.start_epoch == b.start_epoch
        assert np.array_equal(a.data, b.data)

    def test_row_count_bounded_by_distinct_timestamps(self, rng):
        ts = rng.integers(100, 130, size=60)
        lines = ["timestamp,a,b"] + [f"{t},{i},{i * 2}" for i, t in enumerate(ts)]
        sample = parse_sar(sar_file("\n".join(lines)))
        assert sample.n_steps == len(set(ts.tolist()))

    def test_schema_has_no_timestamp_or_text_column(self, rng):
        f = sar_file(
            "timestamp,DEV,a,note\n"
            "100,sda,1,warm\n"
            "101,sdb,2,cold\n")
        sample = parse_sar(f)
        assert "timestamp" not in sample.schema.names
        assert sample.schema.names == ("a",)


class TestParsePerf:
    def test_golden_fixture(self, perf_fixture):
        sample = parse_perf(RawTelemetryFile.from_path(perf_fixture, "perf"),
                            collection_start_epoch=1632834000, label="MLC")
        assert sample.start_epoch == 1632834000
        assert sample.schema.names == (
            "branches", "branch-misses", "bus-cycles", "cache-misses",
            "cache-references", "cycles", "instructions", "ref-cycles")
        branches = sample.data[:, 0]
        # row for elapsed 2.002247 is the second one
        assert branches[1] == 891990979.0
        assert sample.data[1, 1] == 21945.0
        assert sample.data[4, 6] == 1.307644e+08

    def test_epoch_alignment(self):
        times = perf_epoch_times([1.001065, 2.002247], 1632834000)
        assert times.tolist() == [1632834001, 1632834002]

    def test_negative_elapsed(self):
        with pytest.raises(NegativeElapsed):
            parse_perf(perf_file("timestamp,ev\n-1,5\n2,6\n"), 0)

    def test_header_only_is_empty(self):
        with pytest.raises(EmptyFile):
            parse_perf(perf_file("timestamp,ev\n"), 0)

    def test_bad_elapsed(self):
        with pytest.raises(MalformedRecord):
            parse_perf(perf_file("timestamp,ev\nxx,5\n2,6\n"), 0)

    def test_absolute_times_nondecreasing(self, rng):
        elapsed = np.sort(rng.uniform(0, 300, size=200))
        times = perf_epoch_times(elapsed, 1_600_000_000)
        assert (np.diff(times) >= 0).all()

    def test_wrong_dialect(self, sar_fixture):
        raw = RawTelemetryFile.from_path(sar_fixture, "sar")
        with pytest.raises(ValueError):
            parse_perf(raw, 0)


class TestDropIncompleteRows:
    def _sample(self, data):
        schema = MetricSchema(("a", "b"), "sar")
        return MtsSample("X", 0, schema, np.asarray(data, dtype=float))

    def test_blank_field_dropped(self):
        sample = parse_sar(sar_file(
            "timestamp,a,b\n1,1,1\n2,,2\n3,3,3\n4,4,4\n5,5,5\n"))
        cleaned, dropped = drop_incomplete_rows(sample)
        assert dropped == 1
        assert cleaned.n_steps == 4
        assert cleaned.data[:, 0].tolist() == [1.0, 3.0, 4.0, 5.0]

    def test_clean_sample_untouched(self):
        sample = self._sample([[1, 2], [3, 4], [5, 6]])
        cleaned, dropped = drop_incomplete_rows(sample)
        assert dropped == 0
        assert cleaned is sample

    def test_too_few_survivors(self):
        sample = self._sample([[np.nan, 1], [2, np.nan], [1, 1]])
        with pytest.raises(TooFewRows):
            drop_incomplete_rows(sample)

    def test_infinite_values_dropped(self):
        sample = self._sample([[1, 2], [np.inf, 4], [5, 6]])
        cleaned, dropped = drop_incomplete_rows(sample)
        assert dropped == 1
        assert np.isfinite(cleaned.data).all()


class TestIngestPath:
    def test_report_counts(self, tmp_path):
        p = tmp_path / "run.csv"
        p.write_text(
            "timestamp,DEV,tps\n"
            "100,sda,3\n"
            "100,sdb,5\n"
            "101,sda,\n"
            "101,sdb,2\n"
            "102,sda,7\n"
            "103,sda,9\n")
        sample, report = ingest_path(p, "sar", label="X")
        assert report.rows_read == 6
        assert report.rows_collapsed == 2
        assert report.rows_dropped == 1  # blank poisons the 101 aggregate
        assert report.rows_kept == 3
        assert sample.n_steps == 3

    def test_perf_start_epoch(self, tmp_path, perf_fixture):
        sample, report = ingest_path(perf_fixture, "perf", label="MLC",
                                     collection_start_epoch=1632834000)
        assert sample.start_epoch == 1632834000
        assert report.rows_kept == 5

    def test_unknown_dialect(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("timestamp,a\n1,2\n2,3\n")
        with pytest.raises(ValueError):
            ingest_path(p, "csv")
