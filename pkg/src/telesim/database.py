"""Signature databases: labeled sample collections plus persistence.

On disk a database is a directory holding a JSON ``manifest`` and one
CSV per sample named ``<label>__<collection_id>.csv``. Numeric text is
written with 17 significant digits and a ``.`` decimal separator, so
float64 matrices survive a save/load round trip bit-exactly.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CorruptManifest,
    DataError,
    DuplicateSample,
    MalformedRecord,
    MissingSampleFile,
    RowCountMismatch,
    SchemaMismatch,
)
from .samples import MetricSchema, MtsSample, canonicalize_sample

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest"
_FLOAT_FMT = "%.17g"


def sample_file_name(label, collection_id):
    if "/" in label or "\\" in label or label in ("", ".", ".."):
        raise ValueError(f"label {label!r} cannot be used in a file name")
    return f"{label}__{collection_id}.csv"


@dataclass(frozen=True)
class DatabaseStats:
    variable_count: int
    average_length: int
    label_count: int
    samples_per_label: dict[str, int]
    total: int

    @property
    def uniform_samples_per_label(self):
        """The shared per-label count, or None when labels differ in size."""
        counts = set(self.samples_per_label.values())
        return counts.pop() if len(counts) == 1 else None


@dataclass
class SignatureDatabase:
    """All samples share one schema; (label, collection_id) pairs are unique.

    Treated as an immutable value: add() returns a new database, so
    concurrent readers never see partial mutation.
    """

    schema: MetricSchema
    samples: list[MtsSample] = field(default_factory=list)

    def __len__(self):
        return len(self.samples)

    @property
    def labels(self):
        return sorted({s.label for s in self.samples})

    def keys(self):
        return [s.key for s in self.samples]

    def next_collection_id(self, label):
        ids = [s.collection_id for s in self.samples if s.label == label]
        return max(ids) + 1 if ids else 0

    def add(self, sample):
        """Return a new database containing the sample.

        Columns are reordered to the database schema when the names
        match in a different order.
        """
        canonical = canonicalize_sample(sample, self.schema)
        if canonical.key in set(self.keys()):
            raise DuplicateSample(*canonical.key)
        canonical.validate(require_finite=True)
        return SignatureDatabase(self.schema, [*self.samples, canonical])

    def validate(self):
        if len(self.samples) < 2:
            raise DataError(f"database needs at least 2 samples, has {len(self.samples)}")
        seen = set()
        for sample in self.samples:
            if not sample.schema.compatible_with(self.schema):
                column = self.schema.first_difference(sample.schema)
                raise SchemaMismatch(
                    f"sample {sample.key} diverges at column {column!r}", column=column)
            if sample.key in seen:
                raise DuplicateSample(*sample.key)
            seen.add(sample.key)
            sample.validate(require_finite=True)

    def stats(self):
        """Database summary; average_length is the mean row count rounded to int."""
        counts = Counter(s.label for s in self.samples)
        lengths = [s.n_steps for s in self.samples]
        return DatabaseStats(
            variable_count=len(self.schema),
            average_length=int(round(sum(lengths) / len(lengths))),
            label_count=len(counts),
            samples_per_label=dict(sorted(counts.items())),
            total=len(self.samples),
        )

    def save(self, path):
        """Write per-sample CSVs plus the manifest under a directory.

        Sample files land first and the manifest last, so an interrupted
        save never leaves a directory that loads successfully.
        """
        self.validate()
        root = Path(path)
        root.mkdir(parents=True, exist_ok=True)
        entries = []
        for sample in self.samples:
            fname = sample_file_name(sample.label, sample.collection_id)
            _write_sample_csv(root / fname, sample)
            entries.append({
                "label": sample.label,
                "collection_id": sample.collection_id,
                "row_count": sample.n_steps,
                "file": fname,
                "start_epoch": sample.start_epoch,
            })
        manifest = {
            "format_version": FORMAT_VERSION,
            "dialect": self.schema.dialect,
            "schema": list(self.schema.names),
            "samples": entries,
        }
        manifest_path = root / MANIFEST_NAME
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path):
        """Load a saved database, re-validating every invariant."""
        root = Path(path)
        manifest_path = root / MANIFEST_NAME
        if not manifest_path.is_file():
            raise CorruptManifest(f"{manifest_path}: manifest not found")
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise CorruptManifest(f"{manifest_path}: {exc}") from exc
        schema, entries = _check_manifest(manifest, manifest_path)
        samples = []
        for entry in entries:
            file_path = root / entry["file"]
            if not file_path.is_file():
                raise MissingSampleFile(f"{file_path}: referenced by manifest but absent")
            data = _read_sample_csv(file_path, schema)
            if data.shape[0] != entry["row_count"]:
                raise RowCountMismatch(
                    f"{file_path}: manifest says {entry['row_count']} rows, "
                    f"file has {data.shape[0]}")
            start_epoch = entry.get("start_epoch")
            samples.append(MtsSample(
                label=entry["label"],
                collection_id=int(entry["collection_id"]),
                schema=schema,
                data=data,
                start_epoch=None if start_epoch is None else int(start_epoch),
            ))
        db = cls(schema, samples)
        db.validate()
        return db


def _check_manifest(manifest, manifest_path):
    try:
        version = manifest["format_version"]
        if version != FORMAT_VERSION:
            raise CorruptManifest(f"{manifest_path}: unsupported format_version {version!r}")
        names = manifest["schema"]
        entries = manifest["samples"]
        if not isinstance(names, list) or not isinstance(entries, list):
            raise CorruptManifest(f"{manifest_path}: schema and samples must be lists")
        schema = MetricSchema(tuple(names), manifest["dialect"])
        for entry in entries:
            for key in ("label", "collection_id", "row_count", "file"):
                if key not in entry:
                    raise CorruptManifest(f"{manifest_path}: sample entry missing {key!r}")
    except (TypeError, KeyError, ValueError) as exc:
        raise CorruptManifest(f"{manifest_path}: {exc}") from exc
    return schema, entries


def _write_sample_csv(path, sample):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(sample.schema.names) + "\n")
        np.savetxt(fh, sample.data, fmt=_FLOAT_FMT, delimiter=",")


def _read_sample_csv(path, schema):
    with open(path, encoding="utf-8") as fh:
        header = tuple(f.strip() for f in fh.readline().rstrip("\n").split(","))
        if header != schema.names:
            column = schema.first_difference(header)
            raise SchemaMismatch(
                f"{path}: header diverges from manifest schema at column {column!r}",
                column=column)
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise MalformedRecord(str(path), 0, str(exc)) from exc
    if data.size == 0:
        data = data.reshape(0, len(schema))
    if data.shape[0] > 0 and data.shape[1] != len(schema):
        raise MalformedRecord(
            str(path), 0, f"{data.shape[1]} columns, schema has {len(schema)}")
    return data
