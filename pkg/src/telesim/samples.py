"""Value types shared across the package: metric schemas and samples."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import SchemaMismatch, TooFewRows

DIALECTS = ("sar", "perf")


@dataclass(frozen=True)
class MetricSchema:
    """Ordered metric column names shared by every sample in a database.

    Two schemas are compatible only when their names match in the same
    order. The timestamp column is never part of a schema.
    """

    names: tuple[str, ...]
    dialect: str

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if self.dialect not in DIALECTS:
            raise ValueError(f"unknown dialect {self.dialect!r}, expected one of {DIALECTS}")
        if not self.names:
            raise ValueError("schema must contain at least one metric")
        seen = set()
        for name in self.names:
            if name in seen:
                raise ValueError(f"duplicate metric name {name!r}")
            seen.add(name)

    def __len__(self):
        return len(self.names)

    def compatible_with(self, other):
        return self.names == other.names

    def first_difference(self, other):
        """Name of the first column at which the two schemas diverge.

        Accepts another schema or a plain sequence of names.
        """
        names = tuple(getattr(other, "names", other))
        for i in range(max(len(self.names), len(names))):
            a = self.names[i] if i < len(self.names) else None
            b = names[i] if i < len(names) else None
            if a != b:
                return a if a is not None else b
        return None


@dataclass
class MtsSample:
    """One workload execution's telemetry signature.

    data holds one row per time step (1-second sampling) and one column
    per metric, in schema order. Row counts vary between samples; the
    column layout may not.
    """

    label: str
    collection_id: int
    schema: MetricSchema
    data: np.ndarray
    start_epoch: int | None = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ValueError("sample data must be a 2-d matrix (time steps x metrics)")
        if self.data.shape[0] < 2:
            raise TooFewRows(
                f"sample ({self.label}, {self.collection_id}) has "
                f"{self.data.shape[0]} rows, need at least 2")
        if self.data.shape[1] != len(self.schema):
            raise ValueError(
                f"data has {self.data.shape[1]} columns but schema names {len(self.schema)}")
        if self.collection_id < 0:
            raise ValueError("collection_id must be non-negative")

    @property
    def key(self):
        return (self.label, self.collection_id)

    @property
    def n_steps(self):
        return self.data.shape[0]

    @property
    def n_metrics(self):
        return self.data.shape[1]

    def validate(self, require_finite=True):
        if require_finite and not np.isfinite(self.data).all():
            raise ValueError(
                f"sample ({self.label}, {self.collection_id}) contains non-finite values")


def canonicalize_sample(sample, schema):
    """Align a sample's columns with the given schema.

    Raw files order columns by their header, so samples are reordered
    once, when they are registered against a database. Raises
    SchemaMismatch (naming the first differing column) when the name
    sets differ, not merely their order.
    """
    if sample.schema.names == schema.names:
        if sample.schema is schema:
            return sample
        return replace(sample, schema=schema)
    if sorted(sample.schema.names) != sorted(schema.names):
        column = schema.first_difference(sample.schema)
        raise SchemaMismatch(
            f"incompatible schemas, first differing column: {column!r}", column=column)
    perm = [sample.schema.names.index(name) for name in schema.names]
    return replace(sample, schema=schema, data=sample.data[:, perm])
