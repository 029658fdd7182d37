"""Exception types, grouped by the CLI exit code they map to.

DataError covers malformed inputs, schema conflicts and database
inconsistencies (exit code 3); NumericError covers failures inside the
numerical core (exit code 4).
"""


class TelesimError(Exception):
    """Base class for every error raised by this package."""


class DataError(TelesimError):
    """Bad input data, schema conflict or database inconsistency."""


class NumericError(TelesimError):
    """Numerical failure in covariance, eigen or weight computations."""


class EmptyFile(DataError):
    """Telemetry file carries no usable data rows."""

    def __init__(self, name, detail="no data rows"):
        super().__init__(f"{name}: {detail}")
        self.name = name


class MalformedRecord(DataError):
    """A delimited record does not match the header layout."""

    def __init__(self, name, line, detail):
        super().__init__(f"{name}, line {line}: {detail}")
        self.name = name
        self.line = line


class NonMonotonicTimestamps(DataError):
    """Timestamps decrease while sorting is disabled."""

    def __init__(self, name, line):
        super().__init__(f"{name}, line {line}: timestamp decreases and sorting is disabled")
        self.name = name
        self.line = line


class NegativeElapsed(DataError):
    """Elapsed-seconds value below zero in a perf export."""


class TooFewRows(DataError):
    """Fewer than two usable time steps."""


class SchemaMismatch(DataError):
    """Metric schemas differ; carries the first differing column name."""

    def __init__(self, detail, column=None):
        super().__init__(detail)
        self.column = column


class DuplicateSample(DataError):
    """A (label, collection_id) pair is already present."""

    def __init__(self, label, collection_id):
        super().__init__(f"sample ({label}, {collection_id}) already present")
        self.label = label
        self.collection_id = collection_id


class CorruptManifest(DataError):
    """Database manifest is missing, unparseable or inconsistent."""


class MissingSampleFile(DataError):
    """Manifest references a sample file that is absent on disk."""


class RowCountMismatch(DataError):
    """Stored row count differs from the manifest entry."""


class NotSymmetric(NumericError):
    """Matrix expected to be symmetric is not."""


class NoConvergence(NumericError):
    """Eigensolver failed to converge."""


class DimensionMismatch(NumericError):
    """Operands disagree on the number of metrics."""


class AllConstantSample(NumericError):
    """A sample has zero total variance, so its spectrum carries no weight."""

    def __init__(self, label=None, collection_id=None):
        what = "a sample" if label is None else f"sample ({label}, {collection_id})"
        super().__init__(f"{what} has zero total variance: eigenvalue sum is 0")
        self.label = label
        self.collection_id = collection_id


class DegenerateWeights(NumericError):
    """Aggregated weights sum to zero and cannot be normalized."""


class NotEnoughRelevant(DataError):
    """Query label has fewer other samples than relevant items requested."""

    def __init__(self, r, available):
        super().__init__(f"requested r={r} relevant items but only {available} share the query label")
        self.r = r
        self.available = available


class MaxrTooLarge(DataError):
    """maxr exceeds what the smallest label can support."""

    def __init__(self, maxr, limit, label):
        super().__init__(f"maxr={maxr} exceeds limit {limit} set by label {label!r}")
        self.maxr = maxr
        self.limit = limit
        self.label = label


class KTooLarge(DataError):
    """More neighbors requested than samples available."""
