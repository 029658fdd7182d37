"""Workload similarity from performance-telemetry signatures.

Telemetry captured over a workload execution (sar or perf CSV exports)
becomes a multivariate time-series signature. Signatures of different
lengths are compared through the eigendecompositions of their metric
covariance matrices, evaluated with a modified leave-one-out KNN, and
classified against a labeled database of known workloads.
"""

from .database import DatabaseStats, SignatureDatabase
from .eros import (
    MAX_DISTANCE,
    DistanceMatrix,
    EigenDecomposition,
    aggregate_weights,
    compute_weights,
    covariance,
    decompose,
    distance_matrix,
    eigen,
    eigenvalue_matrix,
    eros,
    eros_distance,
)
from .errors import (
    AllConstantSample,
    CorruptManifest,
    DataError,
    DegenerateWeights,
    DimensionMismatch,
    DuplicateSample,
    EmptyFile,
    KTooLarge,
    MalformedRecord,
    MaxrTooLarge,
    MissingSampleFile,
    NegativeElapsed,
    NoConvergence,
    NonMonotonicTimestamps,
    NotEnoughRelevant,
    NotSymmetric,
    NumericError,
    RowCountMismatch,
    SchemaMismatch,
    TelesimError,
    TooFewRows,
)
from .estimators import ErosKNeighborsClassifier, ErosSimilarity
from .evaluation import (
    ClassificationResult,
    LabelScore,
    PrCurve,
    QueryResult,
    classify_unknown,
    export_embedding_input,
    knn_until_r,
    pr_curve,
)
from .ingest import (
    IngestReport,
    RawTelemetryFile,
    drop_incomplete_rows,
    ingest_path,
    parse_perf,
    parse_sar,
    perf_epoch_times,
)
from .samples import MetricSchema, MtsSample, canonicalize_sample

__version__ = "0.1.0"

__all__ = [
    "AllConstantSample",
    "ClassificationResult",
    "CorruptManifest",
    "DataError",
    "DatabaseStats",
    "DegenerateWeights",
    "DimensionMismatch",
    "DistanceMatrix",
    "DuplicateSample",
    "EigenDecomposition",
    "EmptyFile",
    "ErosKNeighborsClassifier",
    "ErosSimilarity",
    "IngestReport",
    "KTooLarge",
    "LabelScore",
    "MAX_DISTANCE",
    "MalformedRecord",
    "MaxrTooLarge",
    "MetricSchema",
    "MissingSampleFile",
    "MtsSample",
    "NegativeElapsed",
    "NoConvergence",
    "NonMonotonicTimestamps",
    "NotEnoughRelevant",
    "NotSymmetric",
    "NumericError",
    "PrCurve",
    "QueryResult",
    "RawTelemetryFile",
    "RowCountMismatch",
    "SchemaMismatch",
    "SignatureDatabase",
    "TelesimError",
    "TooFewRows",
    "aggregate_weights",
    "canonicalize_sample",
    "classify_unknown",
    "compute_weights",
    "covariance",
    "decompose",
    "distance_matrix",
    "drop_incomplete_rows",
    "eigen",
    "eigenvalue_matrix",
    "eros",
    "eros_distance",
    "export_embedding_input",
    "ingest_path",
    "knn_until_r",
    "parse_perf",
    "parse_sar",
    "perf_epoch_times",
    "pr_curve",
]
