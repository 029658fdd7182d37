"""Command line interface: one verb per workflow stage.

Exit codes: 0 success, 2 usage error, 3 data/schema error, 4 numeric
failure. File outputs are written to a temporary name and renamed on
success, so a failing command never leaves a partial result behind.
"""

from __future__ import annotations

import argparse
import os
import shutil
import sys
import tempfile
from pathlib import Path

from .database import MANIFEST_NAME, SignatureDatabase
from .eros import distance_matrix
from .errors import DataError, NumericError
from .evaluation import classify_unknown, export_embedding_input, pr_curve
from .ingest import ingest_path

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class _UsageError(Exception):
    pass


def build_parser():
    parser = argparse.ArgumentParser(
        prog="telesim",
        description="Workload similarity from performance-telemetry signatures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse telemetry files into a signature database")
    p.add_argument("files", nargs="+", type=Path, help="telemetry CSV exports")
    p.add_argument("--db", required=True, type=Path, help="database directory")
    p.add_argument("--label", required=True, help="workload name for all files")
    p.add_argument("--dialect", required=True, choices=("sar", "perf"))
    p.add_argument("--start-epoch", type=int, default=0,
                   help="collection start (Unix epoch seconds) for the perf dialect")
    p.add_argument("--no-sort", action="store_true",
                   help="reject out-of-order timestamps instead of sorting them")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="print a database summary")
    p.add_argument("--db", required=True, type=Path)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("distances", help="write the pairwise distance matrix")
    p.add_argument("--db", required=True, type=Path)
    _add_weight_options(p)
    p.add_argument("--round", type=int, default=None, metavar="DIGITS",
                   help="fixed-point display with this many decimals (full precision otherwise)")
    p.add_argument("--out", type=Path, default=None, help="output file (stdout otherwise)")
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("evaluate", help="precision-vs-recall over leave-one-out retrieval")
    p.add_argument("--db", required=True, type=Path)
    p.add_argument("--maxr", type=int, default=5,
                   help="maximum relevant-item count (default 5)")
    _add_weight_options(p)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("query", help="classify an unknown workload against the database")
    p.add_argument("file", type=Path, help="telemetry export of the unknown workload")
    p.add_argument("--db", required=True, type=Path)
    p.add_argument("--dialect", required=True, choices=("sar", "perf"))
    p.add_argument("--k", type=int, default=1, help="neighbors examined (default 1)")
    p.add_argument("--label", default=None, help="name for the unknown (default: file stem)")
    p.add_argument("--start-epoch", type=int, default=0)
    p.add_argument("--freeze-weights", action="store_true",
                   help="reuse database weights instead of recomputing with the query included")
    _add_weight_options(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("export-embedding",
                       help="distance matrix as precomputed-metric input for embedding tools")
    p.add_argument("--db", required=True, type=Path)
    p.add_argument("--unknown", type=Path, default=None,
                   help="optional unknown-workload file appended as the final row/column")
    p.add_argument("--dialect", choices=("sar", "perf"), default=None,
                   help="dialect of the unknown file")
    p.add_argument("--label", default=None)
    p.add_argument("--start-epoch", type=int, default=0)
    p.add_argument("--freeze-weights", action="store_true")
    _add_weight_options(p)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_export_embedding)

    return parser


def _add_weight_options(p):
    p.add_argument("--aggregator", choices=("mean", "max", "min"), default="mean",
                   help="eigenvalue aggregation across samples (default mean)")
    p.add_argument("--raw-eigenvalues", action="store_true",
                   help="aggregate raw eigenvalues instead of per-sample normalized spectra")


def _require_files(paths):
    for p in paths:
        if not Path(p).is_file():
            raise _UsageError(f"no such file: {p}")


def _require_db(path):
    if not (Path(path) / MANIFEST_NAME).is_file():
        raise _UsageError(f"no database at {path}")


def _emit(out, text):
    if out is None:
        sys.stdout.write(text)
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=str(out.parent))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _save_db_atomic(db, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".tmp-db-", dir=str(path.parent)))
    try:
        db.save(tmp)
        if path.exists():
            backup = path.with_name(f"{path.name}.bak-{os.getpid()}")
            os.replace(path, backup)
            try:
                os.replace(tmp, path)
            except BaseException:
                os.replace(backup, path)
                raise
            _remove_tree(backup)
        else:
            os.replace(tmp, path)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


def _remove_tree(path):
    if path.is_dir():
        shutil.rmtree(path, ignore_errors=True)
    else:
        try:
            os.unlink(path)
        except OSError:
            pass


def cmd_ingest(args):
    _require_files(args.files)
    db = None
    if (args.db / MANIFEST_NAME).is_file():
        db = SignatureDatabase.load(args.db)
    ingested = []
    for path in args.files:
        next_id = db.next_collection_id(args.label) if db is not None else len(ingested)
        sample, report = ingest_path(
            path, args.dialect, label=args.label, collection_id=next_id,
            collection_start_epoch=args.start_epoch,
            sort_timestamps=not args.no_sort)
        if db is None:
            db = SignatureDatabase(sample.schema)
        db = db.add(sample)
        ingested.append((sample, report))
    _save_db_atomic(db, args.db)
    for sample, report in ingested:
        print(f"{report.path}: label={sample.label} collection={sample.collection_id} "
              f"rows_read={report.rows_read} collapsed={report.rows_collapsed} "
              f"dropped={report.rows_dropped} kept={report.rows_kept}")
    print(f"database: {args.db} samples={len(db)}")
    return EXIT_OK


def cmd_stats(args):
    _require_db(args.db)
    stats = SignatureDatabase.load(args.db).stats()
    print(f"variables: {stats.variable_count}")
    print(f"average length: {stats.average_length}")
    print(f"labels: {stats.label_count}")
    uniform = stats.uniform_samples_per_label
    if uniform is not None:
        print(f"samples per label: {uniform}")
    else:
        detail = ", ".join(f"{label}={n}" for label, n in stats.samples_per_label.items())
        print(f"samples per label: {detail}")
    print(f"total samples: {stats.total}")
    return EXIT_OK


def cmd_distances(args):
    if args.round is not None and args.round < 0:
        raise _UsageError("--round must be non-negative")
    _require_db(args.db)
    db = SignatureDatabase.load(args.db)
    dm = distance_matrix(db, f=args.aggregator,
                         normalize_eigenvalues=not args.raw_eigenvalues)
    _emit(args.out, dm.to_delimited(round_digits=args.round))
    return EXIT_OK


def cmd_evaluate(args):
    _require_db(args.db)
    db = SignatureDatabase.load(args.db)
    curve = pr_curve(db, maxr=args.maxr, f=args.aggregator,
                     normalize_eigenvalues=not args.raw_eigenvalues)
    _emit(args.out, curve.to_delimited())
    return EXIT_OK


def cmd_query(args):
    _require_files([args.file])
    _require_db(args.db)
    db = SignatureDatabase.load(args.db)
    label = args.label if args.label is not None else args.file.stem
    sample, report = ingest_path(args.file, args.dialect, label=label, collection_id=0,
                                 collection_start_epoch=args.start_epoch)
    result = classify_unknown(db, sample, args.k, f=args.aggregator,
                              freeze_weights=args.freeze_weights,
                              normalize_eigenvalues=not args.raw_eigenvalues)
    print(f"query: {label} ({args.file})")
    print(f"rows: kept={report.rows_kept} dropped={report.rows_dropped}")
    sys.stdout.write(result.report())
    return EXIT_OK


def cmd_export_embedding(args):
    _require_db(args.db)
    db = SignatureDatabase.load(args.db)
    unknown = None
    if args.unknown is not None:
        if args.dialect is None:
            raise _UsageError("--dialect is required with --unknown")
        _require_files([args.unknown])
        label = args.label if args.label is not None else args.unknown.stem
        unknown, _ = ingest_path(args.unknown, args.dialect, label=label, collection_id=0,
                                 collection_start_epoch=args.start_epoch)
    dm = export_embedding_input(db, unknown=unknown, f=args.aggregator,
                                normalize_eigenvalues=not args.raw_eigenvalues,
                                freeze_weights=args.freeze_weights)
    _emit(args.out, dm.to_delimited())
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
