"""Shared fixtures: synthetic signature generators and file writers."""

from pathlib import Path

import numpy as np
import pytest

from telesim.database import SignatureDatabase
from telesim.samples import MetricSchema, MtsSample

DATA_DIR = Path(__file__).parent / "data"


def metric_schema(n_metrics, dialect="sar"):
    return MetricSchema(tuple(f"m{i:02d}" for i in range(n_metrics)), dialect)


def axis_sample(rng, n_metrics, axis, label, collection_id, n_steps=None,
                strong=10.0, noise=0.1, dialect="sar"):
    """Sample whose covariance is dominated by one coordinate axis.

    Distinct axes give mutually orthogonal dominant eigenvectors, so
    labels built on different axes are well separated in distance.
    """
    m = int(n_steps) if n_steps is not None else int(rng.integers(100, 160))
    direction = np.zeros(n_metrics)
    direction[axis] = 1.0
    drive = rng.normal(size=(m, 1))
    data = drive * direction * strong + rng.normal(scale=noise, size=(m, n_metrics))
    return MtsSample(label=label, collection_id=collection_id,
                     schema=metric_schema(n_metrics, dialect), data=data,
                     start_epoch=1_632_834_000)


def spread_sample(rng, n_steps, n_metrics):
    """Generic sample whose covariance spectrum is well separated.

    The raw draw is whitened and recolored so the sample covariance has
    eigenvalues exactly 1..n_metrics in a random orthonormal basis; gaps
    this wide keep the eigenbasis numerically stable under reordering of
    floating-point sums. Requires n_steps >= n_metrics + 2.
    """
    z = rng.normal(size=(n_steps, n_metrics))
    z = z - z.mean(axis=0)
    cov = z.T @ z / (n_steps - 1)
    vals, vecs = np.linalg.eigh(cov)
    white = z @ vecs @ np.diag(vals ** -0.5) @ vecs.T
    basis, _ = np.linalg.qr(rng.normal(size=(n_metrics, n_metrics)))
    target = np.arange(1.0, n_metrics + 1)
    colored = white @ basis @ np.diag(np.sqrt(target)) @ basis.T
    return colored + rng.normal(size=n_metrics) * 5.0


def synthetic_db(n_labels=9, per_label=9, n_metrics=9, seed=7, n_steps=None):
    """Labeled database of axis-dominated signatures, one axis per label."""
    rng = np.random.default_rng(seed)
    db = SignatureDatabase(metric_schema(n_metrics))
    for j in range(n_labels):
        for c in range(per_label):
            db = db.add(axis_sample(rng, n_metrics, axis=j, label=f"W{j}",
                                    collection_id=c, n_steps=n_steps))
    return db


def write_sar_csv(path, sample):
    """Render a sample back into sar-dialect CSV (timestamp first column)."""
    lines = [",".join(("timestamp",) + sample.schema.names)]
    start = sample.start_epoch if sample.start_epoch is not None else 0
    for i, row in enumerate(sample.data):
        lines.append(",".join([str(start + i)] + [repr(float(v)) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sar_fixture():
    return DATA_DIR / "mlc_sar_sample.csv"


@pytest.fixture
def perf_fixture():
    return DATA_DIR / "mlc_perf_sample.csv"
