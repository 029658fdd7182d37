"""Retrieval-quality evaluation over the distance space.

Implements the modified leave-one-out KNN: for a query and a target
count r of relevant items, grow the neighbor count k until the k
nearest contain exactly r samples sharing the query's label, giving
precision r/k. Averaging over every query at r = 1..maxr yields a
precision-vs-recall curve with recall = r/maxr. An unknown sample is
classified by plurality vote among its k nearest database samples.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .eros import (
    DistanceMatrix,
    _pairwise,
    aggregate_weights,
    decompose,
    distance_matrix,
    eigenvalue_matrix,
    eros_distance,
)
from .errors import DuplicateSample, KTooLarge, MaxrTooLarge, NotEnoughRelevant
from .samples import canonicalize_sample


@dataclass(frozen=True)
class QueryResult:
    """Outcome of one modified-KNN query: k neighbors examined to find r."""

    query: tuple[str, int]
    r: int
    k: int
    precision: float


@dataclass
class PrCurve:
    """Precision-vs-recall points for r = 1..maxr; recall = r/maxr."""

    maxr: int
    points: list[tuple[float, float]]

    @property
    def recalls(self):
        return [p[0] for p in self.points]

    @property
    def precisions(self):
        return [p[1] for p in self.points]

    def to_delimited(self):
        lines = ["recall,avg_precision"]
        for recall, precision in self.points:
            lines.append(f"{recall!r},{precision!r}")
        return "\n".join(lines) + "\n"

    def write(self, path):
        Path(path).write_text(self.to_delimited(), encoding="utf-8")


def _ranked_neighbors(dm, query_key):
    """Every other sample ordered by (distance, label, collection_id)."""
    qi = dm.index_of(query_key)
    row = dm.values[qi]
    order = sorted(
        (i for i in range(len(dm.keys)) if i != qi),
        key=lambda i: (row[i], dm.keys[i]),
    )
    return [(dm.keys[i], float(row[i])) for i in order]


def knn_until_r(dm, query_key, r):
    """Grow k until the k nearest contain exactly r same-label samples.

    The query itself is excluded (leave-one-out); distance ties break
    deterministically by (label, collection_id).
    """
    query_key = tuple(query_key)
    label = query_key[0]
    neighbors = _ranked_neighbors(dm, query_key)
    available = sum(1 for key, _ in neighbors if key[0] == label)
    if r < 1:
        raise ValueError("r must be >= 1")
    if r > available:
        raise NotEnoughRelevant(r, available)
    found = 0
    for k, (key, _) in enumerate(neighbors, start=1):
        if key[0] == label:
            found += 1
            if found == r:
                return QueryResult(query=query_key, r=r, k=k, precision=r / k)
    raise AssertionError("unreachable: r was validated against available")


def pr_curve(db, maxr=5, f="mean", normalize_eigenvalues=True, distances=None):
    """Average precision at each r = 1..maxr over every sample as query.

    Weights are computed once from the full database. Every label must
    keep at least maxr other samples per query; otherwise the evaluation
    refuses to run rather than silently averaging over fewer queries.
    """
    if maxr < 1:
        raise ValueError("maxr must be >= 1")
    counts = Counter(s.label for s in db.samples)
    limit_label, limit_count = min(counts.items(), key=lambda kv: (kv[1], kv[0]))
    if maxr > limit_count - 1:
        raise MaxrTooLarge(maxr, limit_count - 1, limit_label)
    if distances is not None:
        if sorted(distances.keys) != sorted(db.keys()):
            raise ValueError("distance matrix keys do not match the database")
        dm = distances
    else:
        dm = distance_matrix(db, f=f, normalize_eigenvalues=normalize_eigenvalues)
    total = [0.0] * maxr
    for key in dm.keys:
        found = 0
        for k, (neighbor, _) in enumerate(_ranked_neighbors(dm, key), start=1):
            if neighbor[0] == key[0]:
                found += 1
                total[found - 1] += found / k
                if found == maxr:
                    break
    n = len(dm.keys)
    points = [(r / maxr, total[r - 1] / n) for r in range(1, maxr + 1)]
    return PrCurve(maxr=maxr, points=points)


@dataclass(frozen=True)
class LabelScore:
    """One label's showing among the k nearest: best distance and votes."""

    label: str
    best_distance: float
    votes: int


@dataclass
class ClassificationResult:
    """Plurality-vote outcome over the k nearest database samples.

    ranking orders the labels seen among the k nearest by ascending
    best distance; vote counts sum to k. The chosen label wins by
    votes, with ties broken by smaller best distance, then
    lexicographically.
    """

    label: str
    k: int
    ranking: list[LabelScore]
    neighbors: list[tuple[tuple[str, int], float]]

    def report(self):
        lines = [f"k: {self.k}", "rank,label,best_distance,votes"]
        for rank, score in enumerate(self.ranking, start=1):
            lines.append(f"{rank},{score.label},{score.best_distance:.6f},{score.votes}")
        lines.append(f"chosen: {self.label}")
        return "\n".join(lines) + "\n"


def plurality_label(scores):
    """Most votes, ties broken by smaller best distance, then label."""
    return min(scores, key=lambda s: (-s.votes, s.best_distance, s.label)).label


def _label_scores(nearest):
    by_label = {}
    for (label, _), dist in nearest:
        entry = by_label.setdefault(label, [dist, 0])
        entry[0] = min(entry[0], dist)
        entry[1] += 1
    return sorted(
        (LabelScore(label=label, best_distance=best, votes=votes)
         for label, (best, votes) in by_label.items()),
        key=lambda s: (s.best_distance, s.label),
    )


def classify_unknown(db, unknown, k, f="mean", freeze_weights=False,
                     normalize_eigenvalues=True):
    """Label an unknown sample by its k nearest database samples.

    By default the unknown joins the database for the weight
    computation, mirroring how a freshly registered sample would be
    treated; freeze_weights=True reuses weights from the database alone.
    """
    db.validate()
    unknown = canonicalize_sample(unknown, db.schema)
    unknown.validate(require_finite=True)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(db):
        raise KTooLarge(f"k={k} but the database holds {len(db)} samples")
    decompositions = [decompose(s) for s in db.samples]
    unknown_decomp = decompose(unknown)
    keys = db.keys()
    if freeze_weights:
        S = eigenvalue_matrix(decompositions, keys=keys, normalize=normalize_eigenvalues)
    else:
        S = eigenvalue_matrix(decompositions + [unknown_decomp],
                              keys=keys + [unknown.key],
                              normalize=normalize_eigenvalues)
    w = aggregate_weights(S, f)
    dists = [eros_distance(unknown_decomp, d, w) for d in decompositions]
    order = sorted(range(len(keys)), key=lambda i: (dists[i], keys[i]))
    nearest = [(keys[i], dists[i]) for i in order[:k]]
    ranking = _label_scores(nearest)
    return ClassificationResult(label=plurality_label(ranking), k=k,
                                ranking=ranking, neighbors=nearest)


def export_embedding_input(db, unknown=None, f="mean", normalize_eigenvalues=True,
                           freeze_weights=False):
    """Pairwise distance matrix usable as a precomputed metric.

    With an unknown sample the matrix gains one final row and column, so
    external embedding tools (t-SNE and friends) can place it among the
    database samples. Weights include the unknown unless
    freeze_weights=True.
    """
    db.validate()
    samples = list(db.samples)
    if unknown is not None:
        unknown = canonicalize_sample(unknown, db.schema)
        unknown.validate(require_finite=True)
        if unknown.key in set(db.keys()):
            raise DuplicateSample(*unknown.key)
        samples.append(unknown)
    keys = [s.key for s in samples]
    decompositions = [decompose(s) for s in samples]
    if freeze_weights and unknown is not None:
        weight_decomps = decompositions[: len(db)]
        weight_keys = keys[: len(db)]
    else:
        weight_decomps = decompositions
        weight_keys = keys
    S = eigenvalue_matrix(weight_decomps, keys=weight_keys, normalize=normalize_eigenvalues)
    w = aggregate_weights(S, f)
    return DistanceMatrix(keys=keys, values=_pairwise(decompositions, w))
