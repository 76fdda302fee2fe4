"""External and internal cluster-validity measures."""

from __future__ import annotations

import logging
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .distances import pairwise

log = logging.getLogger(__name__)


class UndefinedMeasureError(ValueError):
    """A measure is undefined for the given input (e.g. a zero denominator)."""


@dataclass(frozen=True)
class Partition:
    """Cluster ids are 1-based; ``medoids[k - 1]`` is the prototype of cluster ``k``."""

    assignment: tuple[int, ...]
    medoids: Optional[tuple[int, ...]] = None
    k: Optional[int] = None

    def __post_init__(self):
        assignment = tuple(int(a) for a in self.assignment)
        object.__setattr__(self, "assignment", assignment)
        k = self.k if self.k is not None else (max(assignment) if assignment else 0)
        object.__setattr__(self, "k", int(k))
        if k < 1:
            raise ValueError("partition needs at least one cluster")
        used = set(assignment)
        if used != set(range(1, k + 1)):
            missing = sorted(set(range(1, k + 1)) - used)
            extra = sorted(used - set(range(1, k + 1)))
            raise ValueError(f"invalid partition: empty clusters {missing}, out-of-range ids {extra}")
        if self.medoids is not None:
            medoids = tuple(int(m) for m in self.medoids)
            object.__setattr__(self, "medoids", medoids)
            if len(medoids) != k or len(set(medoids)) != k:
                raise ValueError("medoids must be K distinct ordinals")
            for c, m in enumerate(medoids, start=1):
                if not 0 <= m < len(assignment) or assignment[m] != c:
                    raise ValueError(f"medoid {m} is not a member of cluster {c}")

    @classmethod
    def from_labels(cls, labels: Sequence, medoids: Optional[Sequence[int]] = None) -> "Partition":
        """Relabel arbitrary cluster names to 1..K in order of first appearance."""
        ids: dict = {}
        assignment = [ids.setdefault(lab, len(ids) + 1) for lab in labels]
        return cls(tuple(assignment), None if medoids is None else tuple(medoids), len(ids))

    def __len__(self):
        return len(self.assignment)

    def members(self, cluster: int) -> list[int]:
        return [i for i, c in enumerate(self.assignment) if c == cluster]


@dataclass(frozen=True)
class PairCounts:
    a: int
    b: int
    c: int
    d: int

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d


PartitionLike = Union[Partition, Sequence]


def _assignment(p: PartitionLike) -> Sequence:
    return p.assignment if isinstance(p, Partition) else p


def _check_parallel(truth: Sequence, pred: Sequence):
    if len(truth) != len(pred):
        raise ValueError(f"truth has {len(truth)} labels but partition covers {len(pred)} series")
    if any(t is None for t in truth):
        raise ValueError("every series needs a ground-truth label")


def _choose2(n) -> int:
    return int(n) * (int(n) - 1) // 2


def pair_counts(truth: Sequence, predicted: PartitionLike) -> PairCounts:
    """Count agreeing/disagreeing unordered pairs via the contingency table."""
    pred = _assignment(predicted)
    _check_parallel(truth, pred)
    cells = Counter(zip(truth, pred))
    same_both = sum(_choose2(n) for n in cells.values())
    same_truth = sum(_choose2(n) for n in Counter(truth).values())
    same_pred = sum(_choose2(n) for n in Counter(pred).values())
    total = _choose2(len(truth))
    a = same_both
    b = same_truth - a
    c = same_pred - a
    return PairCounts(a, b, c, total - a - b - c)


def rand_index(pc: PairCounts) -> float:
    if pc.total == 0:
        raise UndefinedMeasureError("Rand index undefined with fewer than 2 series")
    return (pc.a + pc.d) / pc.total


def jaccard(pc: PairCounts) -> float:
    denom = pc.a + pc.b + pc.c
    if denom == 0:
        log.info("jaccard: a + b + c == 0, returning 1 by convention")
        return 1.0
    return pc.a / denom


def folkes_mallow(pc: PairCounts) -> float:
    if pc.a + pc.b == 0:
        raise UndefinedMeasureError("Folkes-Mallow undefined: a + b == 0 (no same-class pairs)")
    if pc.a + pc.c == 0:
        raise UndefinedMeasureError("Folkes-Mallow undefined: a + c == 0 (no same-cluster pairs)")
    return float(np.sqrt(pc.a / (pc.a + pc.b) * (pc.a / (pc.a + pc.c))))


def purity(truth: Sequence, predicted: PartitionLike) -> float:
    pred = _assignment(predicted)
    _check_parallel(truth, pred)
    by_cluster: dict = {}
    for t, c in zip(truth, pred):
        by_cluster.setdefault(c, Counter())[t] += 1
    return sum(max(cnt.values()) for cnt in by_cluster.values()) / len(truth)


def csm(truth: Sequence, predicted: PartitionLike) -> float:
    """Cluster similarity: mean over true classes of the best Dice overlap with any cluster."""
    pred = _assignment(predicted)
    _check_parallel(truth, pred)
    classes: dict = {}
    clusters: dict = {}
    for i, (t, c) in enumerate(zip(truth, pred)):
        classes.setdefault(t, set()).add(i)
        clusters.setdefault(c, set()).add(i)
    if len(classes) != len(clusters):
        warnings.warn(
            f"CSM computed with {len(classes)} classes but {len(clusters)} clusters",
            RuntimeWarning,
        )
    total = 0.0
    for g in classes.values():
        total += max(2 * len(g & c) / (len(g) + len(c)) for c in clusters.values())
    return total / len(classes)


def _require_medoids(p: Partition) -> tuple[int, ...]:
    if p.medoids is None:
        raise ValueError("partition has no medoids")
    return p.medoids


def _compactness_from(cols: np.ndarray, assignment: np.ndarray, k: int) -> float:
    # cols[j, c] = d(series j, medoid of cluster c + 1); assignment holds 1-based ids
    total = 0.0
    for c in range(k):
        members = assignment == c + 1
        n_k = int(members.sum())
        if n_k == 0:
            raise ValueError(f"invalid partition: cluster {c + 1} is empty")
        total += float(cols[members, c].sum()) / n_k
    return total / k


def compactness(data, p: Partition, dist) -> float:
    """Mean over clusters of the mean member-to-medoid distance."""
    cols = pairwise(data, dist).columns(_require_medoids(p))
    return _compactness_from(cols, np.asarray(p.assignment), p.k)


def _separation_from(medoid_dist: np.ndarray) -> float:
    k = medoid_dist.shape[0]
    if k < 2:
        raise UndefinedMeasureError("separation needs at least 2 clusters")
    total = 0.0
    for j in range(k):
        for i in range(j + 1, k):
            total += float(medoid_dist[j, i])
    # each unordered pair summed once, yet divided by K(K-1): half the mean pairwise distance
    return total / (k * (k - 1))


def separation(data, p: Partition, dist) -> float:
    medoids = _require_medoids(p)
    if p.k < 2:
        raise UndefinedMeasureError("separation needs at least 2 clusters")
    cols = pairwise(data, dist).columns(medoids)
    return _separation_from(cols[list(medoids), :])


def _check_weights(w1: float, w2: float):
    if not (0 <= w1 <= 1 and 0 <= w2 <= 1) or abs(w1 + w2 - 1) > 1e-12:
        raise ValueError(f"weights must lie in [0, 1] and sum to 1, got w1={w1}, w2={w2}")


def combined(data, p: Partition, dist, w1: float = 0.5, w2: float = 0.5) -> float:
    """``w1 * compactness - w2 * separation``; lower is better."""
    _check_weights(w1, w2)
    return w1 * compactness(data, p, dist) - w2 * separation(data, p, dist)


def _nearest_medoid_distances(data, p: Partition, dist) -> np.ndarray:
    cols = pairwise(data, dist).columns(_require_medoids(p))
    return cols.min(axis=1)


def sse(data, p: Partition, dist) -> float:
    """Sum over all series of the squared distance to the nearest medoid."""
    d = _nearest_medoid_distances(data, p, dist)
    return float(np.sum(d * d))


def sse_unsquared(data, p: Partition, dist) -> float:
    """Sum over all series of the (unsquared) distance to the nearest medoid."""
    return float(np.sum(_nearest_medoid_distances(data, p, dist)))
