"""Pointwise and elastic sequence distances.

The bilateral slope-based distance (BSD) compares two points by their value
and by the sines of the segments on either side of them. Plugged into
symmetric DTW it gives ``dtw_bsd``; ``dtw_ed``, ``edr`` and ``lcss`` are the
usual value-only baselines.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ._kernels import DIAG, LEFT, START, UP, dtw_accumulate, edr_table, lcss_length
from .series import Dataset, SlopeSeries

KINDS = ("dtw_bsd", "dtw_ed", "edr", "lcss")


@dataclass(frozen=True)
class BsdPoint:
    value: float
    left_sin: Optional[float] = None
    right_sin: Optional[float] = None


@dataclass(frozen=True)
class DistanceSpec:
    kind: str = "dtw_bsd"
    minkowski_b: float = 2.0
    edr_epsilon: float = 0.2
    lcss_epsilon: float = 0.2
    lcss_delta: Optional[int] = None
    normalize_dtw: bool = False

    def __post_init__(self):
        kind = self.kind.replace("-", "_").lower()
        if kind not in KINDS:
            raise ValueError(f"unknown distance kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        if self.minkowski_b < 1:
            raise ValueError("minkowski_b must be >= 1")
        if self.edr_epsilon <= 0 or self.lcss_epsilon <= 0:
            raise ValueError("epsilons must be > 0")
        if self.lcss_delta is not None and self.lcss_delta < 0:
            raise ValueError("lcss_delta must be >= 0")


@dataclass(frozen=True)
class DtwResult:
    cost: float
    path: list[tuple[int, int]]


def minkowski_point(x: float, y: float, b: float = 2.0) -> float:
    if b < 1:
        raise ValueError(f"Minkowski order must be >= 1, got {b}")
    return (abs(x - y) ** b) ** (1.0 / b)


def bsd_point(a: BsdPoint, c: BsdPoint) -> float:
    """Value difference plus right- and left-slope sine differences.

    A slope term is dropped when either point lacks that side (series
    endpoints), which reduces to the one-sided form at the boundaries.
    """
    d = abs(a.value - c.value)
    if a.right_sin is not None and c.right_sin is not None:
        d += abs(a.right_sin - c.right_sin)
    if a.left_sin is not None and c.left_sin is not None:
        d += abs(a.left_sin - c.left_sin)
    return d


def bsd_points(series: SlopeSeries) -> list[BsdPoint]:
    return [BsdPoint(p.value, p.left_sin, p.right_sin) for p in series.points]


def _backtrace(step: np.ndarray) -> list[tuple[int, int]]:
    i, j = step.shape[0] - 1, step.shape[1] - 1
    path = [(i, j)]
    while True:
        move = step[i, j]
        if move == START:
            break
        if move == DIAG:
            i, j = i - 1, j - 1
        elif move == UP:
            i -= 1
        elif move == LEFT:
            j -= 1
        path.append((i, j))
    path.reverse()
    return path


def dtw_from_local(local: np.ndarray, normalize: bool = False) -> DtwResult:
    """Symmetric DTW over a precomputed local-distance matrix.

    The first cell counts twice, diagonal moves cost ``2*d``, horizontal and
    vertical moves cost ``d``. Paths are 0-based index pairs from ``(0, 0)``
    to ``(N-1, M-1)``.
    """
    local = np.ascontiguousarray(local, dtype=float)
    if local.ndim != 2 or local.shape[0] == 0 or local.shape[1] == 0:
        raise ValueError("DTW needs two non-empty sequences")
    cost, step = dtw_accumulate(local)
    total = float(cost[-1, -1])
    if normalize:
        total /= local.shape[0] + local.shape[1]
    return DtwResult(total, _backtrace(step))


def dtw(
    s1: Sequence,
    s2: Sequence,
    local: Optional[Callable] = None,
    normalize: bool = False,
) -> DtwResult:
    """Symmetric DTW between two point sequences under ``local`` (default ``|x - y|``)."""
    if len(s1) == 0 or len(s2) == 0:
        raise ValueError("DTW needs two non-empty sequences")
    if local is None:
        a = np.asarray(s1, dtype=float)
        b = np.asarray(s2, dtype=float)
        return dtw_from_local(np.abs(a[:, None] - b[None, :]), normalize)
    mat = np.empty((len(s1), len(s2)))
    for i, x in enumerate(s1):
        for j, y in enumerate(s2):
            mat[i, j] = local(x, y)
    return dtw_from_local(mat, normalize)


def bsd_matrix(s1: SlopeSeries, s2: SlopeSeries) -> np.ndarray:
    """All-pairs BSD between the points of two slope series.

    Terms are added in the same order as ``bsd_point`` so both agree bit for bit.
    """
    v1, v2 = s1.values, s2.values
    l1, r1 = s1.sines()
    l2, r2 = s2.sines()
    out = np.abs(v1[:, None] - v2[None, :])
    right = np.abs(r1[:, None] - r2[None, :])
    out = out + np.where(np.isnan(right), 0.0, right)
    left = np.abs(l1[:, None] - l2[None, :])
    out = out + np.where(np.isnan(left), 0.0, left)
    return out


def dtw_bsd(s1: SlopeSeries, s2: SlopeSeries, normalize: bool = False) -> DtwResult:
    return dtw_from_local(bsd_matrix(s1, s2), normalize)


def dtw_ed(s1: SlopeSeries, s2: SlopeSeries, b: float = 2.0, normalize: bool = False) -> DtwResult:
    if b < 1:
        raise ValueError(f"Minkowski order must be >= 1, got {b}")
    # on scalars every Minkowski order reduces to |x - y|
    v1, v2 = s1.values, s2.values
    return dtw_from_local(np.abs(v1[:, None] - v2[None, :]), normalize)


def edr(s1: Sequence[float], s2: Sequence[float], epsilon: float = 0.2) -> int:
    """Edit distance on real sequences: samples within ``epsilon`` match for free."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    a = np.asarray(s1, dtype=float)
    b = np.asarray(s2, dtype=float)
    return int(edr_table(a, b, float(epsilon)))


def lcss_distance(
    s1: Sequence[float],
    s2: Sequence[float],
    epsilon: float = 0.2,
    delta: Optional[int] = None,
) -> float:
    """``1 - LCSS / min(N, M)`` with an ``epsilon`` match tolerance and optional index window."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    if delta is not None and delta < 0:
        raise ValueError("delta must be >= 0")
    a = np.asarray(s1, dtype=float)
    b = np.asarray(s2, dtype=float)
    if len(a) == 0 or len(b) == 0:
        return 1.0
    n = lcss_length(a, b, float(epsilon), -1 if delta is None else int(delta))
    return 1.0 - n / min(len(a), len(b))


def sequence_distance(s1: SlopeSeries, s2: SlopeSeries, spec: DistanceSpec) -> float:
    """Distance between two slope series under the measure selected by ``spec``."""
    if spec.kind == "dtw_bsd":
        return dtw_bsd(s1, s2, spec.normalize_dtw).cost
    if spec.kind == "dtw_ed":
        return dtw_ed(s1, s2, spec.minkowski_b, spec.normalize_dtw).cost
    if spec.kind == "edr":
        return float(edr(s1.values, s2.values, spec.edr_epsilon))
    return lcss_distance(s1.values, s2.values, spec.lcss_epsilon, spec.lcss_delta)


class DistanceMatrix:
    """Lazily filled, memoized pairwise distances over a dataset.

    Each unordered pair is computed once, always as ``d(lower, higher)``, so
    the stored value does not depend on which side asked first or on which
    worker filled it.
    """

    def __init__(self, data: Dataset, spec: DistanceSpec):
        self.data = data
        self.spec = spec
        n = len(data)
        self._d = np.full((n, n), np.nan)
        np.fill_diagonal(self._d, 0.0)
        self._lock = threading.Lock()

    def _fill(self, i: int, j: int) -> float:
        lo, hi = (i, j) if i < j else (j, i)
        d = sequence_distance(self.data.series[lo], self.data.series[hi], self.spec)
        with self._lock:
            self._d[lo, hi] = d
            self._d[hi, lo] = d
        return d

    def get(self, i: int, j: int) -> float:
        d = self._d[i, j]
        if np.isnan(d):
            d = self._fill(i, j)
        return float(d)

    def columns(self, cols: Sequence[int]) -> np.ndarray:
        """Distances from every series to each of ``cols``, shape ``(T, len(cols))``."""
        cols = list(cols)
        block = self._d[:, cols]
        missing = np.argwhere(np.isnan(block))
        for row, c in missing:
            self._fill(int(row), cols[c])
        return self._d[:, cols].copy()

    def full(self) -> np.ndarray:
        return self.columns(range(len(self)))

    @classmethod
    def from_array(cls, matrix, data: Optional[Dataset] = None, spec: Optional[DistanceSpec] = None):
        """Wrap a fully known symmetric distance matrix."""
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("distance matrix must be square")
        if np.isnan(matrix).any():
            raise ValueError("distance matrix must be fully specified")
        obj = cls.__new__(cls)
        obj.data = data
        obj.spec = spec
        obj._d = matrix
        obj._lock = threading.Lock()
        return obj

    def __len__(self):
        return self._d.shape[0]


def pairwise(data: Dataset, dist) -> DistanceMatrix:
    """Accept either a ``DistanceSpec`` or an existing ``DistanceMatrix``."""
    if isinstance(dist, DistanceMatrix):
        return dist
    if isinstance(dist, DistanceSpec):
        return DistanceMatrix(data, dist)
    raise TypeError(f"expected DistanceSpec or DistanceMatrix, got {type(dist).__name__}")
