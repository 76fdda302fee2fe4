"""Loading, standardizing, reducing and slope-annotating univariate time-series."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np


class ParseError(ValueError):
    """Raised when a UCR-format file cannot be parsed."""

    def __init__(self, message: str, path=None, line: Optional[int] = None, column: Optional[int] = None):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.column = column


@dataclass(frozen=True)
class RawSeries:
    values: tuple[float, ...]
    label: Optional[int] = None
    id: int = 0

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) < 2:
            raise ValueError("a series needs at least 2 values")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("series values must be finite")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class SlopePoint:
    value: float
    time_index: int
    left_sin: Optional[float] = None
    right_sin: Optional[float] = None


@dataclass(frozen=True)
class SlopeSeries:
    points: tuple[SlopePoint, ...]
    source_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise ValueError("a slope series needs at least 2 points")

    def __len__(self):
        return len(self.points)

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points], dtype=float)

    @property
    def time_indices(self) -> np.ndarray:
        return np.array([p.time_index for p in self.points], dtype=np.int64)

    def sines(self) -> tuple[np.ndarray, np.ndarray]:
        """Left and right slope sines as float arrays, NaN where absent."""
        left = np.array([np.nan if p.left_sin is None else p.left_sin for p in self.points])
        right = np.array([np.nan if p.right_sin is None else p.right_sin for p in self.points])
        return left, right


@dataclass
class Dataset:
    series: list[SlopeSeries]
    labels: list[Optional[int]] = field(default_factory=list)
    name: str = "dataset"
    k_hint: Optional[int] = None

    def __post_init__(self):
        if not self.series:
            raise ValueError("dataset must contain at least one series")
        if self.labels and len(self.labels) != len(self.series):
            raise ValueError(
                f"labels ({len(self.labels)}) not parallel to series ({len(self.series)})"
            )
        if self.k_hint is None and self.labels and all(lab is not None for lab in self.labels):
            self.k_hint = len(set(self.labels))

    def __len__(self):
        return len(self.series)


def standardize(series: RawSeries) -> RawSeries:
    """Affinely map values onto [-1, 1]; a constant series maps to all zeros."""
    v = np.asarray(series.values, dtype=float)
    lo, hi = v.min(), v.max()
    if hi == lo:
        warnings.warn(f"series {series.id} is constant; standardized to zeros", RuntimeWarning)
        out = np.zeros_like(v)
    else:
        out = 2.0 * (v - lo) / (hi - lo) - 1.0
        # pin the extremes exactly; rounding can leave e.g. 0.9999999999999998
        out[v == lo] = -1.0
        out[v == hi] = 1.0
    return replace(series, values=tuple(out.tolist()))


def _vertical_deviation(times, values, left: int, mid: int, right: int) -> float:
    t0, t1, t2 = times[left], times[mid], times[right]
    v0, v2 = values[left], values[right]
    on_line = v0 + (v2 - v0) * (t1 - t0) / (t2 - t0)
    return abs(values[mid] - on_line)


def segment_extrema(series: RawSeries, budget: int) -> list[tuple[int, float]]:
    """Reduce a series to its endpoints plus its most prominent strict local extrema.

    A budget covering the whole series keeps every point. Otherwise every
    strict local extremum is a candidate. While the candidate count plus
    the two endpoints exceeds ``budget``, the candidate with the smallest
    vertical deviation from the line joining its currently retained neighbours
    is dropped (earliest one on ties).
    """
    if budget < 2:
        raise ValueError(f"segmentation budget must be >= 2, got {budget}")
    v = series.values
    n = len(v)
    if budget >= n:
        return list(enumerate(v))
    keep = [0]
    for i in range(1, n - 1):
        if (v[i] > v[i - 1] and v[i] > v[i + 1]) or (v[i] < v[i - 1] and v[i] < v[i + 1]):
            keep.append(i)
    keep.append(n - 1)

    while len(keep) > budget:
        devs = [
            _vertical_deviation(keep, [v[i] for i in keep], pos - 1, pos, pos + 1)
            for pos in range(1, len(keep) - 1)
        ]
        drop = 1 + int(np.argmin(devs))
        del keep[drop]
    return [(i, v[i]) for i in keep]


def annotate_slopes(reduced: Sequence[tuple[int, float]], source_id: int = 0) -> SlopeSeries:
    """Attach the sine of each segment's angle to the points bounding it.

    Angles are measured in original time steps, so a segment spanning
    ``j - i`` raw samples has ``theta = arctan((u_j - u_i) / (j - i))``.
    """
    if len(reduced) < 2:
        raise ValueError("need at least 2 points to annotate slopes")
    times = [int(t) for t, _ in reduced]
    values = [float(x) for _, x in reduced]
    for a, b in zip(times, times[1:]):
        if b <= a:
            raise ValueError(f"time indices must be strictly increasing ({a} then {b})")

    seg_sin = [
        math.sin(math.atan((values[k + 1] - values[k]) / (times[k + 1] - times[k])))
        for k in range(len(times) - 1)
    ]
    points = []
    for k, (t, x) in enumerate(zip(times, values)):
        points.append(
            SlopePoint(
                value=x,
                time_index=t,
                left_sin=seg_sin[k - 1] if k > 0 else None,
                right_sin=seg_sin[k] if k < len(seg_sin) else None,
            )
        )
    return SlopeSeries(tuple(points), source_id=source_id)


def default_budget(length: int) -> int:
    """20% of the raw length, clamped to [5, 256]."""
    return int(min(256, max(5, round(0.2 * length))))


def resolve_budget(budget: Union[int, float, None], length: int) -> int:
    """Turn an absolute count or a fraction of ``length`` into a point budget."""
    if budget is None:
        return default_budget(length)
    if isinstance(budget, float) and 0 < budget < 1:
        return max(2, int(round(budget * length)))
    if isinstance(budget, float) and not budget.is_integer():
        raise ValueError(f"budget must be an integer count or a fraction in (0, 1), got {budget}")
    budget = int(budget)
    if budget < 2:
        raise ValueError(f"segmentation budget must be >= 2, got {budget}")
    return budget


def to_slope_series(series: RawSeries, budget: Union[int, float, None] = None) -> SlopeSeries:
    """Standardize, reduce and annotate one raw series."""
    std = standardize(series)
    reduced = segment_extrema(std, resolve_budget(budget, len(std)))
    return annotate_slopes(reduced, source_id=series.id)


def build_dataset(
    raw: Sequence[RawSeries], budget: Union[int, float, None] = None, name: str = "dataset"
) -> Dataset:
    series = [to_slope_series(s, budget) for s in raw]
    labels = [s.label for s in raw]
    return Dataset(series=series, labels=labels, name=name)


def _parse_number(text: str, path, line: int, column: int) -> float:
    try:
        x = float(text)
    except ValueError:
        raise ParseError(f"non-numeric field {text!r}", path, line, column) from None
    if not math.isfinite(x):
        raise ParseError(f"non-finite field {text!r}", path, line, column)
    return x


def parse_ucr_lines(lines, path=None) -> list[RawSeries]:
    """Parse UCR-format records: class label first, then values, comma or tab separated."""
    out: list[RawSeries] = []
    delimiter = None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        if delimiter is None:
            delimiter = "\t" if "\t" in line else ("," if "," in line else None)
        fields = [f.strip() for f in line.split(delimiter)] if delimiter else line.split()
        fields = [f for f in fields if f != ""]
        nums = [_parse_number(f, path, lineno, col) for col, f in enumerate(fields, start=1)]
        label = nums[0]
        if not label.is_integer():
            raise ParseError(f"class label {fields[0]!r} is not an integer", path, lineno, 1)
        try:
            out.append(RawSeries(values=tuple(nums[1:]), label=int(label), id=len(out)))
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
    if not out:
        raise ParseError("no series found (empty file)", path)
    return out


def load_ucr(path) -> list[RawSeries]:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_ucr_lines(fh.read().splitlines(), path=path)
