"""Labelled synthetic datasets with known class structure."""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .series import RawSeries


def _sine(u):
    return np.sin(2 * np.pi * u)


def _ramp(u):
    return 2.0 * u - 1.0


def _square(u):
    return np.where(np.mod(u, 1.0) < 0.5, 1.0, -1.0)


def _sawtooth(rise: float, cycles: int) -> Callable:
    """Periodic wave between -1 and 1 spending fraction ``rise`` of each cycle going up."""

    def f(u):
        phase = np.mod(u * cycles, 1.0)
        up = -1.0 + 2.0 * phase / rise
        down = 1.0 - 2.0 * (phase - rise) / (1.0 - rise)
        return np.where(phase < rise, up, down)

    return f


SHAPE_FAMILIES: dict[str, Callable] = {"sine": _sine, "ramp": _ramp, "square": _square}

# identical extreme levels and cycle count; only the rise/fall slopes differ
SLOPE_FAMILIES: dict[str, Callable] = {
    "slow_rise": _sawtooth(0.8, 6),
    "symmetric": _sawtooth(0.5, 6),
    "fast_rise": _sawtooth(0.2, 6),
}


def make_families(
    families: dict[str, Callable],
    n_per_class: int = 20,
    length: int = 100,
    jitter: float = 0.1,
    max_shift: float = 0.1,
    seed: int = 0,
) -> list[RawSeries]:
    """Draw ``n_per_class`` noisy, time-shifted copies of each family prototype.

    Each sample gets additive uniform noise in ``[-jitter, jitter]`` and a
    random integer time shift of up to ``max_shift * length`` steps. Labels
    are 1-based in the order of ``families``; series are interleaved by class.
    """
    if not families:
        raise ValueError("need at least one family")
    if n_per_class < 1 or length < 2:
        raise ValueError("n_per_class must be >= 1 and length >= 2")
    rng = np.random.default_rng(seed)
    t = np.arange(length)
    out = []
    max_steps = int(round(max_shift * length))
    for _ in range(n_per_class):
        for label, shape in enumerate(families.values(), start=1):
            shift = int(rng.integers(0, max_steps + 1))
            values = shape((t - shift) / length) + rng.uniform(-jitter, jitter, length)
            out.append(RawSeries(tuple(values.tolist()), label=label, id=len(out)))
    return out


def shape_families(**kwargs) -> list[RawSeries]:
    return make_families(SHAPE_FAMILIES, **kwargs)


def slope_families(**kwargs) -> list[RawSeries]:
    return make_families(SLOPE_FAMILIES, **kwargs)


def write_ucr(series: Sequence[RawSeries], path, delimiter: str = ",") -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in series:
            fields = [str(s.label if s.label is not None else 0)] + [repr(v) for v in s.values]
            fh.write(delimiter.join(fields) + "\n")
    return path
