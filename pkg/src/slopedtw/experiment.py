"""Repeated PSO clustering runs per distance measure, with summaries and CSV output."""

from __future__ import annotations

import csv
import json
import logging
import math
import statistics
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

from .distances import DistanceMatrix, DistanceSpec
from .pso import PsoConfig, run
from .series import Dataset, RawSeries, build_dataset, load_ucr
from .validity import (
    Partition,
    UndefinedMeasureError,
    combined,
    csm,
    folkes_mallow,
    jaccard,
    pair_counts,
    purity,
    rand_index,
    sse,
)

log = logging.getLogger(__name__)

METRICS = ("purity", "csm", "jaccard", "rand", "fm", "sse", "combined", "runtime_seconds")
LOWER_IS_BETTER = {"sse", "combined", "runtime_seconds"}
RESULT_COLUMNS = (
    "dataset",
    "distance",
    "rep",
    "seed",
    *METRICS,
    "edr_epsilon",
    "lcss_epsilon",
    "lcss_delta",
    "error",
)


@dataclass(frozen=True)
class RunConfig:
    data_path: Optional[Path] = None
    k: Optional[int] = None
    distances: tuple[str, ...] = ("dtw_bsd", "dtw_ed", "edr", "lcss")
    reps: int = 10
    seed_base: int = 0
    segment_budget: Union[int, float, None] = None
    pso: PsoConfig = field(default_factory=PsoConfig)
    out_dir: Optional[Path] = None
    minkowski_b: float = 2.0
    edr_epsilon: float = 0.2
    lcss_epsilon: float = 0.2
    lcss_delta: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not self.distances:
            raise ValueError("at least one distance is required")
        object.__setattr__(
            self, "distances", tuple(DistanceSpec(d).kind for d in self.distances)
        )

    def spec(self, kind: str) -> DistanceSpec:
        return DistanceSpec(
            kind,
            minkowski_b=self.minkowski_b,
            edr_epsilon=self.edr_epsilon,
            lcss_epsilon=self.lcss_epsilon,
            lcss_delta=self.lcss_delta,
        )


@dataclass
class RunResult:
    dataset: str
    distance: str
    rep: int
    seed: int
    purity: float = math.nan
    csm: float = math.nan
    jaccard: float = math.nan
    rand: float = math.nan
    fm: float = math.nan
    sse: float = math.nan
    combined: float = math.nan
    runtime_seconds: float = math.nan
    edr_epsilon: float = 0.2
    lcss_epsilon: float = 0.2
    lcss_delta: Optional[int] = None
    error: str = ""
    partition: Optional[Partition] = field(default=None, repr=False, compare=False)
    trace: list = field(default_factory=list, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass
class SummaryRow:
    dataset: str
    distance: str
    n: int
    mean: dict[str, float]
    std: dict[str, float]
    best: dict[str, bool] = field(default_factory=dict)


def _score(result: RunResult, data: Dataset, partition: Partition, dm: DistanceMatrix, pso: PsoConfig):
    truth = data.labels
    pc = pair_counts(truth, partition)
    result.purity = purity(truth, partition)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        result.csm = csm(truth, partition)
    result.jaccard = jaccard(pc)
    result.rand = rand_index(pc)
    try:
        result.fm = folkes_mallow(pc)
    except UndefinedMeasureError as exc:
        log.warning("%s/%s rep %d: %s", result.dataset, result.distance, result.rep, exc)
    result.sse = sse(data, partition, dm)
    result.combined = combined(data, partition, dm, pso.w1, pso.w2)


def _one_run(data: Dataset, dm: DistanceMatrix, cfg: RunConfig, k: int, kind: str, rep: int) -> RunResult:
    seed = cfg.seed_base + rep
    result = RunResult(
        dataset=data.name,
        distance=kind,
        rep=rep,
        seed=seed,
        edr_epsilon=cfg.edr_epsilon,
        lcss_epsilon=cfg.lcss_epsilon,
        lcss_delta=cfg.lcss_delta,
    )
    pso = replace(cfg.pso, k=k, seed=seed)
    try:
        start = time.perf_counter()
        out = run(data, dm, pso)
        result.runtime_seconds = time.perf_counter() - start
        result.partition = out.partition
        result.trace = out.trace
        _score(result, data, out.partition, dm, pso)
    except Exception as exc:  # recorded in the results, never dropped
        log.exception("run %s/%s rep %d failed", data.name, kind, rep)
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def run_experiment(cfg: RunConfig, raw: Optional[Sequence[RawSeries]] = None, name: Optional[str] = None) -> list[RunResult]:
    """Run ``cfg.reps`` seeded PSO clusterings per distance and score each one.

    ``raw`` overrides ``cfg.data_path``. Results come back ordered by
    (distance, rep) whatever the number of workers.
    """
    if raw is None:
        if cfg.data_path is None:
            raise ValueError("no data: give RunConfig.data_path or raw series")
        raw = load_ucr(cfg.data_path)
        name = name or Path(cfg.data_path).stem
    data = build_dataset(raw, cfg.segment_budget, name=name or "dataset")
    if any(lab is None for lab in data.labels):
        raise ValueError("every series needs a class label to be scored")
    k = cfg.k if cfg.k is not None else len(set(data.labels))
    if k < 2:
        raise ValueError(f"need k >= 2 clusters, got {k}")
    if k > len(data):
        raise ValueError(f"k={k} exceeds the number of series ({len(data)})")

    jobs = []
    for kind in cfg.distances:
        dm = DistanceMatrix(data, cfg.spec(kind))
        jobs.extend((dm, kind, rep) for rep in range(cfg.reps))

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_one_run, data, dm, cfg, k, kind, rep) for dm, kind, rep in jobs]
            results = [f.result() for f in futures]
    else:
        results = [_one_run(data, dm, cfg, k, kind, rep) for dm, kind, rep in jobs]
    for r in results:
        if r.ok:
            log.info("%s %s rep %d: purity=%.4f combined=%.6g (%.2fs)", r.dataset, r.distance, r.rep, r.purity, r.combined, r.runtime_seconds)
    return results


def summarize(results: Sequence[RunResult]) -> list[SummaryRow]:
    """Mean and sample standard deviation per (dataset, distance); flags the best value per metric."""
    if not results:
        raise ValueError("nothing to summarize")
    groups: dict[tuple[str, str], list[RunResult]] = {}
    for r in results:
        if r.ok:
            groups.setdefault((r.dataset, r.distance), []).append(r)
    rows = []
    for (dataset, distance), runs in groups.items():
        mean, std = {}, {}
        for m in METRICS:
            vals = [getattr(r, m) for r in runs]
            mean[m] = statistics.fmean(vals)
            if len(vals) > 1:
                std[m] = statistics.stdev(vals)
            else:
                std[m] = 0.0
        if len(runs) == 1:
            warnings.warn(f"{dataset}/{distance}: single repetition, std reported as 0", RuntimeWarning)
        rows.append(SummaryRow(dataset, distance, len(runs), mean, std))

    for dataset in {row.dataset for row in rows}:
        same = [row for row in rows if row.dataset == dataset]
        for m in METRICS:
            vals = [row.mean[m] for row in same if not math.isnan(row.mean[m])]
            if not vals:
                continue
            target = min(vals) if m in LOWER_IS_BETTER else max(vals)
            for row in same:
                row.best[m] = row.mean[m] == target
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _open_for_write(path: Path):
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_outputs(
    results: Sequence[RunResult],
    summaries: Sequence[SummaryRow],
    out_dir,
    traces: Optional[dict] = None,
    config: Optional[RunConfig] = None,
) -> list[Path]:
    """Write results.csv, summary.csv, sse_bars.csv and one trace CSV per run.

    ``traces`` maps ``(dataset, distance, rep)`` to a trace; by default each
    result's own trace is used.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    written = []

    path = out / "results.csv"
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in results:
            w.writerow([_fmt(getattr(r, c)) for c in RESULT_COLUMNS])
    written.append(path)

    path = out / "summary.csv"
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["dataset", "distance", "n"]
        for m in METRICS:
            header += [f"{m}_mean", f"{m}_std", f"{m}_best"]
        w.writerow(header)
        for row in summaries:
            line = [row.dataset, row.distance, row.n]
            for m in METRICS:
                line += [_fmt(row.mean[m]), _fmt(row.std[m]), int(row.best.get(m, False))]
            w.writerow(line)
    written.append(path)

    path = out / "sse_bars.csv"
    with _open_for_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "distance", "mean_sse"])
        for row in summaries:
            w.writerow([row.dataset, row.distance, _fmt(row.mean["sse"])])
    written.append(path)

    for r in results:
        trace = (traces or {}).get((r.dataset, r.distance, r.rep), r.trace)
        if not trace:
            continue
        path = out / f"trace_{r.dataset}_{r.distance}_{r.rep}.csv"
        with _open_for_write(path) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "global_best_fitness"])
            for it, f in trace:
                w.writerow([it, _fmt(float(f))])
        written.append(path)

    if config is not None:
        path = out / "config.json"
        with _open_for_write(path) as fh:
            json.dump(_config_dict(config), fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written


def _config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["data_path"] = None if cfg.data_path is None else str(cfg.data_path)
    d["out_dir"] = None if cfg.out_dir is None else str(cfg.out_dir)
    d["distances"] = list(cfg.distances)
    return d


def load_results(path) -> list[RunResult]:
    """Read a results.csv written by ``emit_outputs``."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            kwargs = {
                "dataset": row["dataset"],
                "distance": row["distance"],
                "rep": int(row["rep"]),
                "seed": int(row["seed"]),
                "edr_epsilon": float(row["edr_epsilon"]),
                "lcss_epsilon": float(row["lcss_epsilon"]),
                "lcss_delta": int(row["lcss_delta"]) if row["lcss_delta"] else None,
                "error": row["error"],
            }
            for m in METRICS:
                kwargs[m] = float(row[m])
            out.append(RunResult(**kwargs))
    return out
