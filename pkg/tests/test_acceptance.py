"""Acceptance gate: one PASS/FAIL line per criterion, printed in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import csv
import itertools
import math
import time
import warnings
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from statistics import median

import numpy as np
import pytest

from oracles import (
    csm_direct,
    edr_recursive,
    lcss_bruteforce,
    pair_counts_bruteforce,
    path_weight_matrix,
    purity_direct,
)
from slopedtw.cli import main
from slopedtw.distances import BsdPoint, DistanceMatrix, DistanceSpec, bsd_point, dtw, edr, lcss_distance
from slopedtw.experiment import RunConfig, run_experiment
from slopedtw.pso import PsoConfig, fitness, run
from slopedtw.series import build_dataset
from slopedtw.synthetic import SHAPE_FAMILIES, make_families, shape_families, slope_families, write_ucr
from slopedtw.validity import (
    UndefinedMeasureError,
    csm,
    folkes_mallow,
    jaccard,
    pair_counts,
    purity,
    rand_index,
)


def test_c1_bsd_is_a_metric(report):
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    n = 10_000
    pts = rng.uniform(-1, 1, (n, 3, 3))
    failures = []
    for t in range(n):
        x, y, z = (BsdPoint(*p) for p in pts[t])
        dxy, dyx = bsd_point(x, y), bsd_point(y, x)
        dxz, dzy = bsd_point(x, z), bsd_point(z, y)
        if min(dxy, dxz, dzy) < 0:
            failures.append(("P1", t))
        if bsd_point(x, x) != 0 or dxy == 0:
            failures.append(("P2", t))
        if dxy != dyx:
            failures.append(("P3", t))
        if dxy > dxz + dzy + 1e-9:
            failures.append(("P4", t))
    # P2 in the other direction: distinct components within 1e-12 give a tiny, nonzero distance
    for t in range(1000):
        x = BsdPoint(*pts[t, 0])
        near = BsdPoint(x.value, x.left_sin, x.right_sin + 1e-12)
        if not 0 < bsd_point(x, near) <= 2e-12:
            failures.append(("P2-near", t))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 5
    report("C1 BSD metric P1-P4 over 10,000 triples", ok, f"{len(failures)} violations, {elapsed:.2f}s (limit 5s)")
    assert ok, failures[:5]


def _all_sequences(alphabet, max_len):
    for length in range(1, max_len + 1):
        yield from itertools.product(alphabet, repeat=length)


def test_c2_dtw_equals_exhaustive_path_minimum(report):
    start = time.perf_counter()
    by_len: dict[int, list] = {}
    for s in _all_sequences((-1.0, 0.0, 1.0), 5):
        by_len.setdefault(len(s), []).append(np.array(s))
    pairs = mismatches = 0
    for n, left in by_len.items():
        A = np.stack(left)
        for m, right in by_len.items():
            B = np.stack(right)
            # every (a, b) pair's local matrix, flattened, against every path's weights
            local = np.abs(A[:, None, :, None] - B[None, :, None, :]).reshape(len(A) * len(B), n * m)
            brute = (local @ path_weight_matrix(n, m).T).min(axis=1)
            for idx, (a, b) in enumerate(itertools.product(left, right)):
                pairs += 1
                if dtw(a, b).cost != brute[idx]:
                    mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and pairs == 363**2 and elapsed < 30
    report("C2 DTW vs exhaustive warping paths", ok, f"{pairs} pairs, {mismatches} mismatches, {elapsed:.1f}s (limit 30s)")
    assert ok


def test_c3_edr_lcss_equal_exhaustive_recursion(report):
    edr_oracle = lru_cache(maxsize=None)(edr_recursive)
    lcss_oracle = lru_cache(maxsize=None)(lcss_bruteforce)
    seqs = list(_all_sequences((-1.0, 0.0, 1.0), 4))
    checked = mismatches = 0
    # eps 0.5 matches equal symbols only; eps 1.0 also matches neighbours
    for eps in (0.5, 1.0):
        for a, b in itertools.product(seqs, repeat=2):
            checked += 1
            if edr(a, b, eps) != edr_oracle(a, b, eps):
                mismatches += 1
            for delta in (None, 1):
                expected = 1 - lcss_oracle(a, b, eps, delta) / min(len(a), len(b))
                if lcss_distance(a, b, eps, delta) != expected:
                    mismatches += 1
    ok = mismatches == 0
    report("C3 EDR/LCSS vs exhaustive recursion", ok, f"{checked // 2} pairs x 2 eps, {mismatches} mismatches")
    assert ok


def _fm_exact(a, b, c):
    return math.sqrt(Fraction(a, a + b) * Fraction(a, a + c))


def test_c4_validity_indices_match_oracles(report):
    rng = np.random.default_rng(4)
    problems = []
    for trial in range(1000):
        T = int(rng.integers(2, 51))
        truth = rng.integers(1, int(rng.integers(1, 6)) + 1, T).tolist()
        pred = rng.integers(1, int(rng.integers(1, 6)) + 1, T).tolist()
        a, b, c, d = pair_counts_bruteforce(truth, pred)
        pc = pair_counts(truth, pred)
        if (pc.a, pc.b, pc.c, pc.d) != (a, b, c, d):
            problems.append(("counts", trial))
        if rand_index(pc) != float(Fraction(a + d, a + b + c + d)):
            problems.append(("rand", trial))
        if jaccard(pc) != (float(Fraction(a, a + b + c)) if a + b + c else 1.0):
            problems.append(("jaccard", trial))
        if a + b and a + c:
            expected = _fm_exact(a, b, c)
            if abs(folkes_mallow(pc) - expected) > math.ulp(expected):
                problems.append(("fm", trial))
        else:
            with pytest.raises(UndefinedMeasureError):
                folkes_mallow(pc)
        if abs(purity(truth, pred) - purity_direct(truth, pred)) > 1e-12:
            problems.append(("purity", trial))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if abs(csm(truth, pred) - csm_direct(truth, pred)) > 1e-12:
                problems.append(("csm", trial))
    ok = not problems
    report("C4 validity indices vs brute-force oracles", ok, f"1000 labelings, {len(problems)} mismatches")
    assert ok, problems[:5]


def test_c5_pso_traces_monotone_and_parallel_identical(report):
    cases = 0
    bad_trace = []
    diverged = []
    for ds_seed, kind in itertools.product(range(3), ("dtw_bsd", "dtw_ed", "edr", "lcss")):
        data = build_dataset(shape_families(n_per_class=5, length=60, seed=ds_seed), budget=12)
        dm = DistanceMatrix(data, DistanceSpec(kind))
        cfg = PsoConfig(k=3, swarm_size=12, max_iters=60, seed=ds_seed * 10 + 1)
        serial = run(data, dm, cfg, workers=1)
        parallel = run(data, DistanceMatrix(data, DistanceSpec(kind)), cfg, workers=4)
        cases += 1
        fits = [f for _, f in serial.trace]
        if any(b > a for a, b in zip(fits, fits[1:])):
            bad_trace.append((ds_seed, kind))
        if serial.trace != parallel.trace or serial.partition != parallel.partition:
            diverged.append((ds_seed, kind))
    ok = not bad_trace and not diverged
    report(
        "C5 PSO trace non-increasing, parallel bit-identical",
        ok,
        f"{cases} runs, {len(bad_trace)} increasing traces, {len(diverged)} serial/parallel mismatches",
    )
    assert ok


def test_c6_tiny_instances_reach_exhaustive_optimum(report):
    two = {k: SHAPE_FAMILIES[k] for k in ("sine", "ramp")}
    hits = 0
    for inst in range(20):
        raw = make_families(two, n_per_class=4, length=50, seed=1000 + inst)
        data = build_dataset(raw, budget=10)
        assert len(data) == 8 and max(len(s) for s in data.series) <= 10
        dm = DistanceMatrix(data, DistanceSpec("dtw_bsd"))
        best = min(fitness(data, pair, dm) for pair in combinations(range(8), 2))
        res = run(data, dm, PsoConfig(k=2, swarm_size=30, max_iters=500, seed=inst))
        hits += res.best_fitness == best
    ok = hits >= 18
    report("C6 tiny-instance optimality (T=8, K=2)", ok, f"{hits}/20 optimal (need >= 18)")
    assert ok


def _median_purity(raw, kind, reps=10):
    cfg = RunConfig(distances=(kind,), reps=reps, seed_base=0, segment_budget=20, pso=PsoConfig(k=3))
    return median(r.purity for r in run_experiment(cfg, raw=raw, name="synthetic"))


def test_c7_shape_families_cluster_cleanly(report):
    start = time.perf_counter()
    raw = shape_families(n_per_class=20, length=100, seed=0)
    med = _median_purity(raw, "dtw_bsd")
    elapsed = time.perf_counter() - start
    ok = med >= 0.9 and elapsed < 300
    report("C7 shape families, DTW+BSD median purity", ok, f"median {med:.3f} (need >= 0.9), {elapsed:.1f}s (limit 300s)")
    assert ok


def test_c8_bsd_not_worse_than_ed_on_slope_families(report):
    raw = slope_families(n_per_class=20, length=100, seed=0)
    bsd = _median_purity(raw, "dtw_bsd")
    ed = _median_purity(raw, "dtw_ed")
    ok = bsd >= ed
    report("C8 slope families, DTW+BSD vs DTW+ED median purity", ok, f"BSD {bsd:.3f} vs ED {ed:.3f}")
    assert ok


def _results_without_runtime(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    col = rows[0].index("runtime_seconds")
    return [r[:col] + r[col + 1:] for r in rows]


def test_c9_cli_end_to_end(tmp_path, report, capsys):
    data = write_ucr(shape_families(n_per_class=20, length=100, seed=0), tmp_path / "synthetic.csv")
    iters = 500
    outs = []
    codes = []
    for name in ("first", "second"):
        out = tmp_path / name
        codes.append(main([
            "cluster", "--data", str(data), "--distance", "dtw-bsd,dtw-ed", "--reps", "3",
            "--seed", "0", "--iters", str(iters), "--swarm", "30", "--segment-budget", "20", "--out", str(out),
        ]))
        outs.append(out)
    capsys.readouterr()
    first = outs[0]
    traces = sorted(first.glob("trace_synthetic_*.csv"))
    row_counts = set()
    for t in traces:
        with open(t, newline="") as fh:
            row_counts.add(sum(1 for _ in fh) - 1)
    with open(first / "results.csv", newline="") as fh:
        n_results = sum(1 for _ in csv.DictReader(fh))
    checks = {
        "exit codes": codes == [0, 0],
        "results.csv": (first / "results.csv").is_file() and n_results == 6,
        "summary.csv": (first / "summary.csv").is_file(),
        "6 traces": len(traces) == 6,
        "trace rows": row_counts == {iters + 1},
        "deterministic": _results_without_runtime(first / "results.csv") == _results_without_runtime(outs[1] / "results.csv"),
        "traces identical": all(t.read_bytes() == (outs[1] / t.name).read_bytes() for t in traces),
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    report("C9 CLI end to end (2 distances x 3 reps)", ok, "all contracts hold" if ok else f"failed: {failed}")
    assert ok
