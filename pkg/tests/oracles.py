"""Brute-force reference implementations; deliberately naive and independent of the package."""

from functools import lru_cache
from itertools import combinations

import numpy as np


@lru_cache(maxsize=None)
def warping_paths(n, m):
    """Every monotone path from (0, 0) to (n-1, m-1) with unit/diagonal steps.

    Each path is a tuple of (i, j, weight): weight 2 for the start cell and
    for cells entered diagonally, 1 for horizontal or vertical entries.
    """
    out = []

    def walk(i, j, acc):
        if (i, j) == (n - 1, m - 1):
            out.append(tuple(acc))
            return
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, acc + [(i + 1, j + 1, 2)])
        if i + 1 < n:
            walk(i + 1, j, acc + [(i + 1, j, 1)])
        if j + 1 < m:
            walk(i, j + 1, acc + [(i, j + 1, 1)])

    walk(0, 0, [(0, 0, 2)])
    return tuple(out)


def dtw_bruteforce(s1, s2, local):
    best = None
    for path in warping_paths(len(s1), len(s2)):
        cost = sum(w * local(s1[i], s2[j]) for i, j, w in path)
        if best is None or cost < best:
            best = cost
    return best


@lru_cache(maxsize=None)
def path_weight_matrix(n, m):
    """(num_paths, n*m) weights so that ``W @ local.ravel()`` gives every path cost."""
    paths = warping_paths(n, m)
    W = np.zeros((len(paths), n * m))
    for p, path in enumerate(paths):
        for i, j, w in path:
            W[p, i * m + j] += w
    return W


def edr_recursive(a, b, eps):
    a, b = tuple(a), tuple(b)
    if not a:
        return len(b)
    if not b:
        return len(a)
    sub = 0 if abs(a[0] - b[0]) <= eps else 1
    return min(
        edr_recursive(a[1:], b[1:], eps) + sub,
        edr_recursive(a[1:], b, eps) + 1,
        edr_recursive(a, b[1:], eps) + 1,
    )


def lcss_bruteforce(a, b, eps, delta=None):
    """Longest common subsequence length by enumerating index subsets of both sequences."""
    best = 0
    for size in range(1, min(len(a), len(b)) + 1):
        for ia in combinations(range(len(a)), size):
            for ib in combinations(range(len(b)), size):
                if all(
                    abs(a[i] - b[j]) <= eps and (delta is None or abs(i - j) <= delta)
                    for i, j in zip(ia, ib)
                ):
                    best = size
                    break
            if best == size:
                break
    return best


def pair_counts_bruteforce(truth, pred):
    a = b = c = d = 0
    for i, j in combinations(range(len(truth)), 2):
        same_t = truth[i] == truth[j]
        same_p = pred[i] == pred[j]
        if same_t and same_p:
            a += 1
        elif same_t:
            b += 1
        elif same_p:
            c += 1
        else:
            d += 1
    return a, b, c, d


def purity_direct(truth, pred):
    total = 0
    for cl in set(pred):
        members = [t for t, p in zip(truth, pred) if p == cl]
        total += max(members.count(t) for t in set(members))
    return total / len(truth)


def csm_direct(truth, pred):
    classes = sorted(set(truth))
    clusters = sorted(set(pred))
    sims = []
    for g in classes:
        G = {i for i, t in enumerate(truth) if t == g}
        best = 0.0
        for c in clusters:
            C = {i for i, p in enumerate(pred) if p == c}
            best = max(best, 2 * len(G & C) / (len(G) + len(C)))
        sims.append(best)
    return sum(sims) / len(classes)
