"""Compiled dynamic-programming loops shared by the elastic distances."""

import numpy as np
from numba import njit

DIAG = 0
UP = 1  # from (i - 1, j)
LEFT = 2  # from (i, j - 1)
START = 3


@njit(cache=True, nogil=True)
def dtw_accumulate(local):
    n, m = local.shape
    cost = np.empty((n, m))
    step = np.empty((n, m), dtype=np.int8)
    cost[0, 0] = 2.0 * local[0, 0]
    step[0, 0] = START
    for i in range(1, n):
        cost[i, 0] = cost[i - 1, 0] + local[i, 0]
        step[i, 0] = UP
    for j in range(1, m):
        cost[0, j] = cost[0, j - 1] + local[0, j]
        step[0, j] = LEFT
    for i in range(1, n):
        for j in range(1, m):
            d = local[i, j]
            # preference on ties: diagonal, then vertical, then horizontal
            best = cost[i - 1, j - 1] + 2.0 * d
            move = DIAG
            up = cost[i - 1, j] + d
            if up < best:
                best = up
                move = UP
            left = cost[i, j - 1] + d
            if left < best:
                best = left
                move = LEFT
            cost[i, j] = best
            step[i, j] = move
    return cost, step


@njit(cache=True, nogil=True)
def edr_table(a, b, eps):
    n, m = a.shape[0], b.shape[0]
    prev = np.arange(m + 1).astype(np.int64)
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cur[0] = i
        for j in range(1, m + 1):
            sub = 0 if abs(a[i - 1] - b[j - 1]) <= eps else 1
            best = prev[j - 1] + sub
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            cur[j] = best
        prev, cur = cur, prev
    return prev[m]


@njit(cache=True, nogil=True)
def lcss_length(a, b, eps, delta):
    # delta < 0 means no window
    n, m = a.shape[0], b.shape[0]
    prev = np.zeros(m + 1, dtype=np.int64)
    cur = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cur[0] = 0
        for j in range(1, m + 1):
            if abs(a[i - 1] - b[j - 1]) <= eps and (delta < 0 or abs(i - j) <= delta):
                cur[j] = prev[j - 1] + 1
            elif prev[j] >= cur[j - 1]:
                cur[j] = prev[j]
            else:
                cur[j] = cur[j - 1]
        prev, cur = cur, prev
    return prev[m]
