"""PSO search over medoid sets, scored by the weighted compactness/separation index.

Each particle holds K continuous coordinates in dataset-index space. A
coordinate is decoded to a medoid by rounding, clamping and de-duplicating,
so the velocity/position updates stay the plain real-vector ones while every
particle always denotes K valid, distinct medoids.
"""

from __future__ import annotations

import math
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .distances import DistanceMatrix, pairwise
from .validity import Partition, _check_weights, _compactness_from, _separation_from


@dataclass(frozen=True)
class PsoConfig:
    k: int = 2
    swarm_size: int = 30
    max_iters: int = 500
    inertia_start: float = 1.2
    inertia_end: float = 0.4
    c1: float = 1.5
    c2: float = 1.5
    w1: float = 0.5
    w2: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.inertia_end > self.inertia_start:
            raise ValueError("inertia_end must not exceed inertia_start")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        _check_weights(self.w1, self.w2)

    def inertia(self, iteration: int) -> float:
        """Linearly decaying inertia weight for the update made at ``iteration``."""
        span = self.inertia_start - self.inertia_end
        return self.inertia_start - span * iteration / self.max_iters


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    personal_best_position: np.ndarray
    personal_best_fitness: float
    fitness: float = math.inf


@dataclass
class SwarmState:
    particles: list[Particle]
    global_best_position: np.ndarray
    global_best_fitness: float
    iteration: int = 0
    rngs: list[np.random.Generator] = field(default_factory=list, repr=False)


@dataclass
class PsoResult:
    partition: Partition
    trace: list[tuple[int, float]]
    best_fitness: float
    best_medoids: tuple[int, ...]


def decode_position(position: Sequence[float], T: int) -> list[int]:
    """Map K real coordinates to K distinct dataset ordinals.

    Each coordinate is rounded half-up and clamped to ``[0, T-1]``; a slot
    whose ordinal is already taken moves to the nearest free one, scanning
    +1, -1, +2, -2, ...
    """
    K = len(position)
    if T < K:
        raise ValueError(f"cannot pick {K} distinct medoids from {T} series")
    used: set[int] = set()
    out = []
    for x in position:
        x = min(max(float(x), 0.0), T - 1.0) if not math.isnan(x) else 0.0
        idx = min(int(math.floor(x + 0.5)), T - 1)
        if idx in used:
            for offset in range(1, T):
                if idx + offset < T and idx + offset not in used:
                    idx += offset
                    break
                if idx - offset >= 0 and idx - offset not in used:
                    idx -= offset
                    break
        used.add(idx)
        out.append(idx)
    return out


def _assignment_from(cols: np.ndarray, medoids: Sequence[int]) -> np.ndarray:
    """1-based nearest-medoid assignment; ties go to the lowest cluster index.

    Medoids are pinned to their own clusters (this matters when two medoids
    coincide in distance), which also means no cluster can come out empty.
    """
    assignment = np.argmin(cols, axis=1) + 1
    for c, m in enumerate(medoids, start=1):
        assignment[m] = c
    return assignment


def assign(data, medoids: Sequence[int], dist) -> Partition:
    """Assign every series to its nearest medoid."""
    medoids = [int(m) for m in medoids]
    if len(set(medoids)) != len(medoids):
        raise ValueError("medoids must be distinct")
    dm = pairwise(data, dist)
    cols = dm.columns(medoids)
    return Partition(tuple(_assignment_from(cols, medoids).tolist()), tuple(medoids), len(medoids))


def _fitness_from(cols: np.ndarray, medoids: Sequence[int], w1: float, w2: float) -> float:
    assignment = _assignment_from(cols, medoids)
    comp = _compactness_from(cols, assignment, len(medoids))
    sep = _separation_from(cols[list(medoids), :])
    return w1 * comp - w2 * sep


def fitness(data, medoids: Sequence[int], dist, w1: float = 0.5, w2: float = 0.5) -> float:
    """Assign to ``medoids`` and score with the combined index (lower is better)."""
    _check_weights(w1, w2)
    medoids = [int(m) for m in medoids]
    return _fitness_from(pairwise(data, dist).columns(medoids), medoids, w1, w2)


def medoid(data, members: Sequence[int], dist) -> int:
    """Member with the smallest sum of squared distances to the other members."""
    if len(members) == 0:
        raise ValueError("cannot take the medoid of an empty cluster")
    members = sorted(int(m) for m in members)
    block = pairwise(data, dist).columns(members)[members, :]
    scores = (block * block).sum(axis=0)
    return members[int(np.argmin(scores))]


class _Objective:
    """Fitness of decoded medoid tuples, memoized across the whole run."""

    def __init__(self, dm: DistanceMatrix, cfg: PsoConfig):
        self.dm = dm
        self.T = len(dm)
        self.cfg = cfg
        self._memo: dict[tuple[int, ...], float] = {}

    def __call__(self, position: np.ndarray) -> float:
        key = tuple(decode_position(position, self.T))
        f = self._memo.get(key)
        if f is None:
            f = _fitness_from(self.dm.columns(key), key, self.cfg.w1, self.cfg.w2)
            self._memo[key] = f
        return f


def _evaluate(objective: _Objective, positions: list[np.ndarray], executor: Optional[Executor]):
    if executor is None:
        return [objective(x) for x in positions]
    return list(executor.map(objective, positions))


def init_swarm(data, dist, cfg: PsoConfig, executor: Optional[Executor] = None, objective=None) -> SwarmState:
    """Random initial swarm; one independent generator stream per particle."""
    dm = pairwise(data, dist)
    T = len(dm)
    if T < cfg.k:
        raise ValueError(f"cannot form {cfg.k} clusters from {T} series")
    objective = objective or _Objective(dm, cfg)
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(cfg.swarm_size)]
    vmax0 = (T - 1) / 10
    positions, velocities = [], []
    for rng in rngs:
        positions.append(rng.uniform(0.0, T - 1, cfg.k))
        velocities.append(rng.uniform(-vmax0, vmax0, cfg.k))
    scores = _evaluate(objective, positions, executor)
    particles = [
        Particle(x, v, x.copy(), f, f) for x, v, f in zip(positions, velocities, scores)
    ]
    best = 0
    for p in range(1, len(particles)):
        if particles[p].personal_best_fitness < particles[best].personal_best_fitness:
            best = p
    return SwarmState(
        particles=particles,
        global_best_position=particles[best].personal_best_position.copy(),
        global_best_fitness=particles[best].personal_best_fitness,
        iteration=0,
        rngs=rngs,
    )


def step(
    state: SwarmState,
    data,
    dist,
    cfg: PsoConfig,
    executor: Optional[Executor] = None,
    objective=None,
) -> SwarmState:
    """One synchronous swarm iteration: move every particle, then update bests in particle order."""
    dm = pairwise(data, dist)
    T = len(dm)
    objective = objective or _Objective(dm, cfg)
    w = cfg.inertia(state.iteration)
    vmax = (T - 1) / 2
    gb = state.global_best_position

    moved = []
    for particle, rng in zip(state.particles, state.rngs):
        r1, r2 = rng.random(2)
        x = particle.position
        v = (
            w * particle.velocity
            + cfg.c1 * r1 * (particle.personal_best_position - x)
            + cfg.c2 * r2 * (gb - x)
        )
        v = np.clip(v, -vmax, vmax)
        moved.append((np.clip(x + v, 0.0, T - 1), v))

    scores = _evaluate(objective, [x for x, _ in moved], executor)

    particles = []
    gb_pos, gb_fit = state.global_best_position, state.global_best_fitness
    for old, (x, v), f in zip(state.particles, moved, scores):
        pb_pos, pb_fit = old.personal_best_position, old.personal_best_fitness
        if f < pb_fit:
            pb_pos, pb_fit = x.copy(), f
            if pb_fit < gb_fit:
                gb_pos, gb_fit = pb_pos.copy(), pb_fit
        particles.append(Particle(x, v, pb_pos, pb_fit, f))
    return replace(
        state,
        particles=particles,
        global_best_position=gb_pos,
        global_best_fitness=gb_fit,
        iteration=state.iteration + 1,
    )


def run(data, dist, cfg: PsoConfig, workers: int = 1) -> PsoResult:
    """Cluster ``data`` into ``cfg.k`` groups.

    The returned partition is the nearest-medoid assignment of the global
    best; its medoids are then replaced by each cluster's true medoid. The
    trace lists the global-best fitness after every iteration, starting at 0.
    """
    dm = pairwise(data, dist)
    T = len(dm)
    if cfg.k < 2:
        raise ValueError("k must be >= 2 (separation is undefined for one cluster)")
    if T < cfg.k:
        raise ValueError(f"cannot form {cfg.k} clusters from {T} series")
    objective = _Objective(dm, cfg)
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        state = init_swarm(dm.data, dm, cfg, executor, objective)
        trace = [(0, state.global_best_fitness)]
        while state.iteration < cfg.max_iters:
            state = step(state, dm.data, dm, cfg, executor, objective)
            trace.append((state.iteration, state.global_best_fitness))
    finally:
        if executor is not None:
            executor.shutdown()

    best = decode_position(state.global_best_position, T)
    found = assign(dm.data, best, dm)
    final = tuple(medoid(dm.data, found.members(c), dm) for c in range(1, cfg.k + 1))
    partition = Partition(found.assignment, final, cfg.k)
    return PsoResult(partition, trace, state.global_best_fitness, tuple(best))
