"""Generational multi-objective sampler: non-dominated sorting, crowding
distance, binary tournaments, simulated binary crossover, and polynomial
mutation. Categorical parameters use uniform crossover and resample mutation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ..errors import ConfigurationError, ValidationError
from ..space import Direction, Distribution, ParamValue
from .base import Sampler, derive_rng
from .random_search import random_sample


@dataclass(frozen=True)
class Nsga2Config:
    population_size: int = 20
    crossover_prob: float = 0.9
    mutation_prob_per_param: float | None = None  # defaults to 1/d at ask time
    distribution_index: float = 20.0  # shared by SBX and polynomial mutation

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2 != 0:
            raise ValidationError("population_size must be a positive even integer")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValidationError("crossover_prob must be in [0, 1]")
        if self.mutation_prob_per_param is not None and not 0.0 <= self.mutation_prob_per_param <= 1.0:
            raise ValidationError("mutation_prob_per_param must be in [0, 1]")
        if self.distribution_index <= 0:
            raise ValidationError("distribution_index must be positive")


def non_dominated_sort(points: Sequence[Sequence[float]], directions: Sequence[Direction]) -> list[list[int]]:
    """Partition points into dominance fronts (front 0 = globally
    non-dominated); indices ascend within each front."""
    n = len(points)
    m = len(directions)
    for p in points:
        if len(p) != m:
            raise ValidationError(f"objective vector of length {len(p)} does not match {m} directions")
    if n == 0:
        return []
    signs = np.array([-1.0 if d is Direction.MAXIMIZE else 1.0 for d in directions])
    pts = np.asarray(points, dtype=float) * signs

    dominated: list[list[int]] = [[] for _ in range(n)]
    n_dominators = [0] * n
    fronts: list[list[int]] = [[]]
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            if _dominates_min(pts[p], pts[q]):
                dominated[p].append(q)
            elif _dominates_min(pts[q], pts[p]):
                n_dominators[p] += 1
        if n_dominators[p] == 0:
            fronts[0].append(p)
    i = 0
    while fronts[i]:
        nxt = []
        for p in fronts[i]:
            for q in dominated[p]:
                n_dominators[q] -= 1
                if n_dominators[q] == 0:
                    nxt.append(q)
        fronts.append(sorted(nxt))
        i += 1
    fronts.pop()
    return fronts


def _dominates_min(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a <= b) and np.any(a < b))


def crowding_distance(front_values: Sequence[Sequence[float]]) -> list[float]:
    """Standard crowding distance: boundary points are infinite, interior
    points accumulate normalized neighbor gaps; a zero-range objective
    contributes nothing."""
    n = len(front_values)
    if n == 0:
        raise ValidationError("crowding_distance requires a non-empty front")
    values = np.asarray(front_values, dtype=float)
    distances = np.zeros(n)
    for m in range(values.shape[1]):
        order = np.argsort(values[:, m], kind="stable")
        lo, hi = values[order[0], m], values[order[-1], m]
        distances[order[0]] = math.inf
        distances[order[-1]] = math.inf
        span = hi - lo
        if span <= 0:
            continue
        for k in range(1, n - 1):
            idx = order[k]
            if math.isinf(distances[idx]):
                continue
            distances[idx] += (values[order[k + 1], m] - values[order[k - 1], m]) / span
    return [float(d) for d in distances]


def _sbx_pair(p1: float, p2: float, eta: float, rng: np.random.Generator) -> float:
    u = rng.random()
    if u <= 0.5:
        beta = (2.0 * u) ** (1.0 / (eta + 1.0))
    else:
        beta = (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0))
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    return c1 if rng.random() < 0.5 else c2


def _polynomial_mutation(x: float, low: float, high: float, eta: float, rng: np.random.Generator) -> float:
    span = high - low
    if span <= 0:
        return x
    u = rng.random()
    if u < 0.5:
        delta = (x - low) / span
        dq = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - delta) ** (eta + 1.0)) ** (1.0 / (eta + 1.0)) - 1.0
    else:
        delta = (high - x) / span
        dq = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - delta) ** (eta + 1.0)) ** (1.0 / (eta + 1.0))
    return x + dq * span


def _clip_numeric(value: float, dist: Distribution) -> ParamValue:
    if dist.kind == "int":
        return int(min(max(round(value), dist.low), dist.high))
    return float(min(max(value, dist.low), dist.high))


class Nsga2Sampler(Sampler):
    ref = "samplers/nsga2"

    def __init__(self, config: Nsga2Config | None = None):
        self.config = config or Nsga2Config()
        self.options = asdict(self.config)

    def ask(self, space, directions, trial_id, history, seed):
        if len(directions) < 2:
            raise ConfigurationError("nsga2 is multi-objective; use tpe or nelder_mead for one objective")
        cfg = self.config
        rng = derive_rng(seed, trial_id)
        pop = cfg.population_size
        if trial_id < pop:
            return random_sample(space, rng)

        generation = trial_id // pop
        pool = [t for t in history if (generation - 1) * pop <= t.id < generation * pop]
        if not pool:
            pool = list(history[-pop:])
        if not pool:
            return random_sample(space, rng)

        values = [t.values for t in pool]
        fronts = non_dominated_sort(values, directions)
        rank = [0] * len(pool)
        crowd = [0.0] * len(pool)
        for level, front in enumerate(fronts):
            dists = crowding_distance([values[i] for i in front])
            for i, d in zip(front, dists):
                rank[i] = level
                crowd[i] = d

        def tournament() -> dict[str, ParamValue]:
            i = int(rng.integers(len(pool)))
            j = int(rng.integers(len(pool)))
            if (rank[i], -crowd[i]) <= (rank[j], -crowd[j]):
                return pool[i].params
            return pool[j].params

        parent1, parent2 = tournament(), tournament()
        mut_prob = cfg.mutation_prob_per_param if cfg.mutation_prob_per_param is not None else 1.0 / len(space)

        child: dict[str, ParamValue] = {}
        for name, dist in space:
            a, b = parent1[name], parent2[name]
            if dist.kind == "categorical":
                value = a if rng.random() < 0.5 else b
                if rng.random() < mut_prob:
                    value = dist.choices[int(rng.integers(len(dist.choices)))]
                child[name] = value
                continue
            if rng.random() < cfg.crossover_prob:
                raw = _sbx_pair(float(a), float(b), cfg.distribution_index, rng)
            else:
                raw = float(a)
            if rng.random() < mut_prob:
                raw = _polynomial_mutation(
                    float(_clip_numeric(raw, dist)), float(dist.low), float(dist.high),
                    cfg.distribution_index, rng,
                )
            child[name] = _clip_numeric(raw, dist)
        return child
