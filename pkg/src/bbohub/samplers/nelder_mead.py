"""Downhill simplex search over all-float spaces, recast as ask/tell.

The classic method is sequential: propose a point, wait for its value, update
the simplex. Here the decision process is replayed over the completed-trial
history on every ask, which makes the sampler a pure function of
(seed, history) — resumable from a journal and safe to rebuild at any time.

Coefficients are fixed: reflection 1.0, expansion 2.0, contraction 0.5,
shrink 0.5. Every proposal is clipped to the declared bounds.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import ConfigurationError, UnsupportedSpaceError
from ..space import Direction, SearchSpace
from .base import Sampler, derive_rng

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5

#: initial-simplex vertex offset, as a fraction of each coordinate's range
INIT_STEP_FRACTION = 0.05


class SimplexSearch:
    """The simplex state machine: holds d+1 evaluated vertices, exposes the
    next probe point, and consumes one evaluation result at a time.

    Values are minimized; callers handle direction by sign-flipping.
    """

    def __init__(
        self,
        lows: Sequence[float],
        highs: Sequence[float],
        points: Sequence[Sequence[float]],
        values: Sequence[float],
    ):
        self._lo = np.asarray(lows, dtype=float)
        self._hi = np.asarray(highs, dtype=float)
        if len(points) != len(self._lo) + 1 or len(points) != len(values):
            raise ValueError("simplex requires exactly d+1 evaluated points")
        self.simplex: list[tuple[np.ndarray, float]] = [
            (self._clip(np.asarray(p, dtype=float)), float(v)) for p, v in zip(points, values)
        ]
        self._phase = "reflect"
        self._pending: np.ndarray | None = None
        self._centroid: np.ndarray | None = None
        self._reflected: tuple[np.ndarray, float] | None = None
        self._shrink_queue: list[int] = []
        self._begin_iteration()

    @property
    def phase(self) -> str:
        return "contract" if self._phase in ("contract_out", "contract_in") else self._phase

    @property
    def pending(self) -> np.ndarray:
        assert self._pending is not None
        return self._pending.copy()

    def _clip(self, point: np.ndarray) -> np.ndarray:
        return np.clip(point, self._lo, self._hi)

    def _begin_iteration(self) -> None:
        self.simplex.sort(key=lambda pv: pv[1])
        worst = self.simplex[-1][0]
        self._centroid = np.mean([p for p, _ in self.simplex[:-1]], axis=0)
        self._phase = "reflect"
        self._pending = self._clip(self._centroid + REFLECT * (self._centroid - worst))

    def feed(self, point: Sequence[float], value: float) -> None:
        """Consume the evaluation result for the current pending probe."""
        point = self._clip(np.asarray(point, dtype=float))
        value = float(value)
        if self._phase == "reflect":
            self._feed_reflect(point, value)
        elif self._phase == "expand":
            xr, fr = self._reflected
            self._replace_worst((point, value) if value < fr else (xr, fr))
            self._begin_iteration()
        elif self._phase == "contract_out":
            _, fr = self._reflected
            if value <= fr:
                self._replace_worst((point, value))
                self._begin_iteration()
            else:
                self._begin_shrink()
        elif self._phase == "contract_in":
            if value < self.simplex[-1][1]:
                self._replace_worst((point, value))
                self._begin_iteration()
            else:
                self._begin_shrink()
        else:  # shrink
            idx = self._shrink_queue.pop(0)
            self.simplex[idx] = (point, value)
            if self._shrink_queue:
                self._pending = self._shrink_point(self._shrink_queue[0])
            else:
                self._begin_iteration()

    def _feed_reflect(self, point: np.ndarray, value: float) -> None:
        best_val = self.simplex[0][1]
        second_worst_val = self.simplex[-2][1]
        worst_point, worst_val = self.simplex[-1]
        if value < best_val:
            self._reflected = (point, value)
            self._phase = "expand"
            self._pending = self._clip(self._centroid + EXPAND * (point - self._centroid))
        elif value < second_worst_val:
            self._replace_worst((point, value))
            self._begin_iteration()
        elif value < worst_val:
            self._reflected = (point, value)
            self._phase = "contract_out"
            self._pending = self._clip(self._centroid + CONTRACT * (point - self._centroid))
        else:
            self._phase = "contract_in"
            self._pending = self._clip(self._centroid + CONTRACT * (worst_point - self._centroid))

    def _replace_worst(self, entry: tuple[np.ndarray, float]) -> None:
        self.simplex[-1] = entry

    def _begin_shrink(self) -> None:
        self.simplex.sort(key=lambda pv: pv[1])
        self._phase = "shrink"
        self._shrink_queue = list(range(1, len(self.simplex)))
        self._pending = self._shrink_point(self._shrink_queue[0])

    def _shrink_point(self, idx: int) -> np.ndarray:
        best = self.simplex[0][0]
        return self._clip(best + SHRINK * (self.simplex[idx][0] - best))


def initial_vertices(space: SearchSpace, seed: int) -> list[np.ndarray]:
    """Seeded start point plus one axis-offset vertex per dimension.

    The offset is 5% of the coordinate's range, flipped downward when the
    upward step would leave the box (keeps the simplex non-degenerate).
    """
    lows = np.array([d.low for _, d in space], dtype=float)
    highs = np.array([d.high for _, d in space], dtype=float)
    rng = derive_rng(seed)
    origin = rng.uniform(lows, highs)
    vertices = [origin]
    for i in range(len(lows)):
        step = INIT_STEP_FRACTION * (highs[i] - lows[i])
        vertex = origin.copy()
        vertex[i] = vertex[i] + step if vertex[i] + step <= highs[i] else vertex[i] - step
        vertices.append(np.clip(vertex, lows, highs))
    return vertices


class NelderMeadSampler(Sampler):
    """Simplex sampler for single-objective, all-float spaces."""

    ref = "samplers/nelder_mead"

    def ask(self, space, directions, trial_id, history, seed):
        if any(dist.kind != "float" for _, dist in space):
            raise UnsupportedSpaceError(
                "nelder_mead supports all-float spaces only; route mixed spaces to tpe"
            )
        if len(directions) != 1:
            raise ConfigurationError("nelder_mead is single-objective; use nsga2 for multi-objective studies")
        sign = -1.0 if directions[0] is Direction.MAXIMIZE else 1.0
        names = space.names
        d = len(names)

        vertices = initial_vertices(space, seed)
        if len(history) < d + 1:
            return self._to_params(names, vertices[len(history)])

        points = [[t.params[n] for n in names] for t in history]
        values = [sign * t.values[0] for t in history]
        search = SimplexSearch(
            lows=[space[n].low for n in names],
            highs=[space[n].high for n in names],
            points=points[: d + 1],
            values=values[: d + 1],
        )
        for point, value in zip(points[d + 1 :], values[d + 1 :]):
            search.feed(point, value)
        return self._to_params(names, search.pending)

    @staticmethod
    def _to_params(names, vector):
        return {name: float(x) for name, x in zip(names, vector)}
