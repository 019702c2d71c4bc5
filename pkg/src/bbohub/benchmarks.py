"""Builtin benchmark problems.

A small continuous single-objective family (sphere, ellipsoidal, Rastrigin,
Rosenbrock) on [-5, 5]^d with seeded per-instance offsets, plus one
bi-objective fixture. Instance 0 is transformation-free (optimum at the
origin with value 0) so tests can assert analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import ValidationError
from .space import Direction, ParamValue, SearchSpace, float_param

SUPPORTED_FUNCTION_IDS = (1, 2, 3, 8)

_FUNCTION_NAMES = {1: "sphere", 2: "ellipsoidal", 3: "rastrigin", 8: "rosenbrock"}


@dataclass(frozen=True)
class BenchmarkSpec:
    function_id: int
    dimension: int
    instance: int = 0

    def __post_init__(self):
        if self.function_id not in SUPPORTED_FUNCTION_IDS:
            raise ValidationError(
                f"function_id {self.function_id} not implemented; supported: {list(SUPPORTED_FUNCTION_IDS)}"
            )
        if self.dimension < 1:
            raise ValidationError("dimension must be >= 1")
        if self.instance < 0:
            raise ValidationError("instance must be >= 0")


@dataclass
class Problem:
    """An objective with a declared space and per-objective directions.

    ``evaluate`` is a pure, deterministic function of params. The evaluator
    receives the validated params dict; out-of-space params raise before it
    runs (the engine records such trials as failed).
    """

    search_space: SearchSpace
    directions: list[Direction]
    evaluator: Callable[[Mapping[str, ParamValue]], list[float]]
    name: str = "problem"
    optimum_params: dict[str, float] | None = None
    optimum_values: list[float] | None = None
    metadata: dict = field(default_factory=dict)
    closer: Callable[[], None] | None = None

    def evaluate(self, params: Mapping[str, ParamValue]) -> list[float]:
        checked = self.search_space.validate_params(params)
        values = [float(v) for v in self.evaluator(checked)]
        if len(values) != len(self.directions):
            raise ValidationError(
                f"{self.name} returned {len(values)} values for {len(self.directions)} directions"
            )
        if any(not math.isfinite(v) for v in values):
            raise ValidationError(f"{self.name} returned non-finite values: {values}")
        return values

    def close(self) -> None:
        """Release external resources (subprocess-backed problems)."""
        if self.closer is not None:
            self.closer()


def _box_space(dimension: int, low: float = -5.0, high: float = 5.0) -> SearchSpace:
    return SearchSpace({f"x{i}": float_param(low, high) for i in range(dimension)})


def _sphere(z: np.ndarray) -> float:
    return float(np.sum(z * z))


def _ellipsoidal(z: np.ndarray) -> float:
    d = z.size
    if d == 1:
        return float(z[0] * z[0])
    exponents = 6.0 * np.arange(d) / (d - 1)
    return float(np.sum(10.0**exponents * z * z))


def _rastrigin(z: np.ndarray) -> float:
    return float(10.0 * z.size + np.sum(z * z - 10.0 * np.cos(2.0 * math.pi * z)))


def _rosenbrock(z: np.ndarray) -> float:
    if z.size == 1:
        return float((z[0] - 1.0) ** 2)
    return float(np.sum(100.0 * (z[1:] - z[:-1] ** 2) ** 2 + (z[:-1] - 1.0) ** 2))


_EVALUATORS = {1: _sphere, 2: _ellipsoidal, 3: _rastrigin, 8: _rosenbrock}

# optimum of the untransformed function in z-space
_Z_STAR = {1: 0.0, 2: 0.0, 3: 0.0, 8: 1.0}


def _instance_transform(spec: BenchmarkSpec) -> tuple[np.ndarray, float]:
    """Per-instance optimum location x* in [-4, 4]^d and value shift f*.

    Instance 0 is fixed at x* = 0, f* = 0; other instances draw from a
    generator seeded by the spec so every platform sees the same transform.
    """
    d = spec.dimension
    if spec.instance == 0:
        return np.zeros(d), 0.0
    rng = np.random.default_rng(
        np.random.SeedSequence([spec.function_id, spec.instance, spec.dimension])
    )
    x_star = rng.uniform(-4.0, 4.0, size=d)
    f_star = float(rng.uniform(-100.0, 100.0))
    return x_star, f_star


def make_bbob(spec: BenchmarkSpec) -> Problem:
    """Instantiate one of the continuous benchmark functions.

    The optimum x* lies in [-4, 4]^d; evaluate(x) = f(x - x_offset) + f*
    where x_offset places the function's natural optimum at x*.
    """
    x_star, f_star = _instance_transform(spec)
    x_offset = x_star - _Z_STAR[spec.function_id]
    evaluator = _EVALUATORS[spec.function_id]
    names = [f"x{i}" for i in range(spec.dimension)]

    def run(params: Mapping[str, ParamValue]) -> list[float]:
        z = np.array([float(params[n]) for n in names]) - x_offset
        return [evaluator(z) + f_star]

    return Problem(
        search_space=_box_space(spec.dimension),
        directions=[Direction.MINIMIZE],
        evaluator=run,
        name=f"{_FUNCTION_NAMES[spec.function_id]}-{spec.dimension}d-i{spec.instance}",
        optimum_params={f"x{i}": float(x_star[i]) for i in range(spec.dimension)},
        optimum_values=[f_star],
        metadata={"function_id": spec.function_id, "dimension": spec.dimension, "instance": spec.instance},
    )


def make_bi_sphere(dimension: int, offset: float) -> Problem:
    """Two opposed sphere objectives: f1 = |x - a|^2, f2 = |x + a|^2 with
    a = (offset, ..., offset). The Pareto set is the segment [-a, a]."""
    if dimension < 1:
        raise ValidationError("dimension must be >= 1")
    if not 0.0 < offset <= 4.0:
        raise ValidationError(f"offset must be in (0, 4], got {offset}")
    a = np.full(dimension, float(offset))
    names = [f"x{i}" for i in range(dimension)]

    def run(params: Mapping[str, ParamValue]) -> list[float]:
        v = np.array([float(params[n]) for n in names])
        return [float(np.sum((v - a) ** 2)), float(np.sum((v + a) ** 2))]

    return Problem(
        search_space=_box_space(dimension),
        directions=[Direction.MINIMIZE, Direction.MINIMIZE],
        evaluator=run,
        name=f"bi-sphere-{dimension}d",
        metadata={"dimension": dimension, "offset": float(offset)},
    )
