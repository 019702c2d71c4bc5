"""Good/bad kernel-density sampler (TPE-style) for single-objective studies.

History is split into a small "good" head and a "bad" tail by objective rank.
Each parameter gets a pair of one-dimensional density models; candidates are
drawn from the good model and scored by the good/bad likelihood ratio.
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

_SQRT2 = math.sqrt(2.0)
_NORM_CONST = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class TpeConfig:
    gamma_fraction: float = 0.10
    n_candidates: int = 24
    n_startup: int = 10
    bandwidth_floor: float = 1e-3  # fraction of the (possibly log) range

    def __post_init__(self):
        if not 0.0 < self.gamma_fraction < 1.0:
            raise ValidationError("gamma_fraction must be in (0, 1)")
        if self.n_candidates < 1:
            raise ValidationError("n_candidates must be positive")
        if self.n_startup < 1:
            raise ValidationError("n_startup must be positive")
        if self.bandwidth_floor <= 0.0:
            raise ValidationError("bandwidth_floor must be positive")


def tpe_split(history: Sequence, gamma_fraction: float, direction: Direction = Direction.MINIMIZE):
    """Split completed trials into (good, bad): sort best-first under the
    direction, take the first ceil(gamma_fraction * n) as good."""
    if not history:
        raise ValidationError("tpe_split requires at least one complete trial")
    reverse = direction is Direction.MAXIMIZE
    ordered = sorted(history, key=lambda t: t.values[0], reverse=reverse)
    n_good = math.ceil(gamma_fraction * len(ordered))
    return ordered[:n_good], ordered[n_good:]


def _std_normal_cdf(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.array([math.erf(v / _SQRT2) for v in np.atleast_1d(x)]))


class _NumericDensity:
    """Truncated Gaussian mixture over one numeric parameter.

    Kernels sit at the model's own observations; the bandwidth is shared
    per dimension (Scott's rule over all observations, floored at a fraction
    of the range) so sparse good-sets do not collapse to spikes.
    """

    def __init__(self, centers: np.ndarray, low: float, high: float, bandwidth: float):
        self.low = low
        self.high = high
        self.bandwidth = bandwidth
        self.centers = centers
        if centers.size and high > low:
            upper = _std_normal_cdf((high - centers) / bandwidth)
            lower = _std_normal_cdf((low - centers) / bandwidth)
            self._norms = np.maximum(upper - lower, 1e-12)
        else:
            self._norms = np.ones_like(centers)

    @property
    def is_empty(self) -> bool:
        return self.centers.size == 0

    def sample(self, rng: np.random.Generator) -> float:
        if self.is_empty or self.high <= self.low:
            return float(rng.uniform(self.low, self.high)) if self.high > self.low else self.low
        center = float(self.centers[int(rng.integers(self.centers.size))])
        for _ in range(100):
            draw = float(rng.normal(center, self.bandwidth))
            if self.low <= draw <= self.high:
                return draw
        return float(min(max(center, self.low), self.high))

    def log_density(self, x: float) -> float:
        if self.is_empty or self.high <= self.low:
            # uniform fallback over the domain
            width = self.high - self.low
            return -math.log(width) if width > 0 else 0.0
        z = (x - self.centers) / self.bandwidth
        pdf = _NORM_CONST * np.exp(-0.5 * z * z) / (self.bandwidth * self._norms)
        return float(math.log(max(float(np.mean(pdf)), 1e-300)))


class _CategoricalDensity:
    """Laplace-smoothed (+1) choice frequencies."""

    def __init__(self, observed: Sequence[str], choices: Sequence[str]):
        counts = np.array([sum(1 for o in observed if o == c) for c in choices], dtype=float)
        self.weights = (counts + 1.0) / (counts.sum() + len(choices))
        self.choices = list(choices)

    def sample(self, rng: np.random.Generator) -> str:
        return self.choices[int(rng.choice(len(self.choices), p=self.weights))]

    def log_density(self, value: str) -> float:
        return float(math.log(self.weights[self.choices.index(value)]))


def _to_model_domain(value: float, dist: Distribution) -> float:
    return math.log(value) if dist.kind == "float" and dist.log_scale else float(value)


def _from_model_domain(z: float, dist: Distribution) -> ParamValue:
    if dist.kind == "float":
        x = math.exp(z) if dist.log_scale else z
        return float(min(max(x, dist.low), dist.high))
    return int(min(max(round(z), dist.low), dist.high))


def _numeric_bounds(dist: Distribution) -> tuple[float, float]:
    if dist.kind == "float" and dist.log_scale:
        return math.log(dist.low), math.log(dist.high)
    return float(dist.low), float(dist.high)


def _shared_bandwidth(all_obs: np.ndarray, low: float, high: float, floor_frac: float) -> float:
    span = max(high - low, 0.0)
    floor = floor_frac * span if span > 0 else floor_frac
    n = all_obs.size
    if n >= 2:
        scott = float(np.std(all_obs, ddof=1)) * n ** (-0.2)
    else:
        scott = 0.0
    return max(scott, floor, 1e-12)


class TpeSampler(Sampler):
    ref = "samplers/tpe"

    def __init__(self, config: TpeConfig | None = None):
        self.config = config or TpeConfig()
        self.options = asdict(self.config)

    def ask(self, space, directions, trial_id, history, seed):
        if len(directions) != 1:
            raise ConfigurationError("tpe is single-objective; use nsga2 for multi-objective studies")
        rng = derive_rng(seed, trial_id)
        cfg = self.config
        if len(history) < cfg.n_startup:
            return random_sample(space, rng)

        good, bad = tpe_split(history, cfg.gamma_fraction, directions[0])
        models: dict[str, tuple] = {}
        for name, dist in space:
            if dist.kind == "categorical":
                good_model = _CategoricalDensity([t.params[name] for t in good], dist.choices)
                bad_model = _CategoricalDensity([t.params[name] for t in bad], dist.choices)
            else:
                low, high = _numeric_bounds(dist)
                all_obs = np.array([_to_model_domain(t.params[name], dist) for t in history])
                bandwidth = _shared_bandwidth(all_obs, low, high, cfg.bandwidth_floor)
                good_model = _NumericDensity(
                    np.array([_to_model_domain(t.params[name], dist) for t in good]), low, high, bandwidth
                )
                bad_model = _NumericDensity(
                    np.array([_to_model_domain(t.params[name], dist) for t in bad]), low, high, bandwidth
                )
            models[name] = (good_model, bad_model)

        best_params: dict[str, ParamValue] | None = None
        best_score = -math.inf
        for _ in range(cfg.n_candidates):
            params: dict[str, ParamValue] = {}
            score = 0.0
            for name, dist in space:
                good_model, bad_model = models[name]
                if dist.kind == "categorical":
                    choice = good_model.sample(rng)
                    params[name] = choice
                    score += good_model.log_density(choice) - bad_model.log_density(choice)
                else:
                    z = good_model.sample(rng)
                    value = _from_model_domain(z, dist)
                    params[name] = value
                    z_eval = _to_model_domain(value, dist)
                    score += good_model.log_density(z_eval) - bad_model.log_density(z_eval)
            if score > best_score:
                best_score = score
                best_params = params
        assert best_params is not None
        return best_params
