"""Independent uniform sampling over each declared parameter."""

from __future__ import annotations

import math

import numpy as np

from ..space import ParamValue, SearchSpace
from .base import Sampler, derive_rng


def random_sample(space: SearchSpace, rng: np.random.Generator) -> dict[str, ParamValue]:
    """Draw each parameter independently: floats uniform on [low, high]
    (uniform in the log domain for log-scale), ints uniform inclusive,
    categoricals uniform over choices."""
    params: dict[str, ParamValue] = {}
    for name, dist in space:
        if dist.kind == "float":
            if dist.log_scale:
                # exp(log x) can land a hair outside the range; clip it back
                draw = math.exp(rng.uniform(math.log(dist.low), math.log(dist.high)))
                params[name] = float(min(max(draw, dist.low), dist.high))
            else:
                params[name] = float(rng.uniform(dist.low, dist.high))
        elif dist.kind == "int":
            params[name] = int(rng.integers(dist.low, dist.high + 1))
        else:
            params[name] = dist.choices[int(rng.integers(len(dist.choices)))]
    return params


class RandomSampler(Sampler):
    ref = "samplers/random"

    def ask(self, space, directions, trial_id, history, seed):
        return random_sample(space, derive_rng(seed, trial_id))
