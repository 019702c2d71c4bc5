"""Static routing between the builtin samplers.

The rule table is a pure function of the search space and objective count:
multi-objective goes to the evolutionary sampler, spaces with non-float
parameters go to the density sampler, all-float single-objective spaces get
the simplex method.
"""

from __future__ import annotations

from ..space import SearchSpace
from .base import Sampler
from .nelder_mead import NelderMeadSampler
from .nsga2 import Nsga2Sampler
from .tpe import TpeSampler


def auto_select(space: SearchSpace, n_objectives: int) -> str:
    """Return the sampler kind for (space, n_objectives):
    "nsga2", "tpe", or "nelder_mead"."""
    if n_objectives >= 2:
        return "nsga2"
    # the simplex method cannot handle categorical or integer coordinates
    if any(dist.kind != "float" for _, dist in space):
        return "tpe"
    return "nelder_mead"


class AutoSampler(Sampler):
    ref = "samplers/auto_sampler"

    def __init__(self):
        self._delegates: dict[str, Sampler] = {
            "nsga2": Nsga2Sampler(),
            "tpe": TpeSampler(),
            "nelder_mead": NelderMeadSampler(),
        }

    def ask(self, space, directions, trial_id, history, seed):
        kind = auto_select(space, len(directions))
        return self._delegates[kind].ask(space, directions, trial_id, history, seed)
