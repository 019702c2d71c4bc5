"""Uniform sampler contract.

A sampler is a pure function of (space, directions, trial_id, history, seed):
feeding the same completed-trial history with the same seed always yields the
same suggestion. This keeps journal replay, resume, and the subprocess plugin
protocol (which re-sends the full history on every ask) mutually consistent.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Sequence

import numpy as np

from ..space import Direction, ParamValue, SearchSpace

if TYPE_CHECKING:
    from ..study import Trial


def derive_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """Deterministic generator derived from the study seed.

    With a stream (normally the trial id) the generator is unique per ask;
    without one it is the sampler's base generator (used e.g. for initial
    simplex placement that must not vary between asks).
    """
    if stream is None:
        return np.random.default_rng(np.random.SeedSequence(int(seed)))
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream)]))


class Sampler(ABC):
    """Strategy that proposes the next parameter assignment."""

    #: registry-style identity, e.g. "samplers/random"
    ref: str = "samplers/unknown"

    #: instantiation options worth journaling (config knobs, not state)
    options: dict = {}

    @abstractmethod
    def ask(
        self,
        space: SearchSpace,
        directions: Sequence[Direction],
        trial_id: int,
        history: Sequence["Trial"],
        seed: int,
    ) -> dict[str, ParamValue]:
        """Return a full parameter assignment for the given trial id.

        ``history`` contains the completed trials only, in id order.
        """

    def tell(self, trial: "Trial") -> None:
        """Outcome notification; stateless samplers ignore it."""

    def close(self) -> None:
        """Release external resources (subprocess-backed samplers)."""
