"""Builtin samplers and the table that binds registry refs to them."""

from __future__ import annotations

from ..errors import BindingError, ValidationError
from .auto import AutoSampler, auto_select
from .base import Sampler, derive_rng
from .nelder_mead import NelderMeadSampler, SimplexSearch, initial_vertices
from .nsga2 import Nsga2Config, Nsga2Sampler, crowding_distance, non_dominated_sort
from .random_search import RandomSampler, random_sample
from .tpe import TpeConfig, TpeSampler, tpe_split

__all__ = [
    "Sampler",
    "derive_rng",
    "RandomSampler",
    "random_sample",
    "NelderMeadSampler",
    "SimplexSearch",
    "initial_vertices",
    "TpeConfig",
    "TpeSampler",
    "tpe_split",
    "Nsga2Config",
    "Nsga2Sampler",
    "non_dominated_sort",
    "crowding_distance",
    "AutoSampler",
    "auto_select",
    "make_builtin_sampler",
    "BUILTIN_SAMPLER_REFS",
]


def _no_options(options: dict, ref: str) -> None:
    if options:
        raise ValidationError(f"{ref} accepts no options, got {sorted(options)}")


def make_builtin_sampler(ref: str, options: dict | None = None) -> Sampler:
    """Instantiate a builtin sampler by its registry ref."""
    options = dict(options or {})
    if ref == "samplers/random":
        _no_options(options, ref)
        return RandomSampler()
    if ref == "samplers/nelder_mead":
        _no_options(options, ref)
        return NelderMeadSampler()
    if ref == "samplers/tpe":
        try:
            return TpeSampler(TpeConfig(**options))
        except TypeError:
            raise ValidationError(f"unknown tpe options: {sorted(options)}") from None
    if ref == "samplers/nsga2":
        try:
            return Nsga2Sampler(Nsga2Config(**options))
        except TypeError:
            raise ValidationError(f"unknown nsga2 options: {sorted(options)}") from None
    if ref == "samplers/auto_sampler":
        _no_options(options, ref)
        return AutoSampler()
    raise BindingError(f"unknown builtin sampler {ref!r}")


BUILTIN_SAMPLER_REFS = (
    "samplers/random",
    "samplers/nelder_mead",
    "samplers/tpe",
    "samplers/nsga2",
    "samplers/auto_sampler",
)
