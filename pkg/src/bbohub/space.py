"""Declared search spaces: parameter distributions shared by the engine,
serialization, and the plugin wire format.

Spaces are declared ahead of time (not define-by-run) so that subprocess
plugins and the journal can see the full parameter domain.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping

from .errors import ValidationError

ParamValue = float | int | str


class Direction(enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"

    @classmethod
    def parse(cls, value: "Direction | str") -> "Direction":
        if isinstance(value, Direction):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ValidationError(f"unknown direction {value!r} (expected 'minimize' or 'maximize')") from None


@dataclass(frozen=True)
class Distribution:
    """Domain of a single parameter: float/int range or categorical choices.

    Bounds are inclusive. ``log_scale`` is only meaningful for floats and
    requires a positive lower bound.
    """

    kind: str  # "float" | "int" | "categorical"
    low: float | int | None = None
    high: float | int | None = None
    log_scale: bool = False
    choices: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "choices", tuple(self.choices))
        self.validate()

    def validate(self) -> None:
        if self.kind == "float":
            if self.low is None or self.high is None:
                raise ValidationError("float distribution requires low and high bounds")
            if not (math.isfinite(self.low) and math.isfinite(self.high)):
                raise ValidationError("float bounds must be finite")
            if self.low > self.high:
                raise ValidationError(f"low ({self.low}) must be <= high ({self.high})")
            if self.log_scale and self.low <= 0:
                raise ValidationError(f"log-scale requires low > 0, got {self.low}")
        elif self.kind == "int":
            if self.low is None or self.high is None:
                raise ValidationError("int distribution requires low and high bounds")
            if int(self.low) != self.low or int(self.high) != self.high:
                raise ValidationError("int bounds must be integers")
            if self.low > self.high:
                raise ValidationError(f"low ({self.low}) must be <= high ({self.high})")
            if self.log_scale:
                raise ValidationError("log-scale applies to float distributions only")
        elif self.kind == "categorical":
            if not self.choices:
                raise ValidationError("categorical distribution requires at least one choice")
            if len(set(self.choices)) != len(self.choices):
                raise ValidationError("categorical choices must be pairwise distinct")
            if any(not isinstance(c, str) for c in self.choices):
                raise ValidationError("categorical choices must be strings")
            if self.log_scale:
                raise ValidationError("log-scale applies to float distributions only")
        else:
            raise ValidationError(f"unknown distribution kind {self.kind!r}")

    def contains(self, value: Any) -> bool:
        if self.kind == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return False
            return math.isfinite(value) and self.low <= value <= self.high
        if self.kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                return False
            return self.low <= value <= self.high
        return isinstance(value, str) and value in self.choices

    def coerce(self, value: Any) -> ParamValue:
        """Normalize a raw (e.g. wire-deserialized) value into the canonical
        Python type for this kind, raising if it does not fit the domain."""
        if self.kind == "float" and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if self.kind == "int" and isinstance(value, float) and value.is_integer():
            value = int(value)
        if not self.contains(value):
            raise ValidationError(f"value {value!r} outside distribution {self.describe()}")
        return value

    def describe(self) -> str:
        if self.kind == "categorical":
            return f"categorical{list(self.choices)}"
        suffix = ", log" if self.log_scale else ""
        return f"{self.kind}[{self.low}, {self.high}{suffix}]"

    def to_dict(self) -> dict:
        if self.kind == "categorical":
            return {"kind": "categorical", "choices": list(self.choices)}
        out: dict[str, Any] = {"kind": self.kind, "low": self.low, "high": self.high}
        if self.kind == "float":
            out["log_scale"] = self.log_scale
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Distribution":
        kind = data.get("kind")
        if kind == "categorical":
            return cls(kind="categorical", choices=tuple(data.get("choices", ())))
        return cls(
            kind=str(kind),
            low=data.get("low"),
            high=data.get("high"),
            log_scale=bool(data.get("log_scale", False)),
        )


def float_param(low: float, high: float, log_scale: bool = False) -> Distribution:
    return Distribution(kind="float", low=float(low), high=float(high), log_scale=log_scale)


def int_param(low: int, high: int) -> Distribution:
    return Distribution(kind="int", low=int(low), high=int(high))


def categorical_param(choices: Any) -> Distribution:
    return Distribution(kind="categorical", choices=tuple(choices))


@dataclass(frozen=True)
class SearchSpace:
    """Ordered, named parameter distributions. Order is significant and is
    preserved by serialization and the wire format."""

    params: tuple[tuple[str, Distribution], ...]

    def __init__(self, params: Mapping[str, Distribution]):
        if not params:
            raise ValidationError("search space must declare at least one parameter")
        items = []
        for name, dist in params.items():
            if not name:
                raise ValidationError("parameter names must be non-empty")
            if not isinstance(dist, Distribution):
                raise ValidationError(f"parameter {name!r}: expected a Distribution")
            items.append((name, dist))
        names = [n for n, _ in items]
        if len(set(names)) != len(names):
            raise ValidationError("parameter names must be unique")
        object.__setattr__(self, "params", tuple(items))

    def __iter__(self) -> Iterator[tuple[str, Distribution]]:
        return iter(self.params)

    def __len__(self) -> int:
        return len(self.params)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.params]

    def __getitem__(self, name: str) -> Distribution:
        for n, dist in self.params:
            if n == name:
                return dist
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(n == name for n, _ in self.params)

    def validate_params(self, params: Mapping[str, Any]) -> dict[str, ParamValue]:
        """Check a full assignment against this space, returning canonicalized
        values in declaration order."""
        out: dict[str, ParamValue] = {}
        for name, dist in self.params:
            if name not in params:
                raise ValidationError(f"missing parameter {name!r}")
            try:
                out[name] = dist.coerce(params[name])
            except ValidationError as exc:
                raise ValidationError(f"parameter {name!r}: {exc}") from None
        extra = set(params) - set(self.names)
        if extra:
            raise ValidationError(f"unknown parameters: {sorted(extra)}")
        return out

    def to_dict(self) -> dict:
        # list-of-objects form so declaration order survives key-sorting
        # canonical serialization
        return {"params": [{"name": name, **dist.to_dict()} for name, dist in self.params]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SearchSpace":
        raw = data.get("params")
        if not isinstance(raw, list):
            raise ValidationError("search space payload requires a 'params' list")
        params: dict[str, Distribution] = {}
        for item in raw:
            name = item.get("name")
            if not name:
                raise ValidationError("search space entry missing 'name'")
            try:
                params[str(name)] = Distribution.from_dict(item)
            except ValidationError as exc:
                raise ValidationError(f"parameter {name!r}: {exc}") from None
        return cls(params)


def space_of(**dists: Distribution) -> SearchSpace:
    """Convenience constructor: ``space_of(x=float_param(-5, 5))``."""
    return SearchSpace(dists)
