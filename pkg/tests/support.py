"""Shared test helpers: fixture registries, hypothesis strategies, small
independent oracles, and the acceptance-criteria reporting hook."""

from __future__ import annotations

import functools
import json
import math
from pathlib import Path

from hypothesis import strategies as st

from bbohub.space import Direction, SearchSpace, categorical_param, float_param, int_param

PLUGIN_DIR = Path(__file__).parent / "fixtures" / "plugins"

# (criterion name, passed) pairs; printed by the terminal-summary hook
ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def criterion(name: str):
    """Record and print one pass/fail line per acceptance criterion."""

    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_RESULTS.append((name, False))
                print(f"ACCEPTANCE FAIL  {name}", flush=True)
                raise
            ACCEPTANCE_RESULTS.append((name, True))
            print(f"ACCEPTANCE PASS  {name}", flush=True)

        return wrapper

    return decorate


# --------------------------------------------------------------------------
# fixture registries


def write_package(
    registry_root: Path,
    category: str,
    name: str,
    *,
    readme: str | None = None,
    manifest_extra: dict | None = None,
    tags: list[str] | None = None,
    summary: str | None = None,
    entry: dict | None = None,
    extra_files: dict[str, str] | None = None,
) -> Path:
    pkg_dir = registry_root / "package" / category / name
    pkg_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "name": name,
        "category": category,
        "version": "1.0.0",
        "summary": summary or f"Test package {name}.",
        "authors": ["tester"],
        "license": "MIT",
        "tags": tags if tags is not None else ["test"],
        "entry": entry or {"kind": "builtin", "id": "samplers/random"},
        "defaults": {},
        "dependencies": [],
    }
    manifest.update(manifest_extra or {})
    (pkg_dir / "manifest.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    (pkg_dir / "README.md").write_text(readme or f"# {name}\n\nA test package.\n", encoding="utf-8")
    for rel, content in (extra_files or {}).items():
        target = pkg_dir / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(content, encoding="utf-8")
    return pkg_dir


def plugin_entry(script_name: str, *argv: str) -> dict:
    import sys

    return {"kind": "plugin", "command": [sys.executable, script_name, *argv], "protocol": 1}


def plugin_script(name: str) -> str:
    return (PLUGIN_DIR / name).read_text(encoding="utf-8")


# --------------------------------------------------------------------------
# hypothesis strategies

_names = st.from_regex(r"[a-z][a-z0-9_]{0,7}", fullmatch=True)


def distributions() -> st.SearchStrategy:
    floats = st.tuples(
        st.floats(min_value=-100, max_value=100, allow_nan=False),
        st.floats(min_value=0.0, max_value=50.0, allow_nan=False),
    ).map(lambda pair: float_param(pair[0], pair[0] + pair[1]))
    log_floats = st.tuples(
        st.floats(min_value=1e-3, max_value=10.0),
        st.floats(min_value=1.0, max_value=1e4),
    ).map(lambda pair: float_param(pair[0], pair[0] * pair[1], log_scale=True))
    ints = st.tuples(
        st.integers(min_value=-50, max_value=50), st.integers(min_value=0, max_value=40)
    ).map(lambda pair: int_param(pair[0], pair[0] + pair[1]))
    cats = st.lists(_names, min_size=1, max_size=5, unique=True).map(categorical_param)
    return st.one_of(floats, log_floats, ints, cats)


def search_spaces(max_params: int = 4, kinds: st.SearchStrategy | None = None) -> st.SearchStrategy:
    if kinds is None:
        kinds = distributions()
    return st.dictionaries(_names, kinds, min_size=1, max_size=max_params).map(SearchSpace)


def float_spaces(max_params: int = 4) -> st.SearchStrategy:
    floats = st.tuples(
        st.floats(min_value=-100, max_value=100, allow_nan=False),
        st.floats(min_value=1e-6, max_value=50.0, allow_nan=False),
    ).map(lambda pair: float_param(pair[0], pair[0] + pair[1]))
    return search_spaces(max_params, kinds=floats)


# --------------------------------------------------------------------------
# independent oracles


def brute_force_fronts(points, directions) -> list[list[int]]:
    """Iterative peeling with a from-scratch dominance check; the oracle for
    non_dominated_sort."""

    def dominated(a, b):
        # does b dominate a?
        not_worse = all(
            (vb <= va) if d is Direction.MINIMIZE else (vb >= va)
            for va, vb, d in zip(a, b, directions)
        )
        strictly = any(
            (vb < va) if d is Direction.MINIMIZE else (vb > va)
            for va, vb, d in zip(a, b, directions)
        )
        return not_worse and strictly

    remaining = list(range(len(points)))
    fronts = []
    while remaining:
        front = [
            i for i in remaining if not any(dominated(points[i], points[j]) for j in remaining if j != i)
        ]
        fronts.append(sorted(front))
        remaining = [i for i in remaining if i not in front]
    return fronts


def hypervolume_2d(front, ref) -> float:
    """Dominated area of a bi-objective (minimize, minimize) front w.r.t. a
    reference point."""
    pts = sorted({(a, b) for a, b in front if a <= ref[0] and b <= ref[1]})
    area, prev_b = 0.0, ref[1]
    for a, b in pts:
        if b < prev_b:
            area += (ref[0] - a) * (prev_b - b)
            prev_b = b
    return area


def params_in_space(params: dict, space: SearchSpace) -> bool:
    for name, dist in space:
        value = params.get(name)
        if dist.kind == "float":
            if not isinstance(value, float) or not (dist.low <= value <= dist.high):
                return False
        elif dist.kind == "int":
            if not isinstance(value, int) or not (dist.low <= value <= dist.high):
                return False
        else:
            if value not in dist.choices:
                return False
    return len(params) == len(space)


def assert_close(a: float, b: float, tol: float = 1e-12) -> None:
    assert math.isclose(a, b, rel_tol=tol, abs_tol=tol), f"{a} != {b}"
