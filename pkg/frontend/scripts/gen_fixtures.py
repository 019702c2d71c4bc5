#!/usr/bin/env python3
"""Regenerate the frontend's search-parity fixtures.

Builds a fixture registry (the bundled builtin packages plus a few synthetic
ones), emits the static site artifacts, runs the real `bbohub catalog search`
CLI for a fixed query list, and freezes the expected ref lists. The vitest
suite replays the same queries through the TypeScript search implementation
and compares against these recorded results byte-for-byte.

Usage: python3 frontend/scripts/gen_fixtures.py
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

FRONTEND_DIR = Path(__file__).resolve().parent.parent
FIXTURE_DIR = FRONTEND_DIR / "tests" / "fixtures"

SYNTHETIC = [
    {
        "name": "grid_walker",
        "category": "samplers",
        "summary": "Exhaustive grid sweeps for tiny discrete spaces.",
        "tags": ["exhaustive", "categorical", "single-objective"],
        "readme": "# Grid Walker\n\nEnumerates a lattice over the declared space. Useful as a\ndeterministic baseline when the space is tiny.\n\n```python\nsampler = load_module(\"samplers/grid_walker\").instantiate()\n```\n",
    },
    {
        "name": "annealer",
        "category": "samplers",
        "summary": "Simulated annealing with a geometric cooling schedule.",
        "tags": ["classical", "single-objective", "continuous"],
        "readme": "# Annealer\n\nClassic simulated annealing: propose a neighbor, accept worse\nmoves with a temperature-damped probability.\n\n![schedule](cooling.png)\n",
    },
    {
        "name": "portfolio",
        "category": "samplers",
        "summary": "Round-robin portfolio over several baseline samplers.",
        "tags": ["meta", "multi-objective", "single-objective"],
        "readme": "# Portfolio\n\nRotates between member samplers and credits whichever produced\nthe best recent trial.\n",
    },
    {
        "name": "noisy_sphere",
        "category": "benchmarks",
        "summary": "Sphere function with seeded Gaussian observation noise.",
        "tags": ["benchmark", "noisy", "continuous"],
        "readme": "# Noisy Sphere\n\nA sphere objective plus zero-mean Gaussian noise, for testing\nsampler robustness against noisy evaluations.\n",
    },
    {
        "name": "weights_report",
        "category": "visualization",
        "summary": "Renders parameter-importance reports from finished studies.",
        "tags": ["visualization", "report"],
        "readme": "# Weights Report\n\nTurns a finished study into a parameter-importance table.\nMetadata-only package: nothing to instantiate.\n",
        "entry": {"kind": "plugin", "command": ["python3", "render.py"], "protocol": 1},
        "extra_files": {"render.py": "print('render stub')\n"},
    },
]

QUERIES: list[tuple[str, list[str]]] = [
    ("nelder", []),
    ("nelder mead", []),
    ("random", []),
    ("simplex method", []),
    ("sphere", []),
    ("benchmark functions", []),
    ("density", []),
    ("evolutionary", []),
    ("gaussian noise", []),
    ("annealing", []),
    ("grid", []),
    ("zzz_not_a_word", []),
    ("", []),
    ("", ["multi-objective"]),
    ("", ["benchmark"]),
    ("", ["continuous", "benchmark"]),
    ("sampler", ["single-objective"]),
    ("sphere", ["noisy"]),
    ("report", ["visualization"]),
    ("baseline", ["categorical"]),
]


def build_registry(root: Path) -> None:
    from bbohub.registry import default_registry_root

    shutil.copytree(default_registry_root(), root, dirs_exist_ok=True)
    for spec in SYNTHETIC:
        pkg = root / "package" / spec["category"] / spec["name"]
        pkg.mkdir(parents=True)
        entry = spec.get("entry")
        if entry is None:
            entry = {"kind": "builtin", "id": "samplers/random"}
            if spec["category"] == "benchmarks":
                entry = {"kind": "builtin", "id": "benchmarks/bbob"}
        manifest = {
            "name": spec["name"],
            "category": spec["category"],
            "version": "1.0.0",
            "summary": spec["summary"],
            "authors": ["fixture authors"],
            "license": "MIT",
            "tags": spec["tags"],
            "entry": entry,
            "defaults": {},
            "dependencies": [],
        }
        (pkg / "manifest.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        (pkg / "README.md").write_text(spec["readme"], encoding="utf-8")
        for rel, content in spec.get("extra_files", {}).items():
            (pkg / rel).write_text(content, encoding="utf-8")


def cli_search(site: Path, query: str, tags: list[str]) -> list[str]:
    argv = [sys.executable, "-m", "bbohub.cli", "catalog", "search", "--index", str(site), "--query", query]
    for tag in tags:
        argv += ["--tag", tag]
    out = subprocess.run(argv, check=True, capture_output=True, text=True)
    return [line for line in out.stdout.splitlines() if line.strip()]


def main() -> None:
    site = FIXTURE_DIR / "site"
    if site.exists():
        shutil.rmtree(site)
    with tempfile.TemporaryDirectory() as tmp:
        registry = Path(tmp) / "registry"
        build_registry(registry)
        code = subprocess.run(
            [sys.executable, "-m", "bbohub.cli", "catalog", "build", "--registry", str(registry), "--out", str(site)],
            check=True,
        ).returncode
        assert code == 0

    cases = [
        {"query": query, "tags": tags, "expected_refs": cli_search(site, query, tags)}
        for query, tags in QUERIES
    ]
    (FIXTURE_DIR / "queries.json").write_text(json.dumps(cases, indent=2) + "\n", encoding="utf-8")
    n_docs = len(json.loads((site / "catalog.json").read_text())["packages"])
    print(f"fixtures: {n_docs} packages, {len(cases)} recorded queries -> {FIXTURE_DIR}")


if __name__ == "__main__":
    main()
