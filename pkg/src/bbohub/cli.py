"""Operator entry point: run optimizations, manage the registry cache, build
the catalog site, and search it.

Exit codes: 0 success, 1 validation findings, 2 usage/configuration errors,
3 runtime interruption (e.g. a plugin dying mid-run; the journal prefix is
kept).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import SearchIndex, build_index, collect_pages, emit_site, search
from .errors import (
    BboHubError,
    ConfigurationError,
    NotFoundError,
    PluginError,
    RegistryError,
    SamplerError,
    ValidationError,
)
from .registry import PackageCache, fetch_package, load_module, validate_package
from .study import StudyConfig, create_study

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_INTERRUPTED = 3


def parse_set_value(text: str):
    """--set values parse as int, then float, then string."""
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def parse_set_args(pairs: list[str] | None) -> dict:
    options = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValidationError(f"--set expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        if not key:
            raise ValidationError(f"--set expects key=value, got {pair!r}")
        options[key] = parse_set_value(value)
    return options


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_run(args: argparse.Namespace) -> int:
    sampler = problem = study = None
    try:
        problem_overrides = parse_set_args(args.set)
        sampler_overrides = parse_set_args(args.sampler_set)
        sampler_pkg = load_module(args.sampler, args.registry, no_network=args.no_network)
        problem_pkg = load_module(args.problem, args.registry, no_network=args.no_network)
        sampler = sampler_pkg.instantiate(**sampler_overrides)
        problem = problem_pkg.instantiate(**problem_overrides)
    except (RegistryError, ValidationError, PluginError, ConfigurationError) as exc:
        return _fail(str(exc), EXIT_USAGE)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        config = StudyConfig(
            directions=problem.directions,
            search_space=problem.search_space,
            seed=args.seed,
            sampler=sampler,
        )
        study = create_study(config, journal_path=out_dir / "journal.ndjson")
    except (ValidationError, ConfigurationError) as exc:
        _close_quietly(sampler, problem)
        return _fail(str(exc), EXIT_USAGE)

    try:
        study.optimize(problem, args.trials, workers=args.workers)
    except (ConfigurationError, ValidationError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    except SamplerError as exc:
        print(f"error: run interrupted: {exc}", file=sys.stderr)
        print(f"journal prefix retained at {study.journal_path}", file=sys.stderr)
        return EXIT_INTERRUPTED
    except PluginError as exc:
        print(f"error: run interrupted: {exc}", file=sys.stderr)
        print(f"journal prefix retained at {study.journal_path}", file=sys.stderr)
        return EXIT_INTERRUPTED
    finally:
        _close_quietly(sampler, problem, study)

    result = {
        "sampler": {"ref": str(sampler_pkg.ref), "version": sampler_pkg.manifest.version,
                    "options": sampler_overrides},
        "problem": {"ref": str(problem_pkg.ref), "version": problem_pkg.manifest.version,
                    "options": problem_overrides},
        "seed": args.seed,
        "n_trials": args.trials,
        "directions": [d.value for d in study.directions],
        "trials": [t.to_dict() for t in study.trials],
    }
    summary: str
    if len(study.directions) == 1:
        try:
            best = study.best_trial()
            result["best"] = best.to_dict()
            summary = f"best value {best.values[0]:.6g} (trial {best.id})"
        except NotFoundError:
            result["best"] = None
            summary = "no complete trials"
    else:
        try:
            front = study.pareto_front()
            result["pareto_front"] = [t.to_dict() for t in front]
            summary = f"pareto front of {len(front)} trials"
        except NotFoundError:
            result["pareto_front"] = []
            summary = "no complete trials"

    result_path = out_dir / "result.json"
    result_path.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"run complete: {study.n_trials} trials, {summary} -> {result_path}")
    return EXIT_OK


def _close_quietly(*closables) -> None:
    for obj in closables:
        if obj is None:
            continue
        try:
            obj.close()
        except Exception:
            pass


def cmd_registry(args: argparse.Namespace) -> int:
    if args.registry_cmd == "fetch":
        try:
            entry = fetch_package(args.ref, args.registry, no_network=args.no_network)
        except (RegistryError, ValidationError) as exc:
            return _fail(str(exc), EXIT_USAGE)
        print(f"{entry.ref} {entry.version} {entry.content_digest}")
        return EXIT_OK

    if args.registry_cmd == "validate":
        report = validate_package(args.path)
        for err in report.errors:
            print(f"error: {err}")
        for warning in report.warnings:
            print(f"warning: {warning}")
        if report.ok:
            print(f"{args.path}: ok ({len(report.warnings)} warnings)")
            return EXIT_OK
        return EXIT_FINDINGS

    # list
    for entry in PackageCache().entries():
        print(f"{entry.ref} {entry.version} {entry.content_digest}")
    return EXIT_OK


def cmd_catalog(args: argparse.Namespace) -> int:
    if args.catalog_cmd == "build":
        try:
            pages, reports = collect_pages(args.registry)
        except (ValidationError, OSError) as exc:
            return _fail(str(exc), EXIT_USAGE)
        index = build_index(pages)
        written = emit_site(pages, index, args.out)
        failing = [r for r in reports if not r.ok]
        for report in failing:
            for err in report.errors:
                print(f"error: {report.package_dir}: {err}", file=sys.stderr)
        print(f"catalog: {len(pages)} packages, {len(written)} files -> {args.out}")
        return EXIT_FINDINGS if failing else EXIT_OK

    # search
    index_path = Path(args.index) / "search_index.json"
    try:
        index = SearchIndex.from_dict(json.loads(index_path.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        return _fail(f"cannot load search index at {index_path}: {exc}", EXIT_USAGE)
    for ref, _score in search(index, args.query or "", args.tag or []):
        print(ref)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbohub", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an optimization study")
    run.add_argument("--sampler", required=True, help="sampler ref, e.g. samplers/auto_sampler")
    run.add_argument("--problem", required=True, help="problem ref, e.g. benchmarks/bbob")
    run.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="problem instantiation parameter (repeatable)")
    run.add_argument("--sampler-set", action="append", metavar="KEY=VALUE",
                     help="sampler instantiation parameter (repeatable)")
    run.add_argument("--trials", type=int, required=True)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default="bbohub_out", help="output directory (journal.ndjson, result.json)")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--registry", default=None, help="registry root (default: BBOHUB_REGISTRY_ROOT or bundled)")
    run.add_argument("--no-network", action="store_true", help="resolve packages from the cache only")
    run.set_defaults(func=cmd_run)

    registry = sub.add_parser("registry", help="fetch, validate, and list packages")
    registry_sub = registry.add_subparsers(dest="registry_cmd", required=True)
    fetch = registry_sub.add_parser("fetch", help="fetch a package into the cache")
    fetch.add_argument("ref")
    fetch.add_argument("--registry", default=None)
    fetch.add_argument("--no-network", action="store_true")
    validate = registry_sub.add_parser("validate", help="check a package directory for publishability")
    validate.add_argument("path")
    registry_sub.add_parser("list", help="list cached packages")
    registry.set_defaults(func=cmd_registry)

    catalog = sub.add_parser("catalog", help="build and search the package catalog")
    catalog_sub = catalog.add_subparsers(dest="catalog_cmd", required=True)
    build = catalog_sub.add_parser("build", help="emit catalog.json, search_index.json, and package pages")
    build.add_argument("--registry", required=True, help="local registry root to walk")
    build.add_argument("--out", required=True)
    search_cmd = catalog_sub.add_parser("search", help="query a built search index")
    search_cmd.add_argument("--index", required=True, help="directory containing search_index.json")
    search_cmd.add_argument("--query", default="")
    search_cmd.add_argument("--tag", action="append")
    catalog.set_defaults(func=cmd_catalog)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BboHubError as exc:
        return _fail(str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
