"""Acceptance suite: one test per criterion, each at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v`; a PASS/FAIL line per criterion
is printed in the terminal summary.
"""

import json
import statistics
import time

import numpy as np
import pytest

import support
from bbohub.benchmarks import SUPPORTED_FUNCTION_IDS, BenchmarkSpec, make_bbob, make_bi_sphere
from bbohub.catalog import build_index, collect_pages, emit_site, search, tokenize
from bbohub.cli import main as cli_main
from bbohub.journal import read_journal
from bbohub.plugin import PluginSampler, shutdown_plugin, spawn_plugin
from bbohub.registry import PackageCache, load_module
from bbohub.samplers import (
    NelderMeadSampler,
    Nsga2Sampler,
    RandomSampler,
    TpeSampler,
    non_dominated_sort,
    random_sample,
)
from bbohub.space import Direction, SearchSpace, categorical_param, float_param, int_param
from bbohub.study import StudyConfig, TrialState, create_study, replay_journal


def run_study(problem, sampler, seed, n_trials, journal_path=None):
    study = create_study(
        StudyConfig(
            directions=problem.directions,
            search_space=problem.search_space,
            seed=seed,
            sampler=sampler,
        ),
        journal_path=journal_path,
    )
    study.optimize(problem, n_trials)
    return study


@support.criterion("listing-1 reproduction: auto sampler on 2-D sphere, 100 trials, best < 1.0, < 5 s")
def test_listing_one_reproduction(tmp_path):
    out = tmp_path / "out"
    started = time.monotonic()
    code = cli_main(
        [
            "run",
            "--sampler", "samplers/auto_sampler",
            "--problem", "benchmarks/bbob",
            "--set", "function_id=1",
            "--set", "dimension=2",
            "--trials", "100",
            "--seed", "0",
            "--out", str(out),
        ]
    )
    elapsed = time.monotonic() - started
    assert code == 0
    result = json.loads((out / "result.json").read_text())
    assert len(result["trials"]) == 100
    assert result["best"]["values"][0] < 1.0
    assert elapsed < 5.0, f"run took {elapsed:.2f}s"


@support.criterion("nelder-mead convergence: f1 dim 2 instance 0 seed 0, best <= 1e-8 in 200 evals, < 1 s")
def test_nelder_mead_convergence():
    problem = make_bbob(BenchmarkSpec(function_id=1, dimension=2, instance=0))
    started = time.monotonic()
    study = run_study(problem, NelderMeadSampler(), seed=0, n_trials=200)
    elapsed = time.monotonic() - started
    assert study.best_trial().values[0] <= 1e-8
    assert elapsed < 1.0, f"200 evaluations took {elapsed:.2f}s"


@support.criterion("sampler ordering: median NM < TPE < random on f1 dim 5, TPE beats random >= 15/20 seeds")
def test_sampler_ordering():
    bests = {"nm": [], "tpe": [], "random": []}
    for seed in range(20):
        problem = make_bbob(BenchmarkSpec(function_id=1, dimension=5, instance=0))
        bests["nm"].append(run_study(problem, NelderMeadSampler(), seed, 100).best_trial().values[0])
        bests["tpe"].append(run_study(problem, TpeSampler(), seed, 100).best_trial().values[0])
        bests["random"].append(run_study(problem, RandomSampler(), seed, 100).best_trial().values[0])
    med = {k: statistics.median(v) for k, v in bests.items()}
    assert med["nm"] < med["tpe"] < med["random"], med
    wins = sum(1 for t, r in zip(bests["tpe"], bests["random"]) if t < r)
    assert wins >= 15, f"tpe beat random in only {wins}/20 seeds"


@support.criterion("nsga-ii correctness: non_dominated_sort matches brute force, 200x3, 100 repetitions")
def test_non_dominated_sort_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        points = [tuple(map(float, rng.uniform(0, 10, size=3))) for _ in range(200)]
        directions = [
            Direction.MINIMIZE if rng.random() < 0.5 else Direction.MAXIMIZE for _ in range(3)
        ]
        assert non_dominated_sort(points, directions) == support.brute_force_fronts(points, directions)


@support.criterion("nsga-ii effectiveness: hypervolume beats random on bi-sphere in >= 8/10 seeds")
def test_nsga2_hypervolume_vs_random():
    wins = 0
    for seed in range(10):
        fronts = {}
        for key, sampler in (("nsga2", Nsga2Sampler()), ("random", RandomSampler())):
            problem = make_bi_sphere(2, 1.0)
            study = run_study(problem, sampler, seed, 200)
            fronts[key] = [t.values for t in study.pareto_front()]
        hv_nsga = support.hypervolume_2d(fronts["nsga2"], (10.0, 10.0))
        hv_rand = support.hypervolume_2d(fronts["random"], (10.0, 10.0))
        wins += hv_nsga > hv_rand
    assert wins >= 8, f"nsga2 won only {wins}/10 seeds"


@support.criterion("benchmark analytic checks: evaluate(x*) == f* (1e-9) and 1000 random points never beat f*")
def test_benchmark_analytic_checks():
    rng = np.random.default_rng(7)
    for function_id in SUPPORTED_FUNCTION_IDS:
        for dimension in range(1, 11):
            for instance in range(6):
                problem = make_bbob(BenchmarkSpec(function_id, dimension, instance))
                f_star = problem.optimum_values[0]
                assert problem.evaluate(problem.optimum_params)[0] == pytest.approx(f_star, abs=1e-9)
                names = problem.search_space.names
                points = rng.uniform(-5, 5, size=(1000, dimension))
                for point in points:
                    value = problem.evaluate(dict(zip(names, map(float, point))))[0]
                    assert value >= f_star - 1e-9


@support.criterion("offline cache: load_module succeeds with unreachable root, byte-identical content")
def test_offline_cache_round_trip(tmp_path):
    root = tmp_path / "registry"
    support.write_package(
        root, "samplers", "fixture_pkg",
        readme="# Fixture\n\nSome body.\n",
        extra_files={"example/run.py": "print('x')\n"},
    )
    first = load_module("samplers/fixture_pkg", str(root))
    cache = PackageCache()
    baseline = cache.read_files(first.cache_entry)

    unreachable = str(tmp_path / "definitely" / "not" / "there")
    second = load_module("samplers/fixture_pkg", unreachable)
    assert cache.read_files(second.cache_entry) == baseline
    assert second.cache_entry.content_digest == first.cache_entry.content_digest


@support.criterion("plugin conformance: 100-trial study with zero violations; mid-run kill -> exit 3, intact prefix")
def test_plugin_conformance(tmp_path):
    # randomized space, fixed seed for reproducibility
    rng = np.random.default_rng(31)
    params = {}
    for i in range(int(rng.integers(2, 5))):
        kind = rng.integers(3)
        if kind == 0:
            low = float(rng.uniform(-10, 0))
            params[f"f{i}"] = float_param(low, low + float(rng.uniform(0.5, 20)))
        elif kind == 1:
            low = int(rng.integers(-10, 0))
            params[f"i{i}"] = int_param(low, low + int(rng.integers(1, 15)))
        else:
            params[f"c{i}"] = categorical_param([f"v{j}" for j in range(int(rng.integers(2, 5)))])
    space = SearchSpace(params)

    class CountUp:
        search_space = space
        directions = [Direction.MINIMIZE]

        def evaluate(self, p):
            return [float(sum(hash(str(v)) % 97 for v in p.values()))]

    handle = spawn_plugin(
        [__import__("sys").executable, str(support.PLUGIN_DIR / "random_sampler_plugin.py")],
        "sampler",
    )
    try:
        study = run_study(CountUp(), PluginSampler(handle, ref="samplers/reference_random"), 0, 100)
        assert study.n_trials == 100
        assert all(t.state is TrialState.COMPLETE for t in study.trials)  # zero violations
        for trial in study.trials:
            assert support.params_in_space(trial.params, space)
    finally:
        shutdown_plugin(handle)

    # mid-run death through the CLI: exit 3 and a replayable journal prefix
    registry = tmp_path / "registry"
    support.write_package(
        registry, "samplers", "flaky",
        entry=support.plugin_entry("plugin.py", "7"),
        extra_files={"plugin.py": support.plugin_script("flaky_sampler_plugin.py")},
    )
    support.write_package(
        registry, "benchmarks", "bbob",
        entry={"kind": "builtin", "id": "benchmarks/bbob"},
        manifest_extra={"defaults": {"function_id": 1, "dimension": 2, "instance": 0}},
    )
    out = tmp_path / "out"
    code = cli_main(
        [
            "run", "--sampler", "samplers/flaky", "--problem", "benchmarks/bbob",
            "--trials", "50", "--registry", str(registry), "--out", str(out),
        ]
    )
    assert code == 3
    replayed = replay_journal(read_journal(out / "journal.ndjson"))
    assert 0 < replayed.n_trials < 50


@support.criterion("journal round-trip: 1000 randomized journals replay to identical studies")
def test_journal_round_trip_fuzz(tmp_path):
    rng = np.random.default_rng(123)
    for case in range(1000):
        n_params = int(rng.integers(1, 4))
        dists = {}
        for i in range(n_params):
            kind = int(rng.integers(3))
            if kind == 0:
                low = float(rng.uniform(-5, 0))
                dists[f"p{i}"] = float_param(low, low + float(rng.uniform(0.1, 10)))
            elif kind == 1:
                low = int(rng.integers(-5, 0))
                dists[f"p{i}"] = int_param(low, low + int(rng.integers(1, 10)))
            else:
                dists[f"p{i}"] = categorical_param([f"c{j}" for j in range(int(rng.integers(1, 4)))])
        space = SearchSpace(dists)
        n_objectives = int(rng.integers(1, 3))
        journal_path = tmp_path / f"journal_{case}.ndjson"
        study = create_study(
            StudyConfig(
                directions=[Direction.MINIMIZE] * n_objectives,
                search_space=space,
                seed=int(rng.integers(2**31)),
                sampler=RandomSampler(),
            ),
            journal_path=journal_path,
        )
        for _ in range(int(rng.integers(0, 7))):
            trial = study.ask()
            roll = rng.random()
            if roll < 0.6:
                study.tell(trial.id, [float(v) for v in rng.uniform(-5, 5, size=n_objectives)])
            elif roll < 0.8:
                study.tell(trial.id, failed=True)
        study.close()

        replayed = replay_journal(read_journal(journal_path))
        assert [t.to_dict() for t in replayed.trials] == [t.to_dict() for t in study.trials]
        assert replayed.search_space == study.search_space
        assert replayed.seed == study.seed
        journal_path.unlink()


@support.criterion("catalog oracle equivalence: 20-package fixture, 100 random queries; byte-exact rebuild")
def test_catalog_oracle_equivalence(tmp_path):
    vocab = [
        "adaptive", "bandit", "bayesian", "benchmark", "classic", "density",
        "evolution", "gradient", "kernel", "landscape", "mead", "nelder",
        "noise", "pareto", "portfolio", "quadratic", "random", "simplex",
        "surrogate", "trust",
    ]
    tag_pool = ["single-objective", "multi-objective", "continuous", "categorical", "noisy", "fast"]
    rng = np.random.default_rng(55)
    registry = tmp_path / "registry"
    for i in range(20):
        words = list(rng.choice(vocab, size=int(rng.integers(3, 8))))
        tags = sorted(set(rng.choice(tag_pool, size=int(rng.integers(1, 4)))))
        category = "samplers" if i % 2 == 0 else "benchmarks"
        builtin = "samplers/random" if category == "samplers" else "benchmarks/bbob"
        support.write_package(
            registry, category, f"pkg_{i:02d}",
            readme=f"# {words[0].title()} Package {i}\n\n{' '.join(words)}\n",
            summary=f"{words[-1].title()} helper number {i}.",
            tags=tags,
            entry={"kind": "builtin", "id": builtin},
        )

    pages, reports = collect_pages(registry)
    assert len(pages) == 20
    assert all(r.ok for r in reports)
    index = build_index(pages)

    def oracle(query, tags):
        out = []
        for doc in pages:
            hay = set(tokenize(doc.title)) | set(tokenize(doc.summary)) | set(tokenize(doc.body_text))
            for tag in doc.tags:
                hay |= set(tokenize(tag))
            if all(t in hay for t in tokenize(query)) and all(t in doc.tags for t in tags):
                out.append(doc.ref)
        return sorted(out)

    for _ in range(100):
        query = " ".join(rng.choice(vocab + ["zzz"], size=int(rng.integers(0, 3))))
        tags = list(rng.choice(tag_pool, size=int(rng.integers(0, 3))))
        got = sorted(ref for ref, _ in search(index, query, tags))
        assert got == oracle(query, tags), (query, tags)

    emit_site(pages, index, tmp_path / "site_a")
    emit_site(pages, index, tmp_path / "site_b")
    for rel_a in sorted((tmp_path / "site_a").rglob("*")):
        if rel_a.is_file():
            rel = rel_a.relative_to(tmp_path / "site_a")
            assert rel_a.read_bytes() == (tmp_path / "site_b" / rel).read_bytes()
