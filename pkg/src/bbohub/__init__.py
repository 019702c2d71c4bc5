"""bbohub: a self-contained black-box optimization hub.

An ask/tell optimization engine with uniform sampler/problem contracts, a
package registry with content-addressed offline caching and a cross-language
subprocess plugin protocol, and a README-driven package catalog with
full-text and tag search.

Quick start::

    from bbohub import load_module, StudyConfig, create_study

    sampler = load_module("samplers/auto_sampler").instantiate()
    problem = load_module("benchmarks/bbob").instantiate(function_id=1, dimension=2)
    study = create_study(StudyConfig(
        directions=problem.directions,
        search_space=problem.search_space,
        seed=0,
        sampler=sampler,
    ))
    study.optimize(problem, n_trials=100)
    print(study.best_trial().values)
"""

from .benchmarks import BenchmarkSpec, Problem, make_bbob, make_bi_sphere
from .errors import BboHubError
from .journal import JournalRecord, JournalWriter, read_journal
from .registry import (
    CacheEntry,
    LoadedPackage,
    PackageCache,
    PackageManifest,
    PackageRef,
    fetch_package,
    load_module,
    parse_ref,
    validate_package,
)
from .space import Direction, Distribution, SearchSpace, categorical_param, float_param, int_param, space_of
from .study import (
    Study,
    StudyConfig,
    Trial,
    TrialState,
    create_study,
    replay_journal,
    resume_study,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BboHubError",
    "BenchmarkSpec",
    "Problem",
    "make_bbob",
    "make_bi_sphere",
    "JournalRecord",
    "JournalWriter",
    "read_journal",
    "CacheEntry",
    "LoadedPackage",
    "PackageCache",
    "PackageManifest",
    "PackageRef",
    "fetch_package",
    "load_module",
    "parse_ref",
    "validate_package",
    "Direction",
    "Distribution",
    "SearchSpace",
    "space_of",
    "float_param",
    "int_param",
    "categorical_param",
    "Study",
    "StudyConfig",
    "Trial",
    "TrialState",
    "create_study",
    "replay_journal",
    "resume_study",
]
