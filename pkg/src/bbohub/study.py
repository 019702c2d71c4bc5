"""Studies and trials: the ask/tell loop over a declared search space.

A study owns trial state, delegates suggestions to its bound sampler, and
optionally journals every mutation so it can be reconstructed by replay.
All state mutations are serialized through one lock per study, so concurrent
ask/tell from worker threads is safe.
"""

from __future__ import annotations

import enum
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Mapping, Protocol, Sequence

from . import journal as journal_mod
from .errors import (
    ConfigurationError,
    JournalCorruptionError,
    NotFoundError,
    PluginContractError,
    PluginError,
    SamplerContractError,
    SamplerError,
    ValidationError,
)
from .journal import JournalRecord, JournalWriter
from .space import Direction, ParamValue, SearchSpace

if TYPE_CHECKING:
    from .samplers.base import Sampler


class TrialState(enum.Enum):
    RUNNING = "running"
    COMPLETE = "complete"
    FAILED = "failed"


@dataclass
class Trial:
    """One parameter suggestion plus its evaluation outcome.

    ``values`` is present iff the trial completed; its length equals the
    number of study directions.
    """

    id: int
    params: dict[str, ParamValue]
    state: TrialState = TrialState.RUNNING
    values: list[float] | None = None

    @property
    def is_complete(self) -> bool:
        return self.state is TrialState.COMPLETE

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "params": dict(self.params),
            "state": self.state.value,
            "values": None if self.values is None else list(self.values),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Trial":
        return cls(
            id=int(data["id"]),
            params=dict(data["params"]),
            state=TrialState(data["state"]),
            values=None if data.get("values") is None else [float(v) for v in data["values"]],
        )


class ProblemLike(Protocol):
    """Structural contract for anything a study can optimize against."""

    search_space: SearchSpace
    directions: list[Direction]

    def evaluate(self, params: Mapping[str, ParamValue]) -> list[float]: ...


@dataclass
class StudyConfig:
    directions: list[Direction]
    search_space: SearchSpace
    seed: int
    sampler: "Sampler"

    def __post_init__(self):
        self.directions = [Direction.parse(d) for d in self.directions]
        if not self.directions:
            raise ValidationError("a study requires at least one direction")
        if not isinstance(self.search_space, SearchSpace):
            raise ValidationError("search_space must be a SearchSpace")
        if not (0 <= int(self.seed) < 2**64):
            raise ValidationError("seed must fit in 64 unsigned bits")
        self.seed = int(self.seed)
        for name, dist in self.search_space:
            try:
                dist.validate()
            except ValidationError as exc:
                raise ValidationError(f"parameter {name!r}: {exc}") from None


class Study:
    """A single optimization run: dense-id trials driven by one sampler."""

    def __init__(self, config: StudyConfig, journal: JournalWriter | None = None, _replaying: bool = False):
        self.config = config
        self._trials: list[Trial] = []
        self._lock = threading.RLock()
        self._journal = journal
        if journal is not None and not _replaying:
            journal.append(journal_mod.KIND_STUDY_CREATED, self._created_payload())

    # -- introspection -------------------------------------------------

    @property
    def directions(self) -> list[Direction]:
        return self.config.directions

    @property
    def search_space(self) -> SearchSpace:
        return self.config.search_space

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def sampler(self) -> "Sampler":
        return self.config.sampler

    @property
    def trials(self) -> list[Trial]:
        with self._lock:
            return list(self._trials)

    @property
    def n_trials(self) -> int:
        with self._lock:
            return len(self._trials)

    def get_trial(self, trial_id: int) -> Trial:
        with self._lock:
            if 0 <= trial_id < len(self._trials):
                return self._trials[trial_id]
        raise NotFoundError(f"no trial with id {trial_id}")

    def completed_trials(self) -> list[Trial]:
        with self._lock:
            return [t for t in self._trials if t.is_complete]

    # -- ask / tell ----------------------------------------------------

    def ask(self) -> Trial:
        """Request the next suggestion from the bound sampler.

        A suggestion outside the declared space is recorded as a failed trial
        (so ids stay dense) and raised as :class:`SamplerContractError`;
        any other sampler failure is raised as :class:`SamplerError` carrying
        the sampler identity.
        """
        with self._lock:
            trial_id = len(self._trials)
            history = [t for t in self._trials if t.is_complete]
            ref = getattr(self.sampler, "ref", type(self.sampler).__name__)
            try:
                raw = self.sampler.ask(self.search_space, self.directions, trial_id, history, self.seed)
            except (ConfigurationError, ValidationError):
                raise
            except PluginContractError as exc:
                self._record_contract_violation(trial_id, exc.params or {})
                raise SamplerContractError(
                    f"sampler {ref} violated the search-space contract: {exc}", ref, exc.params
                ) from exc
            except PluginError as exc:
                raise SamplerError(f"sampler {ref} failed: {exc}", ref) from exc
            except Exception as exc:
                raise SamplerError(f"sampler {ref} failed: {exc}", ref) from exc

            try:
                params = self.search_space.validate_params(raw)
            except ValidationError as exc:
                self._record_contract_violation(trial_id, raw if isinstance(raw, dict) else {})
                raise SamplerContractError(
                    f"sampler {ref} violated the search-space contract: {exc}", ref,
                    raw if isinstance(raw, dict) else None,
                ) from exc

            trial = Trial(id=trial_id, params=params)
            self._trials.append(trial)
            self._journal_append(journal_mod.KIND_TRIAL_ASKED, {"trial_id": trial_id, "params": params})
            return trial

    def tell(self, trial_id: int, values: Sequence[float] | None = None, *, failed: bool = False) -> Trial:
        """Record the outcome of a running trial (values, or a failure)."""
        if failed and values is not None:
            raise ValidationError("tell() accepts values or failed=True, not both")
        if not failed and values is None:
            raise ValidationError("tell() requires values unless failed=True")
        with self._lock:
            trial = self.get_trial(trial_id)
            if trial.state is not TrialState.RUNNING:
                raise ValidationError(f"trial {trial_id} is already {trial.state.value}")
            if failed:
                trial.state = TrialState.FAILED
                payload = {"trial_id": trial_id, "state": TrialState.FAILED.value}
            else:
                vals = [float(v) for v in values]
                if len(vals) != len(self.directions):
                    raise ValidationError(
                        f"expected {len(self.directions)} objective values, got {len(vals)}"
                    )
                if any(not math.isfinite(v) for v in vals):
                    raise ValidationError(f"objective values must be finite, got {vals}")
                trial.state = TrialState.COMPLETE
                trial.values = vals
                payload = {"trial_id": trial_id, "state": TrialState.COMPLETE.value, "values": vals}
            self._journal_append(journal_mod.KIND_TRIAL_TOLD, payload)
            self.sampler.tell(trial)
            return trial

    # -- results -------------------------------------------------------

    def best_trial(self) -> Trial:
        """Best complete trial of a single-objective study; ties go to the
        lowest trial id."""
        if len(self.directions) != 1:
            raise ConfigurationError("best_trial is defined for single-objective studies; use pareto_front")
        completed = self.completed_trials()
        if not completed:
            raise NotFoundError("study has no complete trials")
        maximize = self.directions[0] is Direction.MAXIMIZE
        best = completed[0]
        for trial in completed[1:]:
            if (trial.values[0] > best.values[0]) if maximize else (trial.values[0] < best.values[0]):
                best = trial
        return best

    def pareto_front(self) -> list[Trial]:
        """All complete trials not dominated by another, ordered by id."""
        completed = self.completed_trials()
        if not completed:
            raise NotFoundError("study has no complete trials")
        front = [
            t for t in completed
            if not any(dominates(o.values, t.values, self.directions) for o in completed)
        ]
        return sorted(front, key=lambda t: t.id)

    # -- optimization loop ----------------------------------------------

    def optimize(self, problem: ProblemLike, n_trials: int, workers: int = 1) -> "Study":
        """Run ``n_trials`` ask/evaluate/tell rounds against a problem.

        Evaluation exceptions (and sampler contract violations) become failed
        trials; the loop keeps going. Any other sampler failure aborts.
        """
        if list(problem.directions) != list(self.directions):
            raise ConfigurationError(
                f"problem directions {[d.value for d in problem.directions]} do not match "
                f"study directions {[d.value for d in self.directions]}"
            )
        if problem.search_space != self.search_space:
            raise ConfigurationError("problem search space does not match the study search space")
        if n_trials < 0:
            raise ValidationError("n_trials must be >= 0")

        def run_one() -> None:
            try:
                trial = self.ask()
            except SamplerContractError:
                return  # failed trial already recorded; keep going
            try:
                values = problem.evaluate(trial.params)
            except Exception:
                self.tell(trial.id, failed=True)
                return
            try:
                self.tell(trial.id, values)
            except ValidationError:
                # wrong arity / non-finite values from a flaky problem
                self.tell(trial.id, failed=True)

        if workers <= 1:
            for _ in range(n_trials):
                run_one()
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(run_one) for _ in range(n_trials)]
                for fut in futures:
                    fut.result()
        return self

    # -- journal -------------------------------------------------------

    @property
    def journal_path(self) -> Path | None:
        return self._journal.path if self._journal else None

    def _created_payload(self) -> dict:
        sampler_options = getattr(self.sampler, "options", None) or {}
        return {
            "directions": [d.value for d in self.directions],
            "search_space": self.search_space.to_dict(),
            "seed": self.seed,
            "sampler": {"ref": getattr(self.sampler, "ref", "unknown"), "options": dict(sampler_options)},
        }

    def _journal_append(self, kind: str, payload: dict) -> None:
        if self._journal is not None:
            self._journal.append(kind, payload)

    def _record_contract_violation(self, trial_id: int, params: dict) -> None:
        # Keep ids dense: the bad suggestion is preserved verbatim as a failed
        # trial rather than silently dropped.
        trial = Trial(id=trial_id, params=dict(params), state=TrialState.FAILED)
        self._trials.append(trial)
        self._journal_append(journal_mod.KIND_TRIAL_ASKED, {"trial_id": trial_id, "params": dict(params)})
        self._journal_append(journal_mod.KIND_TRIAL_TOLD, {"trial_id": trial_id, "state": TrialState.FAILED.value})

    def close(self) -> None:
        if self._journal is not None:
            self._journal.close()


def dominates(a: Sequence[float], b: Sequence[float], directions: Sequence[Direction]) -> bool:
    """True if ``a`` is at least as good as ``b`` everywhere and strictly
    better in at least one objective."""
    if len(a) != len(b) or len(a) != len(directions):
        raise ValidationError("objective vectors must match the direction count")
    at_least_as_good = True
    strictly_better = False
    for va, vb, d in zip(a, b, directions):
        if d is Direction.MAXIMIZE:
            va, vb = -va, -vb
        if va > vb:
            at_least_as_good = False
            break
        if va < vb:
            strictly_better = True
    return at_least_as_good and strictly_better


def create_study(config: StudyConfig, journal_path: str | Path | None = None) -> Study:
    """Create an empty study; if ``journal_path`` is given, every mutation is
    journaled and the file starts with one study_created record."""
    writer = JournalWriter(journal_path) if journal_path is not None else None
    return Study(config, journal=writer)


SamplerResolver = Callable[[str, dict, int], "Sampler"]


def _default_resolver(ref: str, options: dict, seed: int) -> "Sampler":
    """Builtin refs resolve to live samplers; anything else (plugin-backed
    studies replayed without a resolver) yields a placeholder so the study
    state is still reconstructable."""
    from .errors import BindingError
    from .samplers import make_builtin_sampler
    from .samplers.base import Sampler as SamplerBase

    try:
        return make_builtin_sampler(ref, options)
    except BindingError:
        class _Unresolved(SamplerBase):
            def __init__(self):
                self.ref = ref
                self.options = dict(options)

            def ask(self, space, directions, trial_id, history, seed):
                raise SamplerError(
                    f"sampler {ref} cannot be rebuilt by the default resolver; "
                    "pass resolve_sampler to replay_journal", ref,
                )

        return _Unresolved()


def replay_journal(records: Sequence[JournalRecord], resolve_sampler: SamplerResolver | None = None) -> Study:
    """Reconstruct a study from journal records.

    Records must carry valid checksums and contiguous seq numbers from 0 and
    begin with study_created. A journal ending in trial_asked yields a study
    whose last trial is still running; asking again continues from the next
    dense id.
    """
    records = journal_mod.check_sequence(records)
    if not records or records[0].kind != journal_mod.KIND_STUDY_CREATED:
        raise JournalCorruptionError("journal must begin with a study_created record", seq=0)
    created = records[0].payload
    resolver = resolve_sampler or _default_resolver
    space = SearchSpace.from_dict(created["search_space"])
    seed = int(created["seed"])
    sampler_info = created.get("sampler", {})
    sampler = resolver(sampler_info.get("ref", "unknown"), sampler_info.get("options", {}), seed)
    config = StudyConfig(
        directions=[Direction.parse(d) for d in created["directions"]],
        search_space=space,
        seed=seed,
        sampler=sampler,
    )
    study = Study(config)
    for record in records[1:]:
        payload = record.payload
        if record.kind == journal_mod.KIND_STUDY_CREATED:
            raise JournalCorruptionError(f"record {record.seq}: duplicate study_created", seq=record.seq)
        if record.kind == journal_mod.KIND_TRIAL_ASKED:
            trial_id = int(payload["trial_id"])
            if trial_id != len(study._trials):
                raise JournalCorruptionError(f"record {record.seq}: non-dense trial id {trial_id}", seq=record.seq)
            # Bounds are not re-checked here: contract-violation trials are
            # journaled with their raw params on purpose.
            study._trials.append(Trial(id=trial_id, params=dict(payload["params"])))
        elif record.kind == journal_mod.KIND_TRIAL_TOLD:
            trial_id = int(payload["trial_id"])
            if not (0 <= trial_id < len(study._trials)):
                raise JournalCorruptionError(f"record {record.seq}: told unknown trial {trial_id}", seq=record.seq)
            trial = study._trials[trial_id]
            if trial.state is not TrialState.RUNNING:
                raise JournalCorruptionError(f"record {record.seq}: trial {trial_id} told twice", seq=record.seq)
            state = TrialState(payload["state"])
            if state is TrialState.COMPLETE:
                trial.values = [float(v) for v in payload["values"]]
            trial.state = state
    return study


def resume_study(journal_path: str | Path, resolve_sampler: SamplerResolver | None = None) -> Study:
    """Replay a journal file and reattach it for appends."""
    records = journal_mod.read_journal(journal_path)
    study = replay_journal(records, resolve_sampler=resolve_sampler)
    study._journal = JournalWriter(journal_path)
    return study
