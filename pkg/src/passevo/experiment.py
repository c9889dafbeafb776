"""Multi-trial orchestration: repeated evolution runs plus summary statistics.

Each trial gets its own seed (explicit list, or base seed + trial index) and
writes history.csv, best_individual.patch and best_sequence.txt into its own
subdirectory; summary.json at the experiment root collects the per-trial
scalars and the cross-trial t test. Trials run one after another: wall-clock
fitness must never compete with a sibling trial for the machine, and for the
simulated backend sequential execution simply keeps outputs reproducible
byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

from .catalog import (
    PassCatalog,
    PassSequence,
    builtin_baseline,
    builtin_catalog,
    load_catalog,
    load_sequence,
    serialize_sequence,
)
from .errors import ExecutionError, ValidationError
from .evolution import GAConfig, EvolutionHistory, GenerationRecord, evolve
from .fitness import (
    KIND_SIMULATED,
    BackendConfig,
    EvaluationCache,
    EvaluationRecord,
    EvaluationStatus,
    SimModel,
    evaluate,
    perturb_sequence,
    sequence_digest,
    simulated_record,
)
from .patches import Individual, apply_individual, serialize_individual
from .stats import SummaryStats, percent_improvement, summarize, DegenerateSampleError

BUILTIN_CATALOG = "builtin:catalog"
BUILTIN_BASELINE = "builtin:baseline"


class ConfigurationError(ValidationError):
    pass


class BaselineError(ExecutionError):
    """The unmodified baseline failed to compile or run; nothing to improve on."""


@dataclass(frozen=True)
class ExperimentConfig:
    catalog_path: str = BUILTIN_CATALOG
    baseline_path: str = BUILTIN_BASELINE
    ga: GAConfig = GAConfig()
    backend: BackendConfig = BackendConfig()
    trials: int = 8
    output_dir: str = "runs/experiment"
    seeds: tuple[int, ...] | None = None
    remeasure_baseline_per_trial: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.seeds is not None and len(self.seeds) != self.trials:
            raise ValueError(f"seeds list has {len(self.seeds)} entries for {self.trials} trials")

    def trial_seed(self, index: int) -> int:
        if self.seeds is not None:
            return self.seeds[index]
        return self.ga.rng_seed + index


@dataclass
class TrialResult:
    trial_index: int
    seed: int
    baseline_fitness: float
    best_fitness: float
    percent_improvement: float
    best_individual: Individual
    best_sequence: PassSequence
    history: EvolutionHistory
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def resolve_catalog(path: str) -> PassCatalog:
    if path == BUILTIN_CATALOG:
        return builtin_catalog()
    file = Path(path)
    if not file.is_file():
        raise ConfigurationError(f"catalog file not found: {path}")
    return load_catalog(file.read_text("utf-8"), source_label=path)


def resolve_sequence(path: str, catalog: PassCatalog) -> PassSequence:
    if path == BUILTIN_BASELINE:
        return builtin_baseline(catalog)
    file = Path(path)
    if not file.is_file():
        raise ConfigurationError(f"sequence file not found: {path}")
    return load_sequence(file.read_text("utf-8"), catalog, label=path)


RecordFn = Callable[[PassSequence], EvaluationRecord]


def build_record_fn(
    backend: BackendConfig,
    catalog: PassCatalog,
    baseline: PassSequence,
    cache_path: Path | None = None,
) -> RecordFn:
    """Wire a backend config into a memoized sequence -> record function."""
    if backend.kind == KIND_SIMULATED:
        if backend.sim_target_path:
            target = resolve_sequence(backend.sim_target_path, catalog)
        else:
            rng = random.Random(backend.sim_target_seed)
            target = perturb_sequence(baseline, catalog, backend.sim_target_edits, rng)
        model = SimModel(target=target, base_runtime=backend.sim_base_runtime)
        memo: dict[str, EvaluationRecord] = {}

        def record_fn(seq: PassSequence) -> EvaluationRecord:
            digest = sequence_digest(seq)
            hit = memo.get(digest)
            if hit is None:
                hit = memo[digest] = simulated_record(seq, model)
            return hit

        return record_fn

    cache = EvaluationCache(cache_path)
    return lambda seq: evaluate(seq, backend, cache)


def measure_baseline(cfg: ExperimentConfig) -> EvaluationRecord:
    """Score the unmodified baseline; a broken baseline is fatal."""
    catalog = resolve_catalog(cfg.catalog_path)
    baseline = resolve_sequence(cfg.baseline_path, catalog)
    record_fn = build_record_fn(cfg.backend, catalog, baseline)
    record = record_fn(baseline)
    if record.status is not EvaluationStatus.OK:
        raise BaselineError(
            f"baseline evaluation failed ({record.status.value}): {record.diagnostics}"
        )
    return record


ProgressFn = Callable[[int, GenerationRecord], None]


def run_trials(
    cfg: ExperimentConfig, progress: ProgressFn | None = None
) -> tuple[list[TrialResult], SummaryStats | None]:
    """Run every trial, write all artifacts under cfg.output_dir.

    A trial that errors out is recorded with its message and skipped by the
    summary; the summary covers however many trials completed (None if the
    completed improvements are too few or too flat for a t test).
    """
    from .config import write_config

    catalog = resolve_catalog(cfg.catalog_path)
    baseline = resolve_sequence(cfg.baseline_path, catalog)

    out_root = Path(cfg.output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    write_config(cfg, out_root / "effective_config.ini")

    cache_path = None
    if cfg.backend.kind != KIND_SIMULATED:
        cache_path = out_root / "eval_cache.jsonl"
    record_fn = build_record_fn(cfg.backend, catalog, baseline, cache_path)
    fitness_fn = lambda seq: record_fn(seq).fitness

    baseline_record = record_fn(baseline)
    if baseline_record.status is not EvaluationStatus.OK:
        raise BaselineError(
            f"baseline evaluation failed ({baseline_record.status.value}): "
            f"{baseline_record.diagnostics}"
        )

    def fresh_baseline_record() -> EvaluationRecord:
        # bypasses the cache so a re-measure is a real measurement
        if cfg.backend.kind == KIND_SIMULATED:
            return record_fn(baseline)
        return evaluate(baseline, cfg.backend, None)

    results: list[TrialResult] = []
    for index in range(cfg.trials):
        seed = cfg.trial_seed(index)
        if cfg.remeasure_baseline_per_trial and index > 0:
            baseline_record = fresh_baseline_record()
            if baseline_record.status is not EvaluationStatus.OK:
                raise BaselineError(
                    f"baseline re-measurement failed ({baseline_record.status.value}): "
                    f"{baseline_record.diagnostics}"
                )
        baseline_fitness = baseline_record.fitness
        trial_progress = None
        if progress is not None:
            trial_progress = lambda rec, _i=index: progress(_i, rec)
        try:
            ga = replace(cfg.ga, rng_seed=seed)
            best_ind, history = evolve(ga, baseline, catalog, fitness_fn, trial_progress)
            best_fitness = history.best_fitness()
            if not math.isfinite(best_fitness):
                raise ExecutionError("no candidate produced a finite fitness")
            result = TrialResult(
                trial_index=index,
                seed=seed,
                baseline_fitness=baseline_fitness,
                best_fitness=best_fitness,
                percent_improvement=percent_improvement(baseline_fitness, best_fitness),
                best_individual=best_ind,
                best_sequence=apply_individual(baseline, best_ind),
                history=history,
            )
            _write_trial(out_root / f"trial_{index}", result)
        except ExecutionError as exc:
            result = TrialResult(
                trial_index=index,
                seed=seed,
                baseline_fitness=baseline_fitness,
                best_fitness=float("nan"),
                percent_improvement=float("nan"),
                best_individual=Individual(),
                best_sequence=baseline,
                history=EvolutionHistory(),
                error=str(exc),
            )
        results.append(result)

    summary = None
    improvements = [r.percent_improvement for r in results if r.ok]
    if improvements:
        try:
            summary = summarize(improvements)
        except DegenerateSampleError:
            summary = SummaryStats(
                n=len(improvements),
                mean_improvement=sum(improvements) / len(improvements),
                sample_stddev=None,
                t_statistic=None,
                p_value_one_tailed=None,
            )
    _write_summary(out_root / "summary.json", results, summary)
    return results, summary


def write_history_csv(history: EvolutionHistory, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "best_fitness", "mean_fitness"])
        for rec in history:
            writer.writerow([rec.generation, repr(rec.best_fitness), repr(rec.mean_fitness)])


def _write_trial(trial_dir: Path, result: TrialResult) -> None:
    trial_dir.mkdir(parents=True, exist_ok=True)
    write_history_csv(result.history, trial_dir / "history.csv")
    (trial_dir / "best_individual.patch").write_text(
        serialize_individual(result.best_individual), "utf-8"
    )
    (trial_dir / "best_sequence.txt").write_text(
        serialize_sequence(result.best_sequence), "utf-8"
    )


def _write_summary(path: Path, results: list[TrialResult], summary: SummaryStats | None) -> None:
    trials = []
    for r in results:
        row: dict = {"trial_index": r.trial_index, "seed": r.seed}
        if r.ok:
            row.update(
                status="ok",
                baseline_fitness=r.baseline_fitness,
                best_fitness=r.best_fitness,
                percent_improvement=r.percent_improvement,
                generations=len(r.history),
            )
        else:
            row.update(status="failed", error=r.error)
        trials.append(row)
    doc = {
        "trials": trials,
        "summary": None
        if summary is None
        else {
            "n": summary.n,
            "mean_improvement": summary.mean_improvement,
            "sample_stddev": summary.sample_stddev,
            "t_statistic": summary.t_statistic,
            "p_value_one_tailed": summary.p_value_one_tailed,
        },
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", "utf-8")
