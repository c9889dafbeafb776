"""Fitness backends: external compile-and-time pipeline and simulated landscape.

A candidate sequence is scored by compiling a target program with it and
averaging wall-clock runtimes over a fixed number of runs, or, for
toolchain-free work, by a deterministic model that scores sequences by edit
distance to a hidden target. Failures (compile errors, crashes, timeouts)
never raise out of an evaluation: they produce a record whose fitness is
PENALTY, a value strictly worse than any measured runtime, so the search
simply moves past broken candidates.

Timing runs for one record are strictly sequential to avoid self-contention
skew; concurrency, if any, belongs at the compilation level and must go
through the cache, which keeps the first record written per digest.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import random
import shlex
import statistics
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .catalog import PassCatalog, PassSequence

PENALTY = float("inf")

KIND_EXTERNAL = "external_compiler"
KIND_SIMULATED = "simulated"


class EvaluationStatus(enum.Enum):
    OK = "ok"
    COMPILE_ERROR = "compile_error"
    RUN_ERROR = "run_error"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class BackendConfig:
    """Everything an evaluation needs; command templates use the placeholders
    {source}, {ir}, {passes}, {passes_csv} and {output}."""

    kind: str = KIND_SIMULATED
    source_path: str = ""
    compiler_front_command: str = ""
    optimizer_command: str = ""
    linker_command: str = ""
    runs_per_eval: int = 40
    run_timeout: float = 10.0
    compile_timeout: float = 60.0
    program_args: tuple[str, ...] = ()
    workdir: str = ""
    sim_base_runtime: float = 1.0
    sim_target_path: str = ""
    sim_target_edits: int = 2
    sim_target_seed: int = 0

    def __post_init__(self):
        if self.kind not in (KIND_EXTERNAL, KIND_SIMULATED):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.runs_per_eval < 1:
            raise ValueError("runs_per_eval must be >= 1")
        if self.run_timeout <= 0 or self.compile_timeout <= 0:
            raise ValueError("timeouts must be > 0")
        if self.sim_base_runtime <= 0:
            raise ValueError("sim_base_runtime must be > 0")
        if self.sim_target_edits < 0:
            raise ValueError("sim_target_edits must be >= 0")


@dataclass(frozen=True)
class EvaluationRecord:
    """Outcome of scoring one sequence.

    For a fresh status=ok record, samples holds one wall-clock figure per run
    and mean/sample_stddev summarize them. Records reloaded from a persisted
    cache carry the summary statistics only (samples is empty).
    """

    sequence_digest: str
    runs: int
    samples: tuple[float, ...]
    mean: float
    sample_stddev: float
    status: EvaluationStatus
    diagnostics: str = ""

    @property
    def fitness(self) -> float:
        return self.mean if self.status is EvaluationStatus.OK else PENALTY


def sequence_digest(seq: PassSequence) -> str:
    """Stable, order-sensitive hash of the pass list."""
    return hashlib.sha256("\n".join(seq.passes).encode("utf-8")).hexdigest()


class EvaluationCache:
    """Digest-keyed record store, optionally persisted as JSON lines.

    put() keeps the first record per digest; concurrent writers therefore
    agree on one canonical record. Records are immutable once stored.
    """

    def __init__(self, path: Path | str | None = None):
        self._records: dict[str, EvaluationRecord] = {}
        self._lock = threading.Lock()
        self._path = Path(path) if path is not None else None
        if self._path is not None and self._path.exists():
            for line in self._path.read_text("utf-8").splitlines():
                if not line.strip():
                    continue
                row = json.loads(line)
                record = EvaluationRecord(
                    sequence_digest=row["digest"],
                    runs=int(row["runs"]),
                    samples=(),
                    mean=PENALTY if row["mean"] is None else float(row["mean"]),
                    sample_stddev=0.0 if row["stddev"] is None else float(row["stddev"]),
                    status=EvaluationStatus(row["status"]),
                )
                self._records.setdefault(record.sequence_digest, record)

    def __len__(self) -> int:
        return len(self._records)

    def get(self, digest: str) -> EvaluationRecord | None:
        with self._lock:
            return self._records.get(digest)

    def put(self, record: EvaluationRecord) -> EvaluationRecord:
        with self._lock:
            existing = self._records.get(record.sequence_digest)
            if existing is not None:
                return existing
            self._records[record.sequence_digest] = record
            if self._path is not None:
                row = {
                    "digest": record.sequence_digest,
                    "status": record.status.value,
                    "runs": record.runs,
                    "mean": record.mean if math.isfinite(record.mean) else None,
                    "stddev": record.sample_stddev if math.isfinite(record.sample_stddev) else None,
                }
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(row, sort_keys=True) + "\n")
            return record


@dataclass(frozen=True)
class RunResult:
    seconds: float
    returncode: int | None
    timed_out: bool
    output: str


def time_execution(argv: list[str], timeout: float) -> RunResult:
    """Wall-clock one process from spawn to exit, killing it at `timeout`."""
    start = time.perf_counter()
    try:
        proc = subprocess.run(
            argv,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            timeout=timeout,
            text=True,
            errors="replace",
        )
    except subprocess.TimeoutExpired as exc:
        out = exc.output
        if isinstance(out, bytes):
            out = out.decode("utf-8", "replace")
        return RunResult(time.perf_counter() - start, None, True, out or "")
    except OSError as exc:
        return RunResult(time.perf_counter() - start, None, False, f"spawn failed: {exc}")
    return RunResult(time.perf_counter() - start, proc.returncode, False, proc.stdout or "")


def expand_command(template: str, substitutions: dict[str, str], passes: tuple[str, ...]) -> list[str]:
    """Split a command template and fill its placeholders.

    A bare {passes} token expands to one argv entry per pass, in order;
    {passes_csv} expands in place to the comma-joined names with leading
    dashes stripped (the new-pass-manager style).
    """
    argv: list[str] = []
    csv = ",".join(name.lstrip("-") for name in passes)
    for token in shlex.split(template):
        if token == "{passes}":
            argv.extend(passes)
            continue
        token = token.replace("{passes_csv}", csv)
        for key, val in substitutions.items():
            token = token.replace("{" + key + "}", val)
        argv.append(token)
    return argv


class CompileFailure(Exception):
    def __init__(self, status: EvaluationStatus, diagnostics: str):
        super().__init__(diagnostics)
        self.status = status
        self.diagnostics = diagnostics


def build_executable(seq: PassSequence, cfg: BackendConfig, build_dir: Path) -> Path:
    """Run front-end, optimizer and linker; return the executable path.

    Raises CompileFailure with the failing stage's captured output.
    """
    ir = build_dir / "program.ir"
    optimized = build_dir / "program.opt.ir"
    exe = build_dir / "program.bin"
    stages = (
        ("front-end", cfg.compiler_front_command, {"source": cfg.source_path, "ir": str(ir)}),
        ("optimizer", cfg.optimizer_command, {"ir": str(ir), "output": str(optimized)}),
        ("linker", cfg.linker_command, {"ir": str(optimized), "output": str(exe)}),
    )
    for name, template, subs in stages:
        argv = expand_command(template, subs, seq.passes)
        result = time_execution(argv, cfg.compile_timeout)
        if result.timed_out:
            raise CompileFailure(EvaluationStatus.TIMEOUT, f"{name} timed out:\n{result.output}")
        if result.returncode != 0:
            raise CompileFailure(
                EvaluationStatus.COMPILE_ERROR,
                f"{name} failed (exit {result.returncode}):\n{result.output}",
            )
    return exe


def _failure(digest: str, cfg: BackendConfig, status: EvaluationStatus, diagnostics: str) -> EvaluationRecord:
    return EvaluationRecord(
        sequence_digest=digest,
        runs=cfg.runs_per_eval,
        samples=(),
        mean=PENALTY,
        sample_stddev=0.0,
        status=status,
        diagnostics=diagnostics,
    )


def evaluate(seq: PassSequence, cfg: BackendConfig, cache: EvaluationCache | None = None) -> EvaluationRecord:
    """Compile with the candidate sequence and time it runs_per_eval times.

    Total by design: every failure mode comes back as a record, never as an
    exception, and the cache short-circuits repeat evaluations by digest.
    """
    if cfg.kind != KIND_EXTERNAL:
        raise ValueError("evaluate() drives the external toolchain; use simulated_fitness for models")
    digest = sequence_digest(seq)
    if cache is not None:
        hit = cache.get(digest)
        if hit is not None:
            return hit

    workdir = cfg.workdir or None
    if workdir is not None:
        Path(workdir).mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(prefix="passevo-", dir=workdir) as tmp:
        try:
            exe = build_executable(seq, cfg, Path(tmp))
        except CompileFailure as fail:
            record = _failure(digest, cfg, fail.status, fail.diagnostics)
            return cache.put(record) if cache is not None else record

        samples: list[float] = []
        argv = [str(exe), *cfg.program_args]
        for _ in range(cfg.runs_per_eval):
            result = time_execution(argv, cfg.run_timeout)
            if result.timed_out:
                record = _failure(digest, cfg, EvaluationStatus.TIMEOUT, f"run timed out:\n{result.output}")
                return cache.put(record) if cache is not None else record
            if result.returncode != 0:
                record = _failure(
                    digest, cfg, EvaluationStatus.RUN_ERROR,
                    f"run failed (exit {result.returncode}):\n{result.output}",
                )
                return cache.put(record) if cache is not None else record
            samples.append(result.seconds)

    record = EvaluationRecord(
        sequence_digest=digest,
        runs=cfg.runs_per_eval,
        samples=tuple(samples),
        mean=statistics.fmean(samples),
        sample_stddev=statistics.stdev(samples) if len(samples) > 1 else 0.0,
        status=EvaluationStatus.OK,
    )
    return cache.put(record) if cache is not None else record


def edit_distance(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    """Element-level Levenshtein distance (insert/delete/substitute)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        current = [i]
        for j, y in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (x != y)))
        previous = current
    return previous[-1]


@dataclass(frozen=True)
class SimModel:
    """Hidden-target landscape: fitness grows with distance from the target."""

    target: PassSequence
    base_runtime: float

    def __post_init__(self):
        if self.base_runtime <= 0:
            raise ValueError("base_runtime must be > 0")


def simulated_fitness(seq: PassSequence, model: SimModel) -> float:
    distance = edit_distance(seq.passes, model.target.passes)
    return model.base_runtime * (1.0 + distance / max(len(model.target), 1))


def simulated_record(seq: PassSequence, model: SimModel) -> EvaluationRecord:
    value = simulated_fitness(seq, model)
    return EvaluationRecord(
        sequence_digest=sequence_digest(seq),
        runs=1,
        samples=(value,),
        mean=value,
        sample_stddev=0.0,
        status=EvaluationStatus.OK,
    )


def perturb_sequence(
    baseline: PassSequence, catalog: PassCatalog, n_edits: int, rng: random.Random
) -> PassSequence:
    """Derive a sequence exactly n_edits element-edits away from baseline.

    Composed random edits can cancel, so the draw is retried until the edit
    distance verifiably equals n_edits.
    """
    if n_edits == 0:
        return PassSequence(baseline.passes, label="sim-target")
    for _ in range(1000):
        passes = list(baseline.passes)
        for _ in range(n_edits):
            ops = ["insert"]
            if passes:
                ops += ["delete", "replace"]
            op = rng.choice(ops)
            if op == "insert":
                passes.insert(rng.randint(0, len(passes)), rng.choice(catalog.passes))
            elif op == "delete":
                del passes[rng.randrange(len(passes))]
            else:
                i = rng.randrange(len(passes))
                others = [p for p in catalog.passes if p != passes[i]]
                if not others:
                    continue
                passes[i] = rng.choice(others)
        candidate = PassSequence(tuple(passes), label="sim-target")
        if edit_distance(candidate.passes, baseline.passes) == n_edits:
            return candidate
    raise ValueError(f"could not construct a target {n_edits} edits from the baseline")
