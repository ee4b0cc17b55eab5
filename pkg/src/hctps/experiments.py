"""Two-phase experiment control: repeated GA runs, statistics, persistence.

An experiment is a global phase over the full search cube followed by any
number of decision-maker-chosen local phases. Records are append-only and
serialize to line-delimited JSON (header line, one line per phase, trailing
sha256 checksum line) so the file grows with the steering loop. All bounds
are stored as decimal strings to keep them exact; everything else uses
doubles, which round-trip through the serializer.
"""
from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable

from .benchmarks import FunctionId, make_budget
from .errors import (
    CorruptRecord,
    EmptySample,
    MismatchedExperiment,
    NoPhases,
)
from .ga import GAConfig, RunResult, run_ga
from .geometry import Box, SubcubeSpec

SCHEMA_VERSION = 1
FILE_KIND = "hctps-experiment"

STATUS_RUNNING = "running"
STATUS_AWAITING = "awaiting_decision"
STATUS_SATISFIED = "satisfied"

GLOBAL = "global"
LOCAL = "local"


def search_cube(dim: int) -> Box:
    """The protocol search cube [-100, 100]^dim."""
    return Box.cube(-100.0, 100.0, dim)


@dataclass
class RunStats:
    mean: float
    best: float
    worst: float
    median: float
    st_dev: float
    n_runs: int
    wall_time_s: float = 0.0


@dataclass
class PhaseResult:
    phase: str  # GLOBAL or LOCAL
    region: Box
    subcube_spec: SubcubeSpec | None
    seed_base: int
    runs: list[RunResult]
    stats: RunStats


@dataclass
class ExperimentRecord:
    experiment_id: str
    fid: FunctionId
    dim: int
    ga_config: GAConfig
    phases: list[PhaseResult] = field(default_factory=list)
    status: str = STATUS_RUNNING

    def append_phase(self, phase: PhaseResult) -> int:
        if not self.phases and phase.phase != GLOBAL:
            raise ValueError("first phase must be the global phase")
        if self.phases and phase.phase == GLOBAL:
            raise ValueError("only one global phase per experiment")
        self.phases.append(phase)
        return len(self.phases) - 1


def compute_stats(values: list[float], wall_time_s: float = 0.0) -> RunStats:
    """Mean / min / max / middle-element median / (n-1)-denominator st.dev."""
    n = len(values)
    if n == 0:
        raise EmptySample("no values to aggregate")
    mean = sum(values) / n
    ordered = sorted(values)
    if n % 2 == 1:
        median = ordered[n // 2]
    else:
        median = (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0
    if n > 1:
        st_dev = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))
    else:
        st_dev = 0.0
    return RunStats(
        mean=mean,
        best=min(values),
        worst=max(values),
        median=median,
        st_dev=st_dev,
        n_runs=n,
        wall_time_s=wall_time_s,
    )


def run_phase(
    fid: FunctionId,
    region: Box,
    config: GAConfig,
    n_runs: int,
    phase: str = LOCAL,
    subcube_spec: SubcubeSpec | None = None,
    seed_base: int | None = None,
    budget_per_dim: int = 50,
    on_run_complete: Callable[[int, int], None] | None = None,
) -> PhaseResult:
    """Execute n_runs independent GA runs (seeds seed_base + run index,
    fresh budget each) and aggregate their best values."""
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    base = config.seed if seed_base is None else seed_base
    t0 = time.perf_counter()
    runs: list[RunResult] = []
    for i in range(n_runs):
        budget = make_budget(region.dim, per_dim=budget_per_dim)
        runs.append(run_ga(fid, region, replace(config, seed=base + i), budget))
        if on_run_complete is not None:
            on_run_complete(i + 1, n_runs)
    wall = time.perf_counter() - t0
    stats = compute_stats([r.best_value for r in runs], wall_time_s=wall)
    return PhaseResult(
        phase=phase,
        region=region,
        subcube_spec=subcube_spec,
        seed_base=base,
        runs=runs,
        stats=stats,
    )


def hctps_best(record: ExperimentRecord) -> tuple[float, tuple[float, ...], int]:
    """Minimum best value over every run of every phase; earliest phase and
    earliest run win ties. Returns (value, point, phase index)."""
    if not record.phases:
        raise NoPhases(record.experiment_id)
    best_value = math.inf
    best_point: tuple[float, ...] = ()
    best_phase = -1
    for p_idx, phase in enumerate(record.phases):
        for run in phase.runs:
            if run.best_value < best_value:
                best_value = run.best_value
                best_point = run.best_point
                best_phase = p_idx
    return best_value, best_point, best_phase


def _stats_columns(stats: RunStats) -> dict:
    return {
        "mean": stats.mean,
        "best": stats.best,
        "worst": stats.worst,
        "median": stats.median,
        "st_dev": stats.st_dev,
    }


def comparison_row(standalone: PhaseResult, record: ExperimentRecord) -> dict:
    """Side-by-side stats: the two-phase column carries the winning phase's
    stats (the phase containing the overall best run)."""
    if standalone.region.dim != record.dim:
        raise MismatchedExperiment(
            f"standalone dim {standalone.region.dim} vs experiment dim {record.dim}"
        )
    _, _, winning = hctps_best(record)
    return {
        "id": record.fid.name,
        "name": record.fid.value,
        "HCTPS": _stats_columns(record.phases[winning].stats),
        "GA": _stats_columns(standalone.stats),
        "winning_phase_index": winning,
    }


# ---------------------------------------------------------------------------
# Serialization


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _box_to_json(box: Box) -> dict:
    return {"lo": [repr(v) for v in box.lo], "hi": [repr(v) for v in box.hi]}


def _box_from_json(data: dict) -> Box:
    return Box(tuple(float(v) for v in data["lo"]), tuple(float(v) for v in data["hi"]))


def _phase_to_json(phase: PhaseResult) -> dict:
    return {
        "phase": phase.phase,
        "region": _box_to_json(phase.region),
        "subcube_spec": None if phase.subcube_spec is None else asdict(phase.subcube_spec),
        "seed_base": phase.seed_base,
        "stats": asdict(phase.stats),
        "runs": [
            {
                "seed": r.seed,
                "best_value": r.best_value,
                "best_point": list(r.best_point),
                "evaluations_used": r.evaluations_used,
                "generation_best_history": r.generation_best_history,
            }
            for r in phase.runs
        ],
    }


def _phase_from_json(data: dict) -> PhaseResult:
    spec = data["subcube_spec"]
    return PhaseResult(
        phase=data["phase"],
        region=_box_from_json(data["region"]),
        subcube_spec=None if spec is None else SubcubeSpec(**spec),
        seed_base=data["seed_base"],
        runs=[
            RunResult(
                best_value=r["best_value"],
                best_point=tuple(r["best_point"]),
                evaluations_used=r["evaluations_used"],
                generation_best_history=list(r["generation_best_history"]),
                seed=r["seed"],
            )
            for r in data["runs"]
        ],
        stats=RunStats(**data["stats"]),
    )


def record_lines(record: ExperimentRecord, zero_wall_time: bool = False) -> list[str]:
    """Serialized lines (header + phases), without the checksum line.

    ``zero_wall_time`` normalizes the one hardware-dependent field so replays
    can be compared byte for byte.
    """
    header = {
        "kind": FILE_KIND,
        "schema_version": SCHEMA_VERSION,
        "experiment_id": record.experiment_id,
        "fid": record.fid.name,
        "dim": record.dim,
        "ga_config": asdict(record.ga_config),
        "status": record.status,
    }
    lines = [_dump(header)]
    for phase in record.phases:
        data = _phase_to_json(phase)
        if zero_wall_time:
            data["stats"]["wall_time_s"] = 0.0
        lines.append(_dump(data))
    return lines


def canonical_bytes(record: ExperimentRecord, zero_wall_time: bool = False) -> bytes:
    body = "".join(line + "\n" for line in record_lines(record, zero_wall_time))
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return (body + _dump({"checksum": digest}) + "\n").encode("utf-8")


def persist(record: ExperimentRecord, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(canonical_bytes(record))
    return path


def load(path: Path) -> ExperimentRecord:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptRecord(str(exc)) from None
    lines = text.splitlines()
    if len(lines) < 2:
        raise CorruptRecord("file too short")
    body = "".join(line + "\n" for line in lines[:-1])
    try:
        trailer = json.loads(lines[-1])
        expected = trailer["checksum"]
    except (json.JSONDecodeError, TypeError, KeyError):
        raise CorruptRecord("missing checksum line") from None
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if digest != expected:
        raise CorruptRecord("checksum mismatch")
    try:
        header = json.loads(lines[0])
        if header.get("kind") != FILE_KIND:
            raise CorruptRecord(f"unexpected kind {header.get('kind')!r}")
        if header.get("schema_version") != SCHEMA_VERSION:
            raise CorruptRecord(f"unsupported schema version {header.get('schema_version')!r}")
        record = ExperimentRecord(
            experiment_id=header["experiment_id"],
            fid=FunctionId[header["fid"]],
            dim=header["dim"],
            ga_config=GAConfig(**header["ga_config"]),
            status=header["status"],
        )
        for line in lines[1:-1]:
            record.phases.append(_phase_from_json(json.loads(line)))
    except CorruptRecord:
        raise
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CorruptRecord(f"malformed record: {exc}") from None
    if record.phases and record.phases[0].phase != GLOBAL:
        raise CorruptRecord("first phase is not global")
    return record


def experiment_path(out_dir: Path, experiment_id: str) -> Path:
    return Path(out_dir) / f"{experiment_id}.hctps.jsonl"
