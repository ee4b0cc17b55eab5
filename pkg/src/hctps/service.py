"""HTTP service for steering experiments interactively.

Thin lifecycle layer over the experiment runner: create an experiment, start
the global phase, inspect octants, launch local phases on chosen subcubes,
poll job progress, and declare satisfaction. Phases run on worker threads;
one in-flight job per experiment. Every mutation is persisted immediately,
so any response view is reconstructible from the stored record alone.

Box bounds are serialized as decimal strings (exactness matters for the
scaled subcubes); statistics and objective values are plain doubles.
"""
from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import experiments as xp
from .benchmarks import FunctionId, function_catalog
from .errors import DegenerateBox, HctpsError, UnknownFunction
from .experiments import ExperimentRecord, PhaseResult
from .ga import GAConfig
from .geometry import Box, SubcubeSpec, cyclic_extend, octant_sequence, scale_box

# Seed scheme: phase k of an experiment uses seed_base = config.seed + k * PHASE_SEED_STRIDE
# unless the request overrides it. Keeps run seeds of different phases disjoint
# for any n_runs below the stride.
PHASE_SEED_STRIDE = 10_000


class GAConfigBody(BaseModel):
    population_size: int = 50
    bits_per_dim: int = 16
    crossover_prob: float = 0.9
    mutation_prob: float | None = None
    tournament_size: int = 2
    elite_count: int = 1
    seed: int = 0


class CreateExperimentBody(BaseModel):
    fid: str
    dim: int = 30
    config: GAConfigBody | None = None


class StartGlobalBody(BaseModel):
    n_runs: int = Field(default=20, ge=1)
    seed_base: int | None = None


class StartLocalBody(BaseModel):
    octant_index: int | None = Field(default=None, ge=1, le=8)
    box: dict | None = None  # {"lo": [...], "hi": [...]} in experiment dim
    scale_exponent: int = Field(default=0, ge=0)
    n_runs: int = Field(default=20, ge=1)
    seed_base: int | None = None


class Job:
    def __init__(self, job_id: str, experiment_id: str, total: int):
        self.job_id = job_id
        self.experiment_id = experiment_id
        self.completed = 0
        self.total = total
        self.status = "running"
        self.phase_index: int | None = None
        self.error: str | None = None


class SessionState:
    """All service state: records, jobs, store directory, locks."""

    def __init__(self, store_dir: Path):
        self.store_dir = Path(store_dir)
        self.store_dir.mkdir(parents=True, exist_ok=True)
        self.experiments: dict[str, ExperimentRecord] = {}
        self.jobs: dict[str, Job] = {}
        self.lock = threading.Lock()
        for path in sorted(self.store_dir.glob("*.hctps.jsonl")):
            record = xp.load(path)
            self.experiments[record.experiment_id] = record

    def persist(self, record: ExperimentRecord) -> None:
        xp.persist(record, xp.experiment_path(self.store_dir, record.experiment_id))

    def active_job_for(self, experiment_id: str) -> Job | None:
        for job in self.jobs.values():
            if job.experiment_id == experiment_id and job.status == "running":
                return job
        return None


def _box_view(box: Box) -> dict:
    return {"lo": [repr(v) for v in box.lo], "hi": [repr(v) for v in box.hi]}


def _stats_view(stats: xp.RunStats) -> dict:
    return {
        "mean": stats.mean,
        "best": stats.best,
        "worst": stats.worst,
        "median": stats.median,
        "st_dev": stats.st_dev,
        "n_runs": stats.n_runs,
        "wall_time_s": stats.wall_time_s,
    }


def _phase_view(phase: PhaseResult, index: int) -> dict:
    return {
        "index": index,
        "phase": phase.phase,
        "region": _box_view(phase.region),
        "subcube_spec": None
        if phase.subcube_spec is None
        else {
            "octant_index": phase.subcube_spec.octant_index,
            "scale_exponent": phase.subcube_spec.scale_exponent,
            "dim": phase.subcube_spec.dim,
        },
        "seed_base": phase.seed_base,
        "stats": _stats_view(phase.stats),
        "best_values": [r.best_value for r in phase.runs],
    }


def _record_view(record: ExperimentRecord, state: SessionState) -> dict:
    job = state.active_job_for(record.experiment_id)
    view = {
        "experiment_id": record.experiment_id,
        "fid": record.fid.name,
        "name": record.fid.value,
        "dim": record.dim,
        "status": record.status,
        "ga_config": {
            "population_size": record.ga_config.population_size,
            "bits_per_dim": record.ga_config.bits_per_dim,
            "crossover_prob": record.ga_config.crossover_prob,
            "mutation_prob": record.ga_config.mutation_prob,
            "tournament_size": record.ga_config.tournament_size,
            "elite_count": record.ga_config.elite_count,
            "seed": record.ga_config.seed,
        },
        "search_cube": _box_view(xp.search_cube(record.dim)),
        "phases": [_phase_view(p, i) for i, p in enumerate(record.phases)],
        "active_job": None
        if job is None
        else {"job_id": job.job_id, "completed": job.completed, "total": job.total},
    }
    if record.phases:
        value, point, phase_index = xp.hctps_best(record)
        view["best"] = {"value": value, "point": list(point), "phase_index": phase_index}
    return view


def _final_report(record: ExperimentRecord) -> dict:
    value, point, phase_index = xp.hctps_best(record)
    report = {
        "experiment_id": record.experiment_id,
        "status": record.status,
        "best_value": value,
        "best_point": list(point),
        "phase_index": phase_index,
    }
    if record.phases:
        report["comparison"] = xp.comparison_row(record.phases[0], record)
    return report


def create_app(store_dir: Path | str = "experiments") -> FastAPI:
    app = FastAPI(title="hctps", version="0.1.0")
    state = SessionState(Path(store_dir))
    app.state.session = state

    def get_record(experiment_id: str) -> ExperimentRecord:
        record = state.experiments.get(experiment_id)
        if record is None:
            raise HTTPException(404, f"unknown experiment {experiment_id!r}")
        return record

    def require_idle(record: ExperimentRecord) -> None:
        if record.status == xp.STATUS_SATISFIED:
            raise HTTPException(409, "experiment is frozen (satisfied)")
        if state.active_job_for(record.experiment_id) is not None:
            raise HTTPException(409, "one job per experiment; a phase is in flight")

    def launch_phase(
        record: ExperimentRecord,
        region: Box,
        phase: str,
        n_runs: int,
        seed_base: int | None,
        subcube_spec: SubcubeSpec | None,
    ) -> str:
        job = Job(uuid.uuid4().hex, record.experiment_id, n_runs)
        state.jobs[job.job_id] = job
        if seed_base is None:
            seed_base = record.ga_config.seed + len(record.phases) * PHASE_SEED_STRIDE
        record.status = xp.STATUS_RUNNING

        def on_progress(done: int, total: int) -> None:
            job.completed = done

        def work() -> None:
            try:
                result = xp.run_phase(
                    record.fid,
                    region,
                    record.ga_config,
                    n_runs,
                    phase=phase,
                    subcube_spec=subcube_spec,
                    seed_base=seed_base,
                    on_run_complete=on_progress,
                )
                with state.lock:
                    job.phase_index = record.append_phase(result)
                    record.status = xp.STATUS_AWAITING
                    state.persist(record)
                    job.status = "done"
            except Exception as exc:  # surface through the job, not the log
                with state.lock:
                    job.status = "failed"
                    job.error = str(exc)
                    record.status = xp.STATUS_AWAITING if record.phases else xp.STATUS_RUNNING
                    state.persist(record)

        threading.Thread(target=work, daemon=True).start()
        return job.job_id

    @app.get("/functions")
    def functions() -> list[dict]:
        return function_catalog()

    @app.post("/experiments")
    def create_experiment(body: CreateExperimentBody) -> dict:
        try:
            fid = FunctionId.parse(body.fid)
        except UnknownFunction:
            raise HTTPException(400, f"unknown function {body.fid!r}") from None
        if body.dim < 3:
            raise HTTPException(400, "dim must be >= 3 (cyclic extension needs 3 dims)")
        try:
            config = GAConfig(**(body.config.model_dump() if body.config else {}))
        except ValueError as exc:
            raise HTTPException(400, f"invalid config: {exc}") from None
        experiment_id = uuid.uuid4().hex[:12]
        record = ExperimentRecord(
            experiment_id=experiment_id, fid=fid, dim=body.dim, ga_config=config
        )
        with state.lock:
            state.experiments[experiment_id] = record
            state.persist(record)
        return {"id": experiment_id}

    @app.get("/experiments")
    def list_experiments() -> list[dict]:
        with state.lock:
            return [
                {
                    "experiment_id": r.experiment_id,
                    "fid": r.fid.name,
                    "name": r.fid.value,
                    "dim": r.dim,
                    "status": r.status,
                    "n_phases": len(r.phases),
                }
                for r in state.experiments.values()
            ]

    @app.get("/experiments/{experiment_id}")
    def get_experiment(experiment_id: str) -> dict:
        with state.lock:
            return _record_view(get_record(experiment_id), state)

    @app.post("/experiments/{experiment_id}/global")
    def start_global(experiment_id: str, body: StartGlobalBody) -> dict:
        with state.lock:
            record = get_record(experiment_id)
            require_idle(record)
            if any(p.phase == xp.GLOBAL for p in record.phases):
                raise HTTPException(409, "global phase already ran")
            job_id = launch_phase(
                record,
                xp.search_cube(record.dim),
                xp.GLOBAL,
                body.n_runs,
                body.seed_base,
                None,
            )
        return {"job_id": job_id}

    def octant_descriptors(record: ExperimentRecord) -> list[dict]:
        base = xp.search_cube(3)
        octants = octant_sequence(base)
        descriptors = []
        for idx, octant in enumerate(octants, start=1):
            matching = [
                {
                    "phase_index": i,
                    "scale_exponent": p.subcube_spec.scale_exponent,
                    "stats": _stats_view(p.stats),
                }
                for i, p in enumerate(record.phases)
                if p.subcube_spec is not None and p.subcube_spec.octant_index == idx
            ]
            descriptors.append(
                {
                    "octant_index": idx,
                    "bounds": _box_view(octant),
                    "phases": matching,
                }
            )
        return descriptors

    def global_done(record: ExperimentRecord) -> bool:
        return any(p.phase == xp.GLOBAL for p in record.phases)

    @app.get("/experiments/{experiment_id}/octants")
    def list_octants(experiment_id: str) -> list[dict]:
        with state.lock:
            record = get_record(experiment_id)
            if not global_done(record):
                raise HTTPException(409, "global phase has not completed yet")
            return octant_descriptors(record)

    def build_local_region(
        record: ExperimentRecord, body: StartLocalBody
    ) -> tuple[Box, SubcubeSpec | None]:
        if (body.octant_index is None) == (body.box is None):
            raise HTTPException(400, "provide exactly one of octant_index or box")
        try:
            if body.octant_index is not None:
                spec = SubcubeSpec(
                    octant_index=body.octant_index,
                    scale_exponent=body.scale_exponent,
                    dim=record.dim,
                )
                octant = octant_sequence(xp.search_cube(3))[spec.octant_index - 1]
                return scale_box(cyclic_extend(octant, record.dim), spec.scale_exponent), spec
            box = Box(
                tuple(float(v) for v in body.box["lo"]),
                tuple(float(v) for v in body.box["hi"]),
            )
            if box.dim != record.dim:
                raise HTTPException(400, f"box dim {box.dim} != experiment dim {record.dim}")
            cube = xp.search_cube(record.dim)
            if not (cube.contains(box.lo) and cube.contains(box.hi)):
                raise HTTPException(400, "custom box must lie inside the search cube")
            return scale_box(box, body.scale_exponent), None
        except DegenerateBox as exc:
            raise HTTPException(400, f"degenerate box: {exc}") from None
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, HTTPException):
                raise
            raise HTTPException(400, f"invalid region: {exc}") from None

    @app.get("/experiments/{experiment_id}/local-preview")
    def local_preview(
        experiment_id: str, octant_index: int, scale_exponent: int = 0
    ) -> dict:
        """Resolved bounds for a prospective local phase (read-only)."""
        with state.lock:
            record = get_record(experiment_id)
        body = StartLocalBody(octant_index=octant_index, scale_exponent=scale_exponent)
        region, spec = build_local_region(record, body)
        return {
            "region": _box_view(region),
            "scale_factor": 0.5**scale_exponent,
            "subcube_spec": None
            if spec is None
            else {"octant_index": spec.octant_index, "scale_exponent": spec.scale_exponent},
        }

    @app.post("/experiments/{experiment_id}/local")
    def start_local(experiment_id: str, body: StartLocalBody) -> dict:
        with state.lock:
            record = get_record(experiment_id)
            require_idle(record)
            if not global_done(record):
                raise HTTPException(409, "run the global phase first")
            region, spec = build_local_region(record, body)
            job_id = launch_phase(record, region, xp.LOCAL, body.n_runs, body.seed_base, spec)
        return {"job_id": job_id}

    @app.get("/jobs/{job_id}")
    def job_progress(job_id: str) -> dict:
        job = state.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id!r}")
        out = {
            "job_id": job.job_id,
            "experiment_id": job.experiment_id,
            "completed": job.completed,
            "total": job.total,
            "status": job.status,
        }
        if job.phase_index is not None:
            out["phase_index"] = job.phase_index
        if job.error is not None:
            out["error"] = job.error
        return out

    @app.post("/experiments/{experiment_id}/satisfied")
    def mark_satisfied(experiment_id: str) -> dict:
        with state.lock:
            record = get_record(experiment_id)
            if record.status == xp.STATUS_SATISFIED:
                return _final_report(record)
            require_idle(record)
            if not record.phases:
                raise HTTPException(409, "no phases recorded yet")
            record.status = xp.STATUS_SATISFIED
            state.persist(record)
            try:
                return _final_report(record)
            except HctpsError as exc:
                raise HTTPException(500, str(exc)) from None

    return app
