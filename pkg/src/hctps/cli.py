"""Headless driver: scripted experiment schedules, verification, serving.

``hctps run`` executes the standalone baseline and/or scripted two-phase
schedules and writes experiment files plus comparison tables (optionally
figures). ``hctps verify`` runs the acceptance checks and reports one
pass/fail line per criterion. ``hctps serve`` exposes the steering API.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import experiments as xp
from .benchmarks import FunctionId
from .errors import HctpsError, UnknownFunction
from .experiments import ExperimentRecord, comparison_row, persist
from .ga import GAConfig
from .geometry import (
    SubcubeSpec,
    cyclic_extend,
    octant_index_of,
    octant_sequence,
    scale_box,
    subcube_for_experiment,
)
from .reporting import render_figures, write_comparison_csv, write_comparison_markdown
from .verify import PHASE_SEED_STRIDE, run_all

MODES = ("global-only", "hctps-fixture", "hctps-custom")


@dataclass
class RunManifest:
    function: str = "all"  # "all" or a single id like "F7"
    dim: int = 30
    n_runs: int = 20
    seed_base: int = 42
    mode: str = "hctps-fixture"
    octant_index: int | None = None
    scale_exponent: int | None = None
    budget_per_dim: int = 50
    out: str = "out"

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.dim < 3:
            raise ValueError("dim must be >= 3")
        if self.n_runs < 1:
            raise ValueError("runs must be >= 1")
        if self.budget_per_dim < 1:
            raise ValueError("budget-per-dim must be >= 1")
        if self.mode == "hctps-custom":
            if self.octant_index is None or self.scale_exponent is None:
                raise ValueError("hctps-custom mode needs --octant and --scale-exp")
            if not 1 <= self.octant_index <= 8:
                raise ValueError("octant must be in 1..8")
            if self.scale_exponent < 0:
                raise ValueError("scale-exp must be >= 0")
        if self.function != "all":
            FunctionId.parse(self.function)

    def function_ids(self) -> list[FunctionId]:
        if self.function == "all":
            return list(FunctionId)
        return [FunctionId.parse(self.function)]

    def save(self, path: Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


def _experiment_id(manifest: RunManifest, fid: FunctionId) -> str:
    return f"{fid.name.lower()}-{manifest.mode}-d{manifest.dim}-s{manifest.seed_base}"


def _run_schedule(manifest: RunManifest, fid: FunctionId) -> ExperimentRecord:
    config = GAConfig(seed=manifest.seed_base)
    record = ExperimentRecord(
        experiment_id=_experiment_id(manifest, fid),
        fid=fid,
        dim=manifest.dim,
        ga_config=config,
    )
    record.append_phase(
        xp.run_phase(
            fid,
            xp.search_cube(manifest.dim),
            config,
            manifest.n_runs,
            phase=xp.GLOBAL,
            seed_base=manifest.seed_base,
            budget_per_dim=manifest.budget_per_dim,
        )
    )
    if manifest.mode != "global-only":
        if manifest.mode == "hctps-fixture":
            base, exponent = subcube_for_experiment(fid)
            octant = octant_index_of(xp.search_cube(3), base)
        else:
            exponent = manifest.scale_exponent
            octant = manifest.octant_index
            base = octant_sequence(xp.search_cube(3))[octant - 1]
        spec = SubcubeSpec(
            octant_index=octant if octant is not None else 1,
            scale_exponent=exponent,
            dim=manifest.dim,
        )
        region = scale_box(cyclic_extend(base, manifest.dim), exponent)
        record.append_phase(
            xp.run_phase(
                fid,
                region,
                config,
                manifest.n_runs,
                phase=xp.LOCAL,
                subcube_spec=spec,
                seed_base=manifest.seed_base + PHASE_SEED_STRIDE,
                budget_per_dim=manifest.budget_per_dim,
            )
        )
    record.status = xp.STATUS_AWAITING
    return record


def cmd_run(manifest: RunManifest, figures: bool = False) -> int:
    try:
        manifest.validate()
    except (ValueError, UnknownFunction) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(manifest.out)
    try:
        exp_dir = out_dir / "experiments"
        exp_dir.mkdir(parents=True, exist_ok=True)
        records: list[ExperimentRecord] = []
        rows: list[dict] = []
        for fid in manifest.function_ids():
            record = _run_schedule(manifest, fid)
            path = persist(record, xp.experiment_path(exp_dir, record.experiment_id))
            records.append(record)
            rows.append(comparison_row(record.phases[0], record))
            best = xp.hctps_best(record)[0]
            print(f"{fid.name:>4} {fid.value:<36} best={best:.6g} -> {path}")
        csv_path = write_comparison_csv(rows, out_dir / "comparison.csv")
        md_path = write_comparison_markdown(rows, out_dir / "comparison.md")
        manifest.save(out_dir / "manifest.json")
        print(f"tables: {csv_path}, {md_path}")
        if figures:
            for fig in render_figures(records, rows, out_dir):
                print(f"figure: {fig}")
        return 0
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except HctpsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def cmd_verify(seed_base: int, n_runs: int) -> int:
    results = run_all(seed_base=seed_base, n_runs=n_runs)
    width = max(len(r.name) for r in results)
    all_passed = True
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        all_passed &= r.passed
        print(f"{mark}  {r.name:<{width}}  {r.detail}")
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return 0 if all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hctps", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scripted experiment schedule")
    run_p.add_argument("--manifest", type=Path, help="load a manifest file (flags override)")
    run_p.add_argument("--function", default=None, help="F1..F14 or 'all'")
    run_p.add_argument("--dim", type=int, default=None)
    run_p.add_argument("--runs", type=int, default=None, dest="n_runs")
    run_p.add_argument("--budget-per-dim", type=int, default=None)
    run_p.add_argument("--seed", type=int, default=None, dest="seed_base")
    run_p.add_argument("--mode", choices=MODES, default=None)
    run_p.add_argument("--octant", type=int, default=None, dest="octant_index")
    run_p.add_argument("--scale-exp", type=int, default=None, dest="scale_exponent")
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--figures", action="store_true", help="also render PNG figures")

    verify_p = sub.add_parser("verify", help="run the acceptance checks")
    verify_p.add_argument("--seed", type=int, default=42, dest="seed_base")
    verify_p.add_argument("--runs", type=int, default=20, dest="n_runs")

    serve_p = sub.add_parser("serve", help="start the steering API")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--store", default="experiments")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        if args.manifest is not None:
            try:
                manifest = RunManifest.load(args.manifest)
            except (OSError, json.JSONDecodeError, TypeError) as exc:
                print(f"error: cannot load manifest: {exc}", file=sys.stderr)
                return 2
        else:
            manifest = RunManifest()
        for field_name in (
            "function", "dim", "n_runs", "seed_base", "mode",
            "octant_index", "scale_exponent", "budget_per_dim", "out",
        ):
            value = getattr(args, field_name, None)
            if value is not None:
                setattr(manifest, field_name, value)
        return cmd_run(manifest, figures=args.figures)
    if args.command == "verify":
        return cmd_verify(args.seed_base, args.n_runs)
    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(args.store), host=args.host, port=args.port)
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
