"""Delimited and Markdown comparison tables, plus optional figure rendering.

The CSV uses full-precision ``repr`` floats so reruns with identical seeds
produce byte-identical files; the Markdown table is formatted for reading.
Figures are rendered only on request (``--figures``) and never feed back
into any computed result.
"""
from __future__ import annotations

import csv
from pathlib import Path

from .experiments import ExperimentRecord

CSV_HEADER = ["id", "variant", "mean", "best", "worst", "median", "st_dev"]
STAT_KEYS = ["mean", "best", "worst", "median", "st_dev"]
HCTPS_VARIANT = "HCTPS-GA"
GA_VARIANT = "GA"


def write_comparison_csv(rows: list[dict], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            for variant, key in ((HCTPS_VARIANT, "HCTPS"), (GA_VARIANT, "GA")):
                writer.writerow(
                    [row["id"], variant] + [repr(row[key][k]) for k in STAT_KEYS]
                )
    return path


def _fmt(value: float) -> str:
    return f"{value:.6G}"


def write_comparison_markdown(rows: list[dict], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        "# Performance comparison",
        "",
        "| ID | Metric | HCTPS-GA | GA |",
        "|----|--------|----------|-----|",
    ]
    labels = [("mean", "Mean"), ("best", "Best"), ("worst", "Worst"),
              ("median", "Median"), ("st_dev", "St. Dev")]
    for row in rows:
        for i, (key, label) in enumerate(labels):
            id_cell = f"{row['id']} ({row['name']})" if i == 0 else ""
            lines.append(
                f"| {id_cell} | {label} | {_fmt(row['HCTPS'][key])} | {_fmt(row['GA'][key])} |"
            )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def render_figures(records: list[ExperimentRecord], rows: list[dict], out_dir: Path) -> list[Path]:
    """Convergence and comparison plots as PNG files under out_dir/figures."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    fig_dir = Path(out_dir) / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for record in records:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for idx, phase in enumerate(record.phases):
            label = phase.phase if phase.subcube_spec is None else (
                f"{phase.phase} (octant {phase.subcube_spec.octant_index}, "
                f"m={phase.subcube_spec.scale_exponent})"
            )
            # Median best-so-far trace across the phase's runs.
            histories = [r.generation_best_history for r in phase.runs]
            length = min(len(h) for h in histories)
            trace = np.median([h[:length] for h in histories], axis=0)
            ax.plot(range(length), trace, label=f"phase {idx}: {label}")
        positive = [
            v
            for phase in record.phases
            for r in phase.runs
            for v in r.generation_best_history
            if v > 0
        ]
        if positive:
            ax.set_yscale("log")
        ax.set_xlabel("generation")
        ax.set_ylabel("best objective so far")
        ax.set_title(f"{record.fid.name} {record.fid.value}")
        ax.legend(fontsize=8)
        fig.tight_layout()
        target = fig_dir / f"{record.experiment_id}_convergence.png"
        fig.savefig(target, dpi=120)
        plt.close(fig)
        written.append(target)

    if rows:
        fig, ax = plt.subplots(figsize=(9, 4.5))
        ids = [row["id"] for row in rows]
        x = np.arange(len(ids))
        floor = 1e-45  # log-scale placeholder for exact zeros
        hctps_best = [max(row["HCTPS"]["best"], floor) for row in rows]
        ga_best = [max(row["GA"]["best"], floor) for row in rows]
        ax.bar(x - 0.2, hctps_best, width=0.4, label="HCTPS-GA best")
        ax.bar(x + 0.2, ga_best, width=0.4, label="GA best")
        ax.set_yscale("log")
        ax.set_xticks(x, ids)
        ax.set_ylabel("best objective (log scale)")
        ax.legend()
        fig.tight_layout()
        target = fig_dir / "comparison_best.png"
        fig.savefig(target, dpi=120)
        plt.close(fig)
        written.append(target)

    return written
