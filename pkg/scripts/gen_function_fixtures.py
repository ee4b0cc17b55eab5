#!/usr/bin/env python3
"""Freeze spot-check fixtures for the benchmark suite.

Computes expected values with the scalar high-precision reference formulas
in tests/oracles.py and writes src/hctps/data/functions.json. Probe
coordinates are dyadic rationals so both evaluation paths see bit-identical
inputs. Rerun only when the suite's definitions change.
"""
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from oracles import OPTIMUM_POINT, ORACLES, oracle_value  # noqa: E402

NAMES = {
    "F1": "Bent Cigar",
    "F2": "Discus",
    "F3": "Weierstrass",
    "F4": "Modified Schwefel",
    "F5": "Katsuura",
    "F6": "HappyCat",
    "F7": "HGBat",
    "F8": "Expanded Griewank plus Rosenbrock",
    "F9": "Expanded Scaffer's F6",
    "F10": "Rosenbrock's",
    "F11": "Griewank's",
    "F12": "Rastrigin's",
    "F13": "High Conditioned Elliptic",
    "F14": "Ackley",
}

DIMS = (2, 3, 30)


def probe_a(n):
    # Small deep-dyadic magnitudes (14 fractional bits), alternating sign;
    # deliberately not half-integers so the fractal suites see nonzero series.
    return [((-1.0) ** i) * (4915 + 311 * (i % 7)) / 16384.0 for i in range(n)]


def probe_b(n):
    # Domain-scale dyadic magnitudes.
    cycle = [-75.0, 50.0, -25.0, 12.5, 60.0]
    return [cycle[i % 5] for i in range(n)]


def main():
    entries = []
    for fid in ORACLES:
        for dim in DIMS:
            points = [
                {"kind": "optimum", "x": OPTIMUM_POINT[fid](dim)},
                {"kind": "probe", "x": probe_a(dim)},
                {"kind": "probe", "x": probe_b(dim)},
            ]
            for p in points:
                p["expected_f"] = oracle_value(fid, p["x"])
            entries.append(
                {"id": fid, "name": NAMES[fid], "dim": dim, "probe_points": points}
            )
    out = ROOT / "src" / "hctps" / "data" / "functions.json"
    out.write_text(json.dumps(entries, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(entries)} entries)")


if __name__ == "__main__":
    main()
