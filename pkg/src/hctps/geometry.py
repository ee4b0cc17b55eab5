"""Search-region geometry: boxes, octant subdivision, cyclic extension, scaling.

The local-phase regions are built in three steps: split a 3-D cube into its
8 octants (fixed sign order), replicate a chosen octant's bounds cyclically
up to the experiment dimension, then shrink the result toward the origin by
a power-of-two factor. Per-function selections live in ``data/subcubes.json``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .benchmarks import FunctionId
from .errors import DegenerateBox, UnknownFunction, WrongDimension

# Octant sign order over (x, y, z); "-" is [lo, mid], "+" is [mid, hi].
OCTANT_SIGNS: tuple[tuple[int, int, int], ...] = (
    (-1, -1, -1),
    (-1, -1, +1),
    (-1, +1, -1),
    (-1, +1, +1),
    (+1, -1, -1),
    (+1, -1, +1),
    (+1, +1, -1),
    (+1, +1, +1),
)


@dataclass(frozen=True)
class Box:
    """Axis-aligned hyperrectangle with strictly positive widths."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or not lo:
            raise WrongDimension(f"lo/hi lengths {len(lo)}/{len(hi)}")
        for a, b in zip(lo, hi):
            if not (math.isfinite(a) and math.isfinite(b)):
                raise DegenerateBox("non-finite bound")
            if not a < b:
                raise DegenerateBox(f"empty interval [{a}, {b}]")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.hi) - np.asarray(self.lo)

    def contains(self, point) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= self.lo) and np.all(p <= self.hi))

    def volume(self) -> float:
        return float(np.prod(self.widths))

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "Box":
        return cls((lo,) * dim, (hi,) * dim)


@dataclass(frozen=True)
class SubcubeSpec:
    """Octant position, scale exponent, and target dimension of a local region."""

    octant_index: int  # 1..8, position in the octant sequence
    scale_exponent: int  # m >= 0; 0 means no scaling
    dim: int

    def __post_init__(self):
        if not 1 <= self.octant_index <= 8:
            raise ValueError(f"octant_index must be in 1..8, got {self.octant_index}")
        if self.scale_exponent < 0:
            raise ValueError(f"scale_exponent must be >= 0, got {self.scale_exponent}")
        if self.dim < 3:
            raise WrongDimension(f"dim must be >= 3, got {self.dim}")


def octant_sequence(box3: Box) -> list[Box]:
    """The 8 equal-volume octants of a 3-D box, in the fixed sign order."""
    if box3.dim != 3:
        raise WrongDimension(f"octant subdivision needs dim 3, got {box3.dim}")
    mids = [(a + b) / 2.0 for a, b in zip(box3.lo, box3.hi)]
    out = []
    for signs in OCTANT_SIGNS:
        lo = tuple(box3.lo[i] if s < 0 else mids[i] for i, s in enumerate(signs))
        hi = tuple(mids[i] if s < 0 else box3.hi[i] for i, s in enumerate(signs))
        out.append(Box(lo, hi))
    return out


def cyclic_extend(box3: Box, dim: int) -> Box:
    """Replicate a 3-D box's bounds: dimension i gets component (i-1) mod 3."""
    if box3.dim != 3:
        raise WrongDimension(f"cyclic extension needs a 3-D base, got {box3.dim}")
    if dim < 3:
        raise WrongDimension(f"target dim must be >= 3, got {dim}")
    lo = tuple(box3.lo[i % 3] for i in range(dim))
    hi = tuple(box3.hi[i % 3] for i in range(dim))
    return Box(lo, hi)


def scale_box(box: Box, scale_exponent: int) -> Box:
    """Multiply every coordinate by (1/2)^m. Exact in binary floating point."""
    if scale_exponent < 0:
        raise ValueError(f"scale_exponent must be >= 0, got {scale_exponent}")
    factor = math.ldexp(1.0, -scale_exponent)
    lo = tuple(v * factor for v in box.lo)
    hi = tuple(v * factor for v in box.hi)
    for a, b in zip(lo, hi):
        if not a < b:
            raise DegenerateBox(
                f"width underflowed to zero at scale exponent {scale_exponent}"
            )
    return Box(lo, hi)


def region_for_spec(base_cube3: Box, spec: SubcubeSpec) -> Box:
    """Compose octant lookup, cyclic extension, and scaling for one spec."""
    octant = octant_sequence(base_cube3)[spec.octant_index - 1]
    return scale_box(cyclic_extend(octant, spec.dim), spec.scale_exponent)


@lru_cache(maxsize=1)
def _subcube_fixtures() -> dict[str, dict]:
    raw = resources.files("hctps.data").joinpath("subcubes.json").read_text("utf-8")
    return {entry["id"]: entry for entry in json.loads(raw)}


def _box_from_bounds(bounds: list[list[str]]) -> Box:
    lo = tuple(float(pair[0]) for pair in bounds)
    hi = tuple(float(pair[1]) for pair in bounds)
    return Box(lo, hi)


def subcube_for_function(fid: FunctionId) -> tuple[Box, int]:
    """Published per-function base subcube and scale exponent, verbatim.

    The F3 row carries a suspected typo in its third interval; use
    ``subcube_for_experiment`` for the corrected region actually searched.
    """
    try:
        entry = _subcube_fixtures()[fid.name]
    except KeyError:
        raise UnknownFunction(fid) from None
    exponent = entry["scale_exponent"]
    return _box_from_bounds(entry["octant"]), 0 if exponent is None else exponent


def subcube_for_experiment(fid: FunctionId) -> tuple[Box, int]:
    """Like ``subcube_for_function`` but with typo-corrected bounds."""
    entry = _subcube_fixtures()[fid.name]
    bounds = entry.get("corrected_octant", entry["octant"])
    exponent = entry["scale_exponent"]
    return _box_from_bounds(bounds), 0 if exponent is None else exponent


def octant_index_of(box3: Box, octant: Box) -> int | None:
    """1-based position of ``octant`` in ``octant_sequence(box3)``, if present."""
    for i, candidate in enumerate(octant_sequence(box3), start=1):
        if candidate == octant:
            return i
    return None


def exhaustive_iteration_estimate(K: int, L: int, N: int) -> int:
    """Iterations needed to touch all K^L strings at N points per iteration.

    Nearest integer to K^L / N, ties rounding up; exact integer arithmetic.
    """
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    if L < 1 or N < 1:
        raise ValueError(f"L and N must be positive, got L={L}, N={N}")
    total = K**L
    # Nearest positive integer, ties up: floor((total + N/2) / N), min 1.
    return max(1, (2 * total + N) // (2 * N))
