"""Canonical binary genetic algorithm, budget-terminated and fully seeded.

Configuration: binary encoding (fixed bits per dimension, MSB first),
tournament selection, two-point crossover, independent bit-flip mutation,
elitist generational replacement. Minimization throughout; ties always
break toward the lowest population index.

Reproducibility contract: one ``numpy.random.Generator`` over PCG64 per
run, seeded from ``GAConfig.seed``. The stream order per generation is
fixed: for each offspring pair, two tournaments (k index draws each), one
uniform for the crossover decision, two cut positions when crossing, then
one float vector per child for mutation. Replaying a seed reproduces every
number in the run.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .benchmarks import EvaluationBudget, FunctionId, budgeted_evaluate
from .errors import (
    EmptyPopulation,
    InsufficientOffspring,
    LengthMismatch,
    MissingFitness,
)
from .geometry import Box


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 50
    bits_per_dim: int = 16
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # None -> 1 / (dim * bits_per_dim)
    tournament_size: int = 2
    elite_count: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2 != 0:
            raise ValueError(f"population_size must be even and >= 2, got {self.population_size}")
        if self.bits_per_dim < 1:
            raise ValueError(f"bits_per_dim must be >= 1, got {self.bits_per_dim}")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError(f"crossover_prob outside [0, 1]: {self.crossover_prob}")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError(f"mutation_prob outside [0, 1]: {self.mutation_prob}")
        if self.tournament_size < 2:
            raise ValueError(f"tournament_size must be >= 2, got {self.tournament_size}")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError(
                f"elite_count must be in [0, population_size), got {self.elite_count}"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def resolved_mutation_prob(self, total_bits: int) -> float:
        return self.mutation_prob if self.mutation_prob is not None else 1.0 / total_bits


@dataclass(eq=False)
class Chromosome:
    """Bitstring candidate plus its cached objective value, if evaluated.

    Compared by identity: two chromosomes are interchangeable only through
    their bits, which callers compare explicitly.
    """

    bits: np.ndarray  # uint8 vector of 0/1
    fitness: float | None = None

    def copy(self) -> "Chromosome":
        return Chromosome(self.bits.copy(), self.fitness)


@dataclass
class RunResult:
    best_value: float
    best_point: tuple[float, ...]
    evaluations_used: int
    generation_best_history: list[float]
    seed: int


def decode(bits: np.ndarray, box: Box, bits_per_dim: int) -> np.ndarray:
    """Map a bitstring to a point of ``box``: per dimension, the unsigned
    integer of its MSB-first slice stretched affinely over [lo, hi]."""
    bits = np.asarray(bits, dtype=np.uint8)
    dim = box.dim
    if bits.size != dim * bits_per_dim:
        raise LengthMismatch(
            f"expected {dim * bits_per_dim} bits for dim {dim}, got {bits.size}"
        )
    weights = (2 ** np.arange(bits_per_dim - 1, -1, -1)).astype(np.int64)
    u = bits.reshape(dim, bits_per_dim).astype(np.int64) @ weights
    denom = float(2**bits_per_dim - 1)
    lo = np.asarray(box.lo)
    hi = np.asarray(box.hi)
    x = lo + (u / denom) * (hi - lo)
    # The affine map can overshoot by one ulp for awkward bound pairs.
    return np.clip(x, lo, hi)


def tournament_select(
    population: list[Chromosome], k: int, rng: np.random.Generator
) -> Chromosome:
    """Draw k members uniformly with replacement; return the fittest
    (minimal value), ties to the lowest index."""
    if not population:
        raise EmptyPopulation("cannot select from an empty population")
    if any(c.fitness is None for c in population):
        raise MissingFitness("tournament requires fully evaluated population")
    draws = rng.integers(0, len(population), size=k)
    best = min(draws, key=lambda i: (population[i].fitness, i))
    return population[int(best)]


def swap_segment(
    a_bits: np.ndarray, b_bits: np.ndarray, i: int, j: int
) -> tuple[np.ndarray, np.ndarray]:
    """Exchange the bit segment (i, j] between two equal-length strings."""
    c1 = a_bits.copy()
    c2 = b_bits.copy()
    c1[i:j] = b_bits[i:j]
    c2[i:j] = a_bits[i:j]
    return c1, c2


def two_point_crossover(
    a: Chromosome, b: Chromosome, p_c: float, rng: np.random.Generator
) -> tuple[Chromosome, Chromosome]:
    """With probability p_c swap a uniformly drawn segment (i, j],
    i < j from {1..L-1}; otherwise copy the parents. Children are unevaluated."""
    if a.bits.size != b.bits.size:
        raise LengthMismatch(f"parent lengths differ: {a.bits.size} vs {b.bits.size}")
    L = a.bits.size
    if L < 3:
        raise LengthMismatch(f"two-point crossover needs length >= 3, got {L}")
    if rng.random() < p_c:
        cuts = rng.choice(L - 1, size=2, replace=False) + 1
        i, j = int(cuts.min()), int(cuts.max())
        c1, c2 = swap_segment(a.bits, b.bits, i, j)
    else:
        c1, c2 = a.bits.copy(), b.bits.copy()
    return Chromosome(c1), Chromosome(c2)


def bitflip_mutate(c: Chromosome, p_m: float, rng: np.random.Generator) -> Chromosome:
    """Flip each bit independently with probability p_m; a flip clears the
    cached fitness."""
    mask = rng.random(c.bits.size) < p_m
    if not mask.any():
        return Chromosome(c.bits.copy(), c.fitness)
    return Chromosome(np.bitwise_xor(c.bits, mask.astype(np.uint8)), None)


def replace(
    old_population: list[Chromosome],
    offspring: list[Chromosome],
    elite_count: int,
) -> list[Chromosome]:
    """Elitist generational replacement: keep the elite_count best of the old
    generation, fill the rest with the offspring prefix."""
    n = len(old_population)
    needed = n - elite_count
    if len(offspring) < needed:
        raise InsufficientOffspring(f"need {needed} offspring, got {len(offspring)}")
    order = sorted(range(n), key=lambda i: (old_population[i].fitness, i))
    elites = [old_population[i] for i in order[:elite_count]]
    return elites + offspring[:needed]


def _evaluate_generation(
    members: list[Chromosome],
    fid: FunctionId,
    box: Box,
    bits_per_dim: int,
    budget: EvaluationBudget,
) -> None:
    """Evaluate all unevaluated members, spending one budget unit per
    distinct bitstring (duplicates within the generation share a value)."""
    pending: dict[bytes, list[Chromosome]] = {}
    for c in members:
        if c.fitness is None:
            pending.setdefault(c.bits.tobytes(), []).append(c)
    for key, group in pending.items():
        value = budgeted_evaluate(budget, fid, decode(group[0].bits, box, bits_per_dim))
        for c in group:
            c.fitness = value


def _distinct_pending(members: list[Chromosome]) -> int:
    return len({c.bits.tobytes() for c in members if c.fitness is None})


def run_ga(
    fid: FunctionId, box: Box, config: GAConfig, budget: EvaluationBudget
) -> RunResult:
    """One full GA run over ``box``, stopping when the next generation's
    distinct evaluations would exceed the remaining budget."""
    if budget.used != 0:
        raise ValueError("run_ga requires a fresh budget")
    if config.population_size > budget.cap:
        raise ValueError(
            f"population_size {config.population_size} exceeds budget cap {budget.cap}"
        )
    rng = np.random.Generator(np.random.PCG64(config.seed))
    n = config.population_size
    total_bits = box.dim * config.bits_per_dim
    p_m = config.resolved_mutation_prob(total_bits)

    init_bits = rng.integers(0, 2, size=(n, total_bits), dtype=np.uint8)
    population = [Chromosome(init_bits[i]) for i in range(n)]
    _evaluate_generation(population, fid, box, config.bits_per_dim, budget)

    def current_best(pop: list[Chromosome]) -> Chromosome:
        return min(pop, key=lambda c: c.fitness)  # stable: first minimum wins

    best = current_best(population).copy()
    history = [best.fitness]

    needed = n - config.elite_count
    pairs = (needed + 1) // 2
    while True:
        offspring: list[Chromosome] = []
        for _ in range(pairs):
            pa = tournament_select(population, config.tournament_size, rng)
            pb = tournament_select(population, config.tournament_size, rng)
            c1, c2 = two_point_crossover(pa, pb, config.crossover_prob, rng)
            offspring.append(bitflip_mutate(c1, p_m, rng))
            offspring.append(bitflip_mutate(c2, p_m, rng))
        offspring = offspring[:needed]
        if _distinct_pending(offspring) > budget.remaining:
            break
        _evaluate_generation(offspring, fid, box, config.bits_per_dim, budget)
        population = replace(population, offspring, config.elite_count)
        gen_best = current_best(population)
        if gen_best.fitness < best.fitness:
            best = gen_best.copy()
        history.append(best.fitness)

    point = decode(best.bits, box, config.bits_per_dim)
    return RunResult(
        best_value=float(best.fitness),
        best_point=tuple(float(v) for v in point),
        evaluations_used=budget.used,
        generation_best_history=history,
        seed=config.seed,
    )


def config_with_seed(config: GAConfig, seed: int) -> GAConfig:
    return replace(config, seed=seed)
