"""Human-centered two-phase search workbench.

A budget-capped canonical GA plus the steering machinery around it: a global
pass over the full search cube, then human-chosen octant subcubes (cyclically
extended and power-of-two scaled) explored until the decision-maker is
satisfied.
"""

from .benchmarks import (
    EvaluationBudget,
    FunctionId,
    budgeted_evaluate,
    evaluate,
    function_catalog,
    make_budget,
)
from .experiments import (
    ExperimentRecord,
    PhaseResult,
    RunStats,
    comparison_row,
    compute_stats,
    hctps_best,
    load,
    persist,
    run_phase,
    search_cube,
)
from .ga import Chromosome, GAConfig, RunResult, decode, run_ga
from .geometry import (
    Box,
    SubcubeSpec,
    cyclic_extend,
    exhaustive_iteration_estimate,
    octant_sequence,
    region_for_spec,
    scale_box,
    subcube_for_experiment,
    subcube_for_function,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "Chromosome",
    "EvaluationBudget",
    "ExperimentRecord",
    "FunctionId",
    "GAConfig",
    "PhaseResult",
    "RunResult",
    "RunStats",
    "SubcubeSpec",
    "budgeted_evaluate",
    "comparison_row",
    "compute_stats",
    "cyclic_extend",
    "decode",
    "evaluate",
    "exhaustive_iteration_estimate",
    "function_catalog",
    "hctps_best",
    "load",
    "make_budget",
    "octant_sequence",
    "persist",
    "region_for_spec",
    "run_ga",
    "run_phase",
    "scale_box",
    "search_cube",
    "subcube_for_experiment",
    "subcube_for_function",
]
