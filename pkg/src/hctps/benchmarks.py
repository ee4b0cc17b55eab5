"""The 14-function benchmark suite and evaluation-budget accounting.

All objectives are minimization over real vectors. The definitions are the
standard unshifted, unrotated forms; every global optimum lies inside the
[-100, 100]^n workbench cube. Series truncations (Weierstrass k_max = 20,
Katsuura 32 terms) follow common reference implementations and are frozen
in the spot-check fixtures under ``data/functions.json``.
"""
from __future__ import annotations

import contextlib
import threading
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BudgetExhausted, NonFiniteInput, UnknownFunction

TWO_PI = 2.0 * np.pi

# Weierstrass parameters (a, b, k_max) and precomputed powers.
_W_A = 0.5
_W_B = 3.0
_W_KMAX = 20
_W_AK = _W_A ** np.arange(_W_KMAX + 1)
_W_BK = _W_B ** np.arange(_W_KMAX + 1)
# Per-dimension constant term, computed with the same expression used per
# coordinate so the value at the origin cancels exactly.
_W_F0 = float(np.sum(_W_AK * np.cos(TWO_PI * _W_BK * 0.5)))

# Katsuura series depth.
_K_JMAX = 32
_K_POW2 = 2.0 ** np.arange(1, _K_JMAX + 1)

# Modified Schwefel offset and compensation constant.
_MS_OFFSET = 4.209687462275036e2
_MS_BIAS = 4.189828872724338e2


class FunctionId(Enum):
    """Benchmark identifiers with their catalog display names."""

    F1 = "Bent Cigar"
    F2 = "Discus"
    F3 = "Weierstrass"
    F4 = "Modified Schwefel"
    F5 = "Katsuura"
    F6 = "HappyCat"
    F7 = "HGBat"
    F8 = "Expanded Griewank plus Rosenbrock"
    F9 = "Expanded Scaffer's F6"
    F10 = "Rosenbrock's"
    F11 = "Griewank's"
    F12 = "Rastrigin's"
    F13 = "High Conditioned Elliptic"
    F14 = "Ackley"

    @property
    def display_name(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "FunctionId":
        """Accept 'F7', 'f7', or a display name."""
        key = text.strip()
        try:
            return cls[key.upper()]
        except KeyError:
            pass
        for member in cls:
            if member.value.lower() == key.lower():
                return member
        raise UnknownFunction(text)


def bent_cigar(x: np.ndarray) -> float:
    return float(x[0] * x[0] + 1e6 * np.sum(x[1:] * x[1:]))


def discus(x: np.ndarray) -> float:
    return float(1e6 * x[0] * x[0] + np.sum(x[1:] * x[1:]))


def weierstrass(x: np.ndarray) -> float:
    # sum_i sum_k a^k cos(2 pi b^k (x_i + 0.5)) - n * sum_k a^k cos(pi b^k)
    inner = np.sum(_W_AK * np.cos(TWO_PI * _W_BK * (x[:, None] + 0.5)), axis=1)
    return float(np.sum(inner - _W_F0))


def modified_schwefel(x: np.ndarray) -> float:
    n = x.size
    z = x + _MS_OFFSET
    az = np.abs(z)
    # Piecewise g(z); the |z| > 500 branches wrap the argument back into range
    # and add a quadratic penalty.
    zm_hi = 500.0 - np.fmod(z, 500.0)
    zm_lo = np.fmod(az, 500.0) - 500.0
    g_mid = z * np.sin(np.sqrt(az))
    g_hi = zm_hi * np.sin(np.sqrt(np.abs(zm_hi))) - (z - 500.0) ** 2 / (10000.0 * n)
    g_lo = zm_lo * np.sin(np.sqrt(np.abs(zm_lo))) - (z + 500.0) ** 2 / (10000.0 * n)
    g = np.where(z > 500.0, g_hi, np.where(z < -500.0, g_lo, g_mid))
    return float(_MS_BIAS * n - np.sum(g))


def katsuura(x: np.ndarray) -> float:
    n = x.size
    t = _K_POW2 * x[:, None]
    series = np.sum(np.abs(t - np.floor(t + 0.5)) / _K_POW2, axis=1)
    factors = (1.0 + np.arange(1, n + 1) * series) ** (10.0 / n**1.2)
    scale = 10.0 / (n * n)
    return float(scale * np.prod(factors) - scale)


def happycat(x: np.ndarray) -> float:
    n = x.size
    r2 = float(np.sum(x * x))
    s = float(np.sum(x))
    return abs(r2 - n) ** 0.25 + (0.5 * r2 + s) / n + 0.5


def hgbat(x: np.ndarray) -> float:
    n = x.size
    r2 = float(np.sum(x * x))
    s = float(np.sum(x))
    return abs(r2 * r2 - s * s) ** 0.5 + (0.5 * r2 + s) / n + 0.5


def _griewank_scalar(t: np.ndarray) -> np.ndarray:
    return t * t / 4000.0 - np.cos(t) + 1.0


def expanded_griewank_rosenbrock(x: np.ndarray) -> float:
    # Cyclic pairs (x_i, x_{i+1}), Rosenbrock inside Griewank.
    a = x
    b = np.roll(x, -1)
    t = 100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2
    return float(np.sum(_griewank_scalar(t)))


def expanded_schaffer_f6(x: np.ndarray) -> float:
    a = x
    b = np.roll(x, -1)
    r2 = a * a + b * b
    num = np.sin(np.sqrt(r2)) ** 2 - 0.5
    den = (1.0 + 0.001 * r2) ** 2
    return float(np.sum(0.5 + num / den))


def rosenbrock(x: np.ndarray) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def griewank(x: np.ndarray) -> float:
    i = np.arange(1, x.size + 1, dtype=float)
    return float(np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0)


def rastrigin(x: np.ndarray) -> float:
    return float(np.sum(x * x - 10.0 * np.cos(TWO_PI * x) + 10.0))


def high_conditioned_elliptic(x: np.ndarray) -> float:
    n = x.size
    exps = np.zeros(n) if n == 1 else 6.0 * np.arange(n) / (n - 1)
    return float(np.sum(10.0**exps * x * x))


def ackley(x: np.ndarray) -> float:
    n = x.size
    rms = np.sqrt(np.sum(x * x) / n)
    mc = np.sum(np.cos(TWO_PI * x)) / n
    return float(-20.0 * np.exp(-0.2 * rms) - np.exp(mc) + 20.0 + np.e)


_FUNCTIONS = {
    FunctionId.F1: bent_cigar,
    FunctionId.F2: discus,
    FunctionId.F3: weierstrass,
    FunctionId.F4: modified_schwefel,
    FunctionId.F5: katsuura,
    FunctionId.F6: happycat,
    FunctionId.F7: hgbat,
    FunctionId.F8: expanded_griewank_rosenbrock,
    FunctionId.F9: expanded_schaffer_f6,
    FunctionId.F10: rosenbrock,
    FunctionId.F11: griewank,
    FunctionId.F12: rastrigin,
    FunctionId.F13: high_conditioned_elliptic,
    FunctionId.F14: ackley,
}

# Stack of active audit counters (thread-local so concurrent runs don't mix).
_tally_stack = threading.local()


@contextlib.contextmanager
def tally_evaluations():
    """Count every ``evaluate`` call made while the context is active.

    Used by the verification suite to audit budget accounting independently
    of ``EvaluationBudget``'s own counter.
    """
    stack = getattr(_tally_stack, "stack", None)
    if stack is None:
        stack = _tally_stack.stack = []
    counter = [0]
    stack.append(counter)
    try:
        yield counter
    finally:
        stack.pop()


def evaluate(fid: FunctionId, x) -> float:
    """Evaluate objective ``fid`` at point ``x``. Pure; no budget effects."""
    try:
        fn = _FUNCTIONS[fid]
    except (KeyError, TypeError):
        raise UnknownFunction(fid) from None
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise NonFiniteInput(f"expected a 1-D point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("point contains NaN or Inf")
    stack = getattr(_tally_stack, "stack", None)
    if stack:
        for counter in stack:
            counter[0] += 1
    return fn(arr)


@dataclass
class EvaluationBudget:
    """Hard cap on exact objective evaluations for a single run.

    Single-owner mutable state: one budget belongs to exactly one run.
    """

    cap: int
    used: int = field(default=0)

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError(f"cap must be positive, got {self.cap}")
        if not 0 <= self.used <= self.cap:
            raise ValueError(f"used={self.used} outside [0, {self.cap}]")

    @property
    def remaining(self) -> int:
        return self.cap - self.used


def make_budget(dim: int, per_dim: int = 50) -> EvaluationBudget:
    """Protocol budget: cap = per_dim * dimension evaluations (default 50)."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return EvaluationBudget(cap=per_dim * dim)


def budgeted_evaluate(budget: EvaluationBudget, fid: FunctionId, x) -> float:
    """Evaluate under a budget; the failing evaluation is never performed."""
    if budget.used >= budget.cap:
        raise BudgetExhausted(f"budget cap {budget.cap} reached")
    value = evaluate(fid, x)
    budget.used += 1
    return value


def function_catalog() -> list[dict]:
    """id -> display-name rows, in F1..F14 order."""
    return [{"id": fid.name, "name": fid.value} for fid in FunctionId]
