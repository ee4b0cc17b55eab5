"""Benchmark suite: fixture spot-checks, purity, budget accounting."""
import json
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hctps.benchmarks import (
    EvaluationBudget,
    FunctionId,
    budgeted_evaluate,
    evaluate,
    function_catalog,
    make_budget,
    tally_evaluations,
)
from hctps.errors import BudgetExhausted, NonFiniteInput, UnknownFunction

from oracles import OPTIMUM_POINT, oracle_value

TABLE_NAMES = {
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


def fixture_entries():
    raw = resources.files("hctps.data").joinpath("functions.json").read_text("utf-8")
    return json.loads(raw)


def test_catalog_matches_published_table():
    catalog = function_catalog()
    assert len(catalog) == 14
    assert {row["id"]: row["name"] for row in catalog} == TABLE_NAMES


def test_parse_accepts_ids_and_names():
    assert FunctionId.parse("f7") is FunctionId.F7
    assert FunctionId.parse("Ackley") is FunctionId.F14
    with pytest.raises(UnknownFunction):
        FunctionId.parse("F15")


@pytest.mark.parametrize("entry", fixture_entries(), ids=lambda e: f"{e['id']}-d{e['dim']}")
def test_fixture_spot_checks(entry):
    fid = FunctionId[entry["id"]]
    for probe in entry["probe_points"]:
        got = evaluate(fid, probe["x"])
        want = probe["expected_f"]
        tol = 1e-9 if probe["kind"] == "optimum" else 1e-9 + 1e-9 * abs(want)
        assert got == pytest.approx(want, abs=tol), probe


def test_exact_optima_trivial_cases():
    zeros = [0.0] * 30
    ones = [1.0] * 30
    assert evaluate(FunctionId.F12, zeros) == 0.0
    assert evaluate(FunctionId.F11, zeros) == 0.0
    assert abs(evaluate(FunctionId.F14, zeros)) <= 1e-12
    assert evaluate(FunctionId.F10, ones) == 0.0
    # HappyCat optimum fixed by the reference-formula oracle at the -1 vector.
    assert oracle_value("F6", [-1.0] * 30) == 0.0
    assert evaluate(FunctionId.F6, [-1.0] * 30) == 0.0


@pytest.mark.parametrize("dim", [2, 3, 30])
@pytest.mark.parametrize("fid", list(FunctionId), ids=lambda f: f.name)
def test_all_functions_all_dims_finite_and_pure(fid, dim):
    rng = np.random.default_rng(7)
    x = rng.uniform(-100, 100, size=dim)
    first = evaluate(fid, x)
    second = evaluate(fid, x.copy())
    assert np.isfinite(first)
    assert first == second  # bitwise-equal outputs for equal inputs


@pytest.mark.parametrize("fid", list(FunctionId), ids=lambda f: f.name)
def test_documented_optimum_within_tolerance(fid):
    point = OPTIMUM_POINT[fid.name](30)
    assert evaluate(fid, point) == pytest.approx(oracle_value(fid.name, point), abs=1e-9)


def test_oracle_cross_check_random_points():
    rng = np.random.default_rng(123)
    for fid in FunctionId:
        for dim in (2, 30):
            x = np.round(rng.uniform(-100, 100, size=dim), 3)
            got = evaluate(fid, x)
            want = oracle_value(fid.name, list(x))
            assert got == pytest.approx(want, rel=1e-9, abs=1e-9), (fid, dim)


def test_evaluate_rejects_bad_input():
    with pytest.raises(UnknownFunction):
        evaluate("F1", [0.0] * 3)  # bare string is not a FunctionId
    with pytest.raises(NonFiniteInput):
        evaluate(FunctionId.F1, [0.0, np.nan, 1.0])
    with pytest.raises(NonFiniteInput):
        evaluate(FunctionId.F1, [np.inf, 0.0])


def test_make_budget_protocol_values():
    assert make_budget(30).cap == 1500
    assert make_budget(1).cap == 50
    assert make_budget(10).cap == 500
    assert make_budget(30).used == 0
    with pytest.raises(ValueError):
        make_budget(0)


def test_budgeted_evaluate_boundary_and_exhaustion():
    budget = EvaluationBudget(cap=1500, used=1499)
    assert budgeted_evaluate(budget, FunctionId.F1, [0.0] * 30) == 0.0
    assert budget.used == 1500
    with pytest.raises(BudgetExhausted):
        budgeted_evaluate(budget, FunctionId.F1, [0.0] * 30)
    assert budget.used == 1500  # the failing evaluation is not performed


def test_budget_loop_count_oracle():
    budget = make_budget(30)
    x = [1.0] * 30
    for _ in range(1500):
        budgeted_evaluate(budget, FunctionId.F13, x)
    assert budget.used == budget.cap == 1500
    with pytest.raises(BudgetExhausted):
        budgeted_evaluate(budget, FunctionId.F13, x)


@given(
    cap=st.integers(min_value=1, max_value=40),
    attempts=st.lists(st.booleans(), min_size=0, max_size=120),
)
@settings(max_examples=60, deadline=None)
def test_used_never_exceeds_cap_under_interleaving(cap, attempts):
    budget = EvaluationBudget(cap=cap)
    point = [0.5, -0.5]
    for should_try in attempts:
        if not should_try:
            continue
        try:
            budgeted_evaluate(budget, FunctionId.F9, point)
        except BudgetExhausted:
            pass
        assert 0 <= budget.used <= budget.cap


def test_tally_counts_every_evaluation():
    with tally_evaluations() as outer:
        evaluate(FunctionId.F1, [1.0, 2.0])
        with tally_evaluations() as inner:
            evaluate(FunctionId.F2, [1.0, 2.0])
        evaluate(FunctionId.F3, [1.0, 2.0])
    assert inner[0] == 1
    assert outer[0] == 3
