import pytest

from symloc.evaluator import check_model, objective_value
from symloc.neighborhood import build_neighborhood
from symloc.parser import parse_model
from symloc.search import (
    BudgetExhausted, SearchConfig, Unsatisfiable, local_search, run_pipeline,
)
from symloc.solver import Budget, initial_model, optimize_exact
from symloc.symmetry import detect

from conftest import gen


@pytest.mark.parametrize("kwargs", [
    {"strategy": "tabu"}, {"max_iters": 0}, {"cooling": 1.0}, {"cooling": 0.0},
    {"restarts": -1}, {"sideways_limit": -2}, {"temperature": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SearchConfig(**kwargs)


@pytest.mark.parametrize("strategy", ["first-improvement", "best-improvement", "annealing"])
def test_strategies_stay_feasible_and_never_worsen_best(tsp4, strategy):
    n = build_neighborhood(detect(tsp4))
    init = initial_model(tsp4, seed=4).assignment
    r = local_search(tsp4, n, init, SearchConfig(strategy=strategy, max_iters=50, seed=2))
    assert check_model(tsp4, r.best)
    assert r.best_objective == objective_value(tsp4, r.best) <= objective_value(tsp4, init)
    assert r.best_objective == min(v for _, v in r.trajectory)


def test_hill_climbing_trajectory_monotone(tsp4):
    n = build_neighborhood(detect(tsp4))
    r = local_search(tsp4, n, initial_model(tsp4, seed=1).assignment)
    values = [v for _, v in r.trajectory]
    assert values == sorted(values, reverse=True)
    assert r.termination == "local-optimum"


def test_local_optimum_has_no_improving_neighbor(tsp4):
    n = build_neighborhood(detect(tsp4))
    r = local_search(tsp4, n, initial_model(tsp4, seed=6).assignment)
    assert all(objective_value(tsp4, n.apply(i, r.best)) >= r.best_objective for i in range(len(n)))


def test_maximize_sense_improves_upward():
    m = gen("knapsack", 2, objects=6, equal_volume_pairs=3)
    res = run_pipeline(m, SearchConfig(seed=0))
    assert res.search.best_objective >= res.initial.objective
    assert res.search.best_objective <= optimize_exact(m).objective


def test_iteration_limit(tsp4):
    n = build_neighborhood(detect(tsp4))
    r = local_search(tsp4, n, initial_model(tsp4).assignment,
                     SearchConfig(strategy="annealing", max_iters=5))
    assert r.termination == "iter-limit" and r.iterations == 5


def test_time_limit(tsp4):
    n = build_neighborhood(detect(tsp4))
    r = local_search(tsp4, n, initial_model(tsp4).assignment,
                     SearchConfig(strategy="annealing", max_iters=10**7, time_limit=0.05))
    assert r.termination == "time-limit"


def test_sideways_moves(tsp4_sym):
    n = build_neighborhood(detect(tsp4_sym))
    init = initial_model(tsp4_sym).assignment
    flat = local_search(tsp4_sym, n, init, SearchConfig(sideways_limit=3, max_iters=100))
    assert flat.moves_executed >= 1
    assert flat.best_objective <= objective_value(tsp4_sym, init)


def test_restarts_deterministic_and_no_worse(tsp4):
    n = build_neighborhood(detect(tsp4))
    init = initial_model(tsp4, seed=9).assignment
    one = local_search(tsp4, n, init, SearchConfig(seed=3))
    many = local_search(tsp4, n, init, SearchConfig(seed=3, restarts=3))
    again = local_search(tsp4, n, init, SearchConfig(seed=3, restarts=3))
    assert many.best_objective <= one.best_objective
    assert (many.best, many.trajectory) == (again.best, again.trajectory)


def test_local_search_rejects_bad_inputs(tsp4, cnp_k3):
    n = build_neighborhood(detect(tsp4))
    with pytest.raises(ValueError):
        local_search(tsp4, None, initial_model(tsp4).assignment)
    bad = initial_model(tsp4).assignment
    bad = type(bad)({"Map": {(i,): "c1" for i in range(4)}})
    with pytest.raises(ValueError):
        local_search(tsp4, n, bad)


def test_pipeline_no_neighborhood(cnp_k3):
    res = run_pipeline(cnp_k3)
    assert res.termination == "no-neighborhood"
    assert res.neighborhood is None
    assert res.search.best == res.initial.assignment


def test_pipeline_unsat_and_budget(tsp4, cnp_k3):
    from symloc.instances import bundled_text
    two = parse_model(bundled_text("cnp_k3").replace("{k1, k2, k3}", "{k1, k2}"))
    with pytest.raises(Unsatisfiable):
        run_pipeline(two)
    with pytest.raises(BudgetExhausted):
        run_pipeline(tsp4, budget=Budget(max_nodes=1))


def test_pipeline_restarts_use_fresh_initial_models(bundled):
    m = bundled["knapsack3"]
    assert run_pipeline(m, SearchConfig(restarts=4)).search.best_objective == 16
