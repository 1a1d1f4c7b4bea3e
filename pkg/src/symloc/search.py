"""Local search over a symmetry-induced neighborhood, and the full
initial-model / detect / induce / search pipeline."""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .evaluator import compiled
from .model import Assignment, Mop
from .neighborhood import Neighborhood, build_neighborhood
from .solver import Budget, ExactResult, initial_model
from .symmetry import DetectionReport, Policy, detect

STRATEGIES = ("first-improvement", "best-improvement", "annealing")


@dataclass(frozen=True)
class SearchConfig:
    strategy: str = "best-improvement"
    max_iters: int = 1000
    restarts: int = 0
    sideways_limit: int = 0
    seed: int = 0
    time_limit: Optional[float] = None
    temperature: float = 10.0
    cooling: float = 0.95

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy '{self.strategy}'")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.restarts < 0 or self.sideways_limit < 0:
            raise ValueError("restarts and sideways_limit must be >= 0")
        if not 0 < self.cooling < 1:
            raise ValueError("cooling factor must lie in (0, 1)")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


@dataclass
class SearchResult:
    best: Assignment
    best_objective: int
    iterations: int = 0
    moves_executed: int = 0
    trajectory: List[Tuple[int, int]] = field(default_factory=list)
    termination: str = "local-optimum"  # local-optimum | iter-limit | time-limit | no-neighborhood


class SearchError(Exception):
    pass


class Unsatisfiable(SearchError):
    pass


class BudgetExhausted(SearchError):
    pass


def _run(mop: Mop, n: Neighborhood, init: Assignment, cfg: SearchConfig,
         rng: random.Random, deadline: Optional[float]) -> SearchResult:
    c = compiled(mop)
    current, cur_cost = init, c.cost(init)
    best, best_cost = current, cur_cost
    k = len(n.generators)
    result = SearchResult(best, mop.to_user(best_cost), trajectory=[(0, mop.to_user(cur_cost))])
    sideways = 0
    temp = cfg.temperature
    termination = "iter-limit"
    for it in range(1, cfg.max_iters + 1):
        if deadline is not None and time.monotonic() > deadline:
            termination = "time-limit"
            break
        result.iterations = it
        chosen = None
        if cfg.strategy == "annealing":
            i = rng.randrange(k)
            cand = n.apply(i, current)
            cand_cost = c.cost(cand)
            delta = cand_cost - cur_cost
            if delta <= 0 or rng.random() < math.exp(-delta / temp):
                chosen = (cand, cand_cost)
            temp *= cfg.cooling
        else:
            if cfg.strategy == "first-improvement":
                order = list(range(k))
                rng.shuffle(order)
            else:
                order = range(k)
            improving = sideways_move = None
            best_seen = None
            for i in order:
                cand = n.apply(i, current)
                cand_cost = c.cost(cand)
                if cfg.strategy == "first-improvement" and cand_cost < cur_cost:
                    improving = (cand, cand_cost)
                    break
                if best_seen is None or cand_cost < best_seen[1]:
                    best_seen = (cand, cand_cost)
                if cand_cost == cur_cost and sideways_move is None:
                    sideways_move = (cand, cand_cost)
            if cfg.strategy == "best-improvement" and best_seen and best_seen[1] < cur_cost:
                improving = best_seen
            if improving is not None:
                chosen = improving
                sideways = 0
            elif sideways_move is not None and sideways < cfg.sideways_limit:
                chosen = sideways_move
                sideways += 1
            else:
                termination = "local-optimum"
                result.trajectory.append((it, mop.to_user(cur_cost)))
                break
        if chosen is not None:
            current, cur_cost = chosen
            result.moves_executed += 1
            if cur_cost < best_cost:
                best, best_cost = current, cur_cost
        result.trajectory.append((it, mop.to_user(cur_cost)))
    result.best, result.best_objective = best, mop.to_user(best_cost)
    result.termination = termination
    return result


def local_search(mop: Mop, n: Optional[Neighborhood], init: Assignment,
                 cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Neighborhood search from the model ``init``; deterministic given ``cfg.seed``.

    Restart ``r >= 1`` starts from a seeded random walk of ``len(n)`` moves
    away from ``init``; the best run wins, ties going to the lowest index.
    """
    if n is None or not n.generators:
        raise ValueError("local search needs a non-empty neighborhood")
    if not compiled(mop).check(init):
        raise ValueError("initial assignment is not a model")
    deadline = None if cfg.time_limit is None else time.monotonic() + cfg.time_limit
    results = []
    for r in range(cfg.restarts + 1):
        rng = random.Random(f"{cfg.seed}:{r}")
        start = init
        for _ in range(len(n.generators) if r else 0):
            start = n.apply(rng.randrange(len(n.generators)), start)
        results.append(_run(mop, n, start, cfg, rng, deadline))
    return _merge(mop, results)


def _merge(mop: Mop, results: List[SearchResult]) -> SearchResult:
    # lowest internal cost, then lowest restart index
    sign = -1 if mop.sense == "maximize" else 1
    winner = min(range(len(results)), key=lambda i: (sign * results[i].best_objective, i))
    out = results[winner]
    if len(results) > 1:
        out = SearchResult(
            out.best, out.best_objective,
            iterations=sum(r.iterations for r in results),
            moves_executed=sum(r.moves_executed for r in results),
            trajectory=out.trajectory, termination=out.termination,
        )
    return out


@dataclass
class PipelineResult:
    initial: ExactResult
    report: DetectionReport
    neighborhood: Optional[Neighborhood]
    search: SearchResult

    @property
    def termination(self) -> str:
        return self.search.termination


def run_pipeline(mop: Mop, cfg: SearchConfig = SearchConfig(), policy: Optional[Policy] = None,
                 budget: Budget = Budget()) -> PipelineResult:
    """Initial model from the exact solver, detection, neighborhood, local search.

    With ``cfg.restarts = k`` the solver supplies ``k + 1`` initial models
    (seeds ``cfg.seed .. cfg.seed + k``); each is searched once.
    """
    init = initial_model(mop, budget, cfg.seed)
    if init.status == "unsat":
        raise Unsatisfiable("theory has no model")
    if init.status == "exhausted":
        raise BudgetExhausted("budget exhausted before an initial model was found")
    report = detect(mop, policy or Policy.auto(mop, seed=cfg.seed))
    n = build_neighborhood(report)
    if n is None:
        c = compiled(mop)
        value = mop.to_user(c.cost(init.assignment))
        res = SearchResult(init.assignment, value, trajectory=[(0, value)], termination="no-neighborhood")
        return PipelineResult(init, report, None, res)
    single = SearchConfig(cfg.strategy, cfg.max_iters, 0, cfg.sideways_limit, cfg.seed,
                          cfg.time_limit, cfg.temperature, cfg.cooling)
    results = [local_search(mop, n, init.assignment, single)]
    for r in range(1, cfg.restarts + 1):
        start = initial_model(mop, budget, cfg.seed + r)
        if start.status != "sat":
            continue
        results.append(local_search(mop, n, start.assignment, single))
    return PipelineResult(init, report, n, _merge(mop, results))
