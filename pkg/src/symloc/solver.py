"""Complete backtracking search over var-symbol table entries.

Formulas are checked on partial assignments with Kleene (three-valued)
semantics: an entry that is not decided yet evaluates to ``None`` and a
branch is cut as soon as some theory formula becomes definitely false.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from .evaluator import _CMP, _checked, check_model, compiled
from .logic import (
    App, Arith, Atom, BinOp, Cmp, Count, Elem, Int, Neg, Node, Not, Quant,
    Reachable, Sum, Var, symbols_in,
)
from .model import Assignment, Mop, var_entries


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 1_000_000
    time_limit: Optional[float] = None

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")


@dataclass
class ExactResult:
    status: str  # 'sat' | 'unsat' | 'exhausted'
    assignment: Optional[Assignment] = None
    objective: Optional[int] = None
    nodes_explored: int = 0


class _OutOfBudget(Exception):
    pass


# -- three-valued compilation -------------------------------------------------


def _pterm(t: Node, mop: Mop, var_syms) -> Callable:
    dom = mop.structure.type_domains
    if isinstance(t, Var):
        name = t.name
        return lambda T, E: E[name]
    if isinstance(t, (Elem, Int)):
        value = t.value
        return lambda T, E: value
    if isinstance(t, App):
        name = t.symbol
        args = [_pterm(a, mop, var_syms) for a in t.args]
        partial = name in var_syms

        def app(T, E):
            key = []
            for a in args:
                v = a(T, E)
                if v is None:
                    return None
                key.append(v)
            table = T[name]
            return table.get(tuple(key)) if partial else table[tuple(key)]

        return app
    if isinstance(t, Arith):
        left, right = _pterm(t.left, mop, var_syms), _pterm(t.right, mop, var_syms)
        sign = 1 if t.op == "+" else -1

        def arith(T, E):
            lv, rv = left(T, E), right(T, E)
            if lv is None or rv is None:
                return None
            return _checked(lv + sign * rv)

        return arith
    if isinstance(t, Neg):
        inner = _pterm(t.operand, mop, var_syms)

        def neg(T, E):
            v = inner(T, E)
            return None if v is None else -v

        return neg
    if isinstance(t, Sum):
        names = [v for v, _ in t.binders]
        domains = [dom[ty] for _, ty in t.binders]
        body = _pterm(t.body, mop, var_syms)
        guard = _pformula(t.guard, mop, var_syms) if t.guard is not None else None

        def psum(T, E):
            total = 0
            unknown = False
            for combo in itertools.product(*domains):
                E.update(zip(names, combo))
                g = True if guard is None else guard(T, E)
                if g is False:
                    continue
                v = body(T, E)
                if g is None or v is None:
                    unknown = True
                    break
                total += v
            for n in names:
                E.pop(n, None)
            return None if unknown else total

        return psum
    if isinstance(t, Count):
        var, domain = t.var, dom[t.type_name]
        guard = _pformula(t.guard, mop, var_syms)

        def pcount(T, E):
            n = 0
            for v in domain:
                E[var] = v
                g = guard(T, E)
                if g is None:
                    E.pop(var, None)
                    return None
                n += g
            E.pop(var, None)
            return n

        return pcount
    raise TypeError(f"cannot evaluate term {t!r}")


def _pformula(f: Node, mop: Mop, var_syms) -> Callable:
    dom = mop.structure.type_domains
    if isinstance(f, Quant):
        var, domain = f.var, dom[f.type_name]
        body = _pformula(f.body, mop, var_syms)
        kind = f.kind

        def quant(T, E):
            trues = unknowns = 0
            result = "open"
            for v in domain:
                E[var] = v
                b = body(T, E)
                if b is None:
                    unknowns += 1
                elif b:
                    trues += 1
                    if kind == "exists":
                        result = True
                        break
                    if kind == "exists1" and trues > 1:
                        result = False
                        break
                elif kind == "forall":
                    result = False
                    break
            E.pop(var, None)
            if result != "open":
                return result
            if kind == "forall":
                return None if unknowns else True
            if kind == "exists":
                return None if unknowns else False
            if unknowns:
                return None
            return trues == 1

        return quant
    if isinstance(f, Not):
        inner = _pformula(f.operand, mop, var_syms)

        def pnot(T, E):
            v = inner(T, E)
            return None if v is None else not v

        return pnot
    if isinstance(f, BinOp):
        left, right = _pformula(f.left, mop, var_syms), _pformula(f.right, mop, var_syms)
        op = f.op

        def binop(T, E):
            lv = left(T, E)
            if op == "&" and lv is False:
                return False
            if op == "|" and lv is True:
                return True
            if op == "=>" and lv is False:
                return True
            rv = right(T, E)
            if op == "&":
                if rv is False:
                    return False
                return None if lv is None or rv is None else True
            if op == "|":
                if rv is True:
                    return True
                return None if lv is None or rv is None else False
            if op == "=>":
                if rv is True:
                    return True
                return None if lv is None or rv is None else False
            return None if lv is None or rv is None else lv == rv

        return binop
    if isinstance(f, Cmp):
        op = _CMP[f.op]
        left, right = _pterm(f.left, mop, var_syms), _pterm(f.right, mop, var_syms)

        def cmp(T, E):
            lv, rv = left(T, E), right(T, E)
            if lv is None or rv is None:
                return None
            return op(lv, rv)

        return cmp
    if isinstance(f, Atom):
        name = f.symbol
        args = [_pterm(a, mop, var_syms) for a in f.args]
        partial = name in var_syms

        def atom(T, E):
            key = []
            for a in args:
                v = a(T, E)
                if v is None:
                    return None
                key.append(v)
            if partial:
                return T[name].get(tuple(key))
            return tuple(key) in T[name]

        return atom
    if isinstance(f, Reachable):
        start = _pterm(f.start, mop, var_syms)
        rel, size = f.relation, len(dom[f.type_name])
        partial = rel in var_syms

        def reachable(T, E):
            s = start(T, E)
            if s is None:
                return None
            table = T[rel]
            if not partial:
                return len(_reach(s, table)) == size
            sure = [k for k, v in table.items() if v is True]
            if len(_reach(s, sure)) == size:
                return True
            possible = list(sure) + _undecided(mop, rel, table)
            if len(_reach(s, possible)) < size:
                return False
            return None

        return reachable
    raise TypeError(f"cannot evaluate formula {f!r}")


def _reach(start, pairs):
    from .evaluator import reach
    return reach(start, pairs)


def _undecided(mop, rel, table):
    sym = mop.vocabulary.symbol(rel)
    doms = [mop.domain(t) for t in sym.signature]
    return [k for k in itertools.product(*doms) if k not in table]


# -- search -------------------------------------------------------------------


class _Search:
    def __init__(self, mop: Mop, budget: Budget, value_orders: List[tuple]):
        self.mop = mop
        self.budget = budget
        self.entries = var_entries(mop)
        self.values = value_orders
        var_syms = {s.name for s in mop.vocabulary.var_symbols}
        self.partial: Dict[str, dict] = {name: {} for name in var_syms}
        self.tables = dict(mop.structure.tables)
        self.tables.update(self.partial)
        self.watch: Dict[str, List[Callable]] = {name: [] for name in var_syms}
        self.ground: List[Callable] = []
        for f in mop.theory:
            fn = _pformula(f, mop, var_syms)
            used = symbols_in(f) & var_syms
            if not used:
                self.ground.append(fn)
            for name in used:
                self.watch[name].append(fn)
        self.objective = _pterm(mop.objective, mop, var_syms)
        self.nodes = 0
        self.deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise _OutOfBudget
        if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise _OutOfBudget

    def consistent(self, name: str) -> bool:
        return all(fn(self.tables, {}) is not False for fn in self.watch[name])

    def snapshot(self) -> Assignment:
        tables = {}
        for s in self.mop.vocabulary.var_symbols:
            t = self.partial[s.name]
            tables[s.name] = frozenset(k for k, v in t.items() if v) if s.is_predicate else dict(t)
        return Assignment(tables)

    def dfs(self, depth: int, on_leaf: Callable[[Assignment], bool], bound: Callable[[], bool]) -> bool:
        """Returns True to stop the whole search."""
        if depth == len(self.entries):
            return on_leaf(self.snapshot())
        sym, args, _ = self.entries[depth]
        table = self.partial[sym.name]
        for v in self.values[depth]:
            self._tick()
            table[args] = v
            if self.consistent(sym.name) and not bound():
                if self.dfs(depth + 1, on_leaf, bound):
                    return True
            del table[args]
        return False

    def start_ok(self) -> bool:
        return all(fn(self.tables, {}) is not False for fn in self.ground)


def initial_model(mop: Mop, budget: Budget = Budget(), seed: int = 0) -> ExactResult:
    """First model found by depth-first search with seeded value shuffling."""
    rng = random.Random(seed)
    orders = []
    for _, _, values in var_entries(mop):
        vals = list(values)
        rng.shuffle(vals)
        orders.append(tuple(vals))
    search = _Search(mop, budget, orders)
    found: List[Assignment] = []

    def leaf(a):
        if check_model(mop, a):
            found.append(a)
            return True
        return False

    try:
        if search.start_ok():
            search.dfs(0, leaf, lambda: False)
    except _OutOfBudget:
        return ExactResult("exhausted", nodes_explored=search.nodes)
    if found:
        a = found[0]
        return ExactResult("sat", a, mop.to_user(compiled(mop).cost(a)), search.nodes)
    return ExactResult("unsat", nodes_explored=search.nodes)


def optimize_exact(mop: Mop, budget: Budget = Budget()) -> ExactResult:
    """Branch and bound in canonical order; on ``sat`` the objective is optimal."""
    search = _Search(mop, budget, [vals for _, _, vals in var_entries(mop)])
    c = compiled(mop)
    best: List = [None, None]  # cost, assignment

    def leaf(a):
        if c.check(a):
            v = c.cost(a)
            if best[0] is None or v < best[0]:
                best[0], best[1] = v, a
        return False

    def bound():
        if best[0] is None:
            return False
        v = search.objective(search.tables, {})
        return v is not None and v >= best[0]

    try:
        if search.start_ok():
            search.dfs(0, leaf, bound)
    except _OutOfBudget:
        if best[1] is None:
            return ExactResult("exhausted", nodes_explored=search.nodes)
        return ExactResult("exhausted", best[1], mop.to_user(best[0]), search.nodes)
    if best[1] is None:
        return ExactResult("unsat", nodes_explored=search.nodes)
    return ExactResult("sat", best[1], mop.to_user(best[0]), search.nodes)
