"""Evaluation of formulas and terms over J extended by an assignment.

Trees are compiled once per model into nested closures taking
``(tables, env)``, where ``tables`` maps every symbol to its table and
``env`` maps bound variables to elements.
"""
from __future__ import annotations

import itertools
import operator
from collections import defaultdict
from typing import Callable, Dict, Optional

from .logic import (
    App, Arith, Atom, BinOp, Cmp, Count, Elem, Int, Neg, Node, Not, Quant,
    Reachable, Sum, Var,
)
from .model import Assignment, Mop

INT_LIMIT = 2**63 - 1

_CMP = {
    "=": operator.eq, "!=": operator.ne, "<": operator.lt,
    "<=": operator.le, ">": operator.gt, ">=": operator.ge,
}


class EvaluationError(ArithmeticError):
    pass


def _checked(v: int) -> int:
    if -INT_LIMIT <= v <= INT_LIMIT:
        return v
    raise EvaluationError("arithmetic overflow")


def compile_term(t: Node, mop: Mop) -> Callable:
    dom = mop.structure.type_domains
    if isinstance(t, Var):
        name = t.name
        return lambda T, E: E[name]
    if isinstance(t, (Elem, Int)):
        value = t.value
        return lambda T, E: value
    if isinstance(t, App):
        name = t.symbol
        args = [compile_term(a, mop) for a in t.args]
        if not args:
            return lambda T, E: T[name][()]
        if len(args) == 1:
            a0 = args[0]
            return lambda T, E: T[name][(a0(T, E),)]
        if len(args) == 2:
            a0, a1 = args
            return lambda T, E: T[name][(a0(T, E), a1(T, E))]
        return lambda T, E: T[name][tuple(a(T, E) for a in args)]
    if isinstance(t, Arith):
        left, right = compile_term(t.left, mop), compile_term(t.right, mop)
        if t.op == "+":
            return lambda T, E: _checked(left(T, E) + right(T, E))
        return lambda T, E: _checked(left(T, E) - right(T, E))
    if isinstance(t, Neg):
        inner = compile_term(t.operand, mop)
        return lambda T, E: _checked(-inner(T, E))
    if isinstance(t, Sum):
        names = [v for v, _ in t.binders]
        domains = [dom[ty] for _, ty in t.binders]
        body = compile_term(t.body, mop)
        guard = compile_formula(t.guard, mop) if t.guard is not None else None

        def run_sum(T, E):
            total = 0
            for combo in itertools.product(*domains):
                E.update(zip(names, combo))
                if guard is None or guard(T, E):
                    total += body(T, E)
            for n in names:
                E.pop(n, None)
            return _checked(total)

        return run_sum
    if isinstance(t, Count):
        var, domain = t.var, dom[t.type_name]
        guard = compile_formula(t.guard, mop)

        def run_count(T, E):
            n = 0
            for v in domain:
                E[var] = v
                if guard(T, E):
                    n += 1
            E.pop(var, None)
            return n

        return run_count
    raise TypeError(f"cannot evaluate term {t!r}")


def compile_formula(f: Node, mop: Mop) -> Callable:
    dom = mop.structure.type_domains
    if isinstance(f, Quant):
        var, domain = f.var, dom[f.type_name]
        body = compile_formula(f.body, mop)
        if f.kind == "forall":
            def run_forall(T, E):
                for v in domain:
                    E[var] = v
                    if not body(T, E):
                        E.pop(var, None)
                        return False
                E.pop(var, None)
                return True
            return run_forall
        if f.kind == "exists":
            def run_exists(T, E):
                for v in domain:
                    E[var] = v
                    if body(T, E):
                        E.pop(var, None)
                        return True
                E.pop(var, None)
                return False
            return run_exists

        def run_exists1(T, E):
            found = 0
            for v in domain:
                E[var] = v
                if body(T, E):
                    found += 1
                    if found > 1:
                        break
            E.pop(var, None)
            return found == 1
        return run_exists1
    if isinstance(f, Not):
        inner = compile_formula(f.operand, mop)
        return lambda T, E: not inner(T, E)
    if isinstance(f, BinOp):
        left, right = compile_formula(f.left, mop), compile_formula(f.right, mop)
        if f.op == "&":
            return lambda T, E: left(T, E) and right(T, E)
        if f.op == "|":
            return lambda T, E: left(T, E) or right(T, E)
        if f.op == "=>":
            return lambda T, E: (not left(T, E)) or right(T, E)
        return lambda T, E: left(T, E) == right(T, E)
    if isinstance(f, Cmp):
        op = _CMP[f.op]
        left, right = compile_term(f.left, mop), compile_term(f.right, mop)
        return lambda T, E: op(left(T, E), right(T, E))
    if isinstance(f, Atom):
        name = f.symbol
        args = [compile_term(a, mop) for a in f.args]
        if len(args) == 1:
            a0 = args[0]
            return lambda T, E: (a0(T, E),) in T[name]
        return lambda T, E: tuple(a(T, E) for a in args) in T[name]
    if isinstance(f, Reachable):
        start = compile_term(f.start, mop)
        rel, domain = f.relation, dom[f.type_name]

        def run_reachable(T, E):
            return len(reach(start(T, E), T[rel])) == len(domain)

        return run_reachable
    raise TypeError(f"cannot evaluate formula {f!r}")


def reach(start, pairs) -> set:
    """Least fixpoint: elements reachable from ``start`` along ``pairs`` (start included)."""
    succ = defaultdict(list)
    for u, v in pairs:
        succ[u].append(v)
    seen = {start}
    stack = [start]
    while stack:
        for v in succ[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


class CompiledModel:
    def __init__(self, mop: Mop):
        self.mop = mop
        self.theory = [compile_formula(f, mop) for f in mop.theory]
        self.objective = compile_term(mop.objective, mop)
        self._cache: Dict[int, tuple] = {}

    def tables(self, a: Assignment) -> dict:
        T = dict(self.mop.structure.tables)
        T.update(a.tables)
        return T

    def check(self, a: Assignment) -> bool:
        T = self.tables(a)
        return all(f(T, {}) for f in self.theory)

    def cost(self, a: Assignment) -> int:
        return self.objective(self.tables(a), {})

    def formula(self, f: Node) -> Callable:
        hit = self._cache.get(id(f))
        if hit is None or hit[0] is not f:
            hit = (f, compile_formula(f, self.mop))
            self._cache[id(f)] = hit
        return hit[1]

    def term(self, t: Node) -> Callable:
        hit = self._cache.get(id(t))
        if hit is None or hit[0] is not t:
            hit = (t, compile_term(t, self.mop))
            self._cache[id(t)] = hit
        return hit[1]


def compiled(mop: Mop) -> CompiledModel:
    c = mop.cache.get("compiled")
    if c is None:
        c = mop.cache["compiled"] = CompiledModel(mop)
    return c


def eval_formula(f: Node, mop: Mop, a: Assignment, env: Optional[dict] = None) -> bool:
    c = compiled(mop)
    return bool(c.formula(f)(c.tables(a), dict(env or {})))


def eval_term(t: Node, mop: Mop, a: Assignment, env: Optional[dict] = None):
    c = compiled(mop)
    return c.term(t)(c.tables(a), dict(env or {}))


def check_model(mop: Mop, a: Assignment) -> bool:
    """True iff every theory formula holds."""
    return compiled(mop).check(a)


def cost(mop: Mop, a: Assignment) -> int:
    """Internal objective value (always minimized)."""
    return compiled(mop).cost(a)


def objective_value(mop: Mop, a: Assignment) -> int:
    """Objective value in the user's declared sense."""
    return mop.to_user(cost(mop, a))
