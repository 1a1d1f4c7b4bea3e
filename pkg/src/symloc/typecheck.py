"""Name resolution and type checking for formulas and terms.

The checker accepts both freshly parsed trees (with ``Name`` nodes) and
already-resolved trees, returning resolved copies.  While it walks a tree it
records which interval types are used numerically and which element literals
appear; symmetry detection reads those facts off a run over the theory.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from .logic import (
    COMPARISONS, CONNECTIVES, ORDER_COMPARISONS, QUANTIFIERS,
    App, Arith, Atom, BinOp, Cmp, Count, Elem, Formula, Int, Name, Neg, Node,
    Not, Quant, Reachable, Sum, Term, Var,
)
from .model import INT, Diagnostic, Vocabulary

Scope = Dict[str, str]


class Checker:
    def __init__(self, vocabulary: Vocabulary, diagnostics: Optional[List[Diagnostic]] = None):
        self.types = vocabulary.type_map
        self.symbols = vocabulary.symbol_map
        self.diags = diagnostics if diagnostics is not None else []
        self.labels = defaultdict(list)
        for t in vocabulary.types:
            for e in t.elements:
                self.labels[e].append(t.name)
        self.numeric_uses = set()
        self.literals = set()

    def error(self, message: str, node: Node):
        self.diags.append(Diagnostic(message, getattr(node, "span", None)))

    def numeric(self, type_name: Optional[str]) -> bool:
        if type_name == INT:
            return True
        t = self.types.get(type_name)
        return t is not None and t.numeric

    def _mark_numeric(self, *type_names):
        for ty in type_names:
            if ty in self.types:
                self.numeric_uses.add(ty)

    def _needs_context(self, t: Term, scope: Scope) -> bool:
        if isinstance(t, Int):
            return True
        return isinstance(t, Name) and t.ident not in scope and t.ident not in self.symbols

    def _declared_type(self, type_name: str, node: Node) -> bool:
        if type_name not in self.types:
            self.error(f"unknown type '{type_name}'", node)
            return False
        return True

    def _bind(self, scope: Scope, var: str, type_name: str, node: Node) -> Scope:
        if var in scope:
            self.error(f"duplicate variable '{var}' shadows an enclosing binding", node)
        inner = dict(scope)
        inner[var] = type_name
        return inner

    # -- terms ----------------------------------------------------------------

    def term(self, t: Node, scope: Scope, expected: Optional[str] = None) -> Tuple[Node, Optional[str]]:
        if isinstance(t, Name):
            if t.ident in scope:
                return Var(t.ident, t.span), scope[t.ident]
            if t.ident in self.symbols:
                return self._app(App(t.ident, (), t.span), scope)
            return self._element(t.ident, expected, t)
        if isinstance(t, Var):
            if t.name not in scope:
                self.error(f"unbound variable '{t.name}'", t)
                return t, None
            return t, scope[t.name]
        if isinstance(t, Elem):
            ty = self.types.get(t.type_name)
            if ty is None:
                self.error(f"unknown type '{t.type_name}'", t)
                return t, None
            if t.value not in ty.elements:
                self.error(f"unknown element '{t.value}' of type '{t.type_name}'", t)
                return t, None
            self.literals.add((t.type_name, t.value))
            return t, t.type_name
        if isinstance(t, Int):
            ty = self.types.get(expected)
            if ty is not None and ty.numeric and t.value in ty.elements:
                self.literals.add((ty.name, t.value))
                return Elem(t.value, ty.name, t.span), ty.name
            return t, INT
        if isinstance(t, App):
            return self._app(t, scope)
        if isinstance(t, Arith):
            left, lt = self.term(t.left, scope)
            right, rt = self.term(t.right, scope)
            if t.op not in ("+", "-"):
                self.error(f"unknown arithmetic operator '{t.op}'", t)
            for side, ty in ((t.left, lt), (t.right, rt)):
                if ty is not None and not self.numeric(ty):
                    self.error(f"type mismatch: arithmetic on non-integer type '{ty}'", side)
            self._mark_numeric(lt, rt)
            return Arith(t.op, left, right, t.span), INT
        if isinstance(t, Neg):
            inner, ty = self.term(t.operand, scope)
            if ty is not None and not self.numeric(ty):
                self.error(f"type mismatch: negation of non-integer type '{ty}'", t)
            self._mark_numeric(ty)
            return Neg(inner, t.span), INT
        if isinstance(t, Sum):
            inner = scope
            for var, type_name in t.binders:
                self._declared_type(type_name, t)
                inner = self._bind(inner, var, type_name, t)
            guard = self.formula(t.guard, inner) if t.guard is not None else None
            body, bt = self.term(t.body, inner)
            if bt is not None and not self.numeric(bt):
                self.error(f"type mismatch: sum body has non-integer type '{bt}'", t.body)
            self._mark_numeric(bt)
            return Sum(body, t.binders, guard, t.span), INT
        if isinstance(t, Count):
            self._declared_type(t.type_name, t)
            inner = self._bind(scope, t.var, t.type_name, t)
            guard = self.formula(t.guard, inner)
            return Count(t.var, t.type_name, guard, t.span), INT
        if isinstance(t, Formula):
            self.error("expected term, found formula", t)
            return t, None
        self.error(f"unsupported term {t!r}", t)
        return t, None

    def _element(self, label, expected, node):
        owners = self.labels.get(label, [])
        if expected in owners:
            ty = expected
        elif len(owners) == 1:
            ty = owners[0]
        elif owners:
            self.error(f"ambiguous element '{label}' (in types {', '.join(owners)})", node)
            return node, None
        else:
            self.error(f"unknown identifier '{label}'", node)
            return node, None
        self.literals.add((ty, label))
        return Elem(label, ty, node.span), ty

    def _app(self, t: App, scope: Scope):
        sym = self.symbols.get(t.symbol)
        if sym is None:
            self.error(f"unknown symbol '{t.symbol}'", t)
            return t, None
        if sym.is_predicate:
            self.error(f"expected term, found formula: '{t.symbol}' is a predicate", t)
            return t, None
        args = self._args(t, sym, scope)
        return App(t.symbol, args, t.span), sym.result

    def _args(self, node, sym, scope):
        if len(node.args) != sym.arity:
            self.error(
                f"arity mismatch: '{sym.name}' expects {sym.arity} argument(s), got {len(node.args)}",
                node,
            )
        out = []
        for i, arg in enumerate(node.args):
            want = sym.signature[i] if i < sym.arity else None
            resolved, ty = self.term(arg, scope, want)
            if want is not None and ty is not None and ty != want:
                self.error(
                    f"type mismatch: argument {i + 1} of '{sym.name}' expects {want}, found {ty}",
                    arg,
                )
            out.append(resolved)
        return tuple(out)

    # -- formulas -------------------------------------------------------------

    def formula(self, f: Node, scope: Scope) -> Node:
        if isinstance(f, Quant):
            if f.kind not in QUANTIFIERS:
                self.error(f"unknown quantifier '{f.kind}'", f)
            self._declared_type(f.type_name, f)
            inner = self._bind(scope, f.var, f.type_name, f)
            return Quant(f.kind, f.var, f.type_name, self.formula(f.body, inner), f.span)
        if isinstance(f, Not):
            return Not(self.formula(f.operand, scope), f.span)
        if isinstance(f, BinOp):
            if f.op not in CONNECTIVES:
                self.error(f"unknown connective '{f.op}'", f)
            return BinOp(f.op, self.formula(f.left, scope), self.formula(f.right, scope), f.span)
        if isinstance(f, Cmp):
            return self._cmp(f, scope)
        if isinstance(f, Atom):
            if f.symbol in scope:
                self.error(f"expected formula, found term: '{f.symbol}' is a variable", f)
                return f
            sym = self.symbols.get(f.symbol)
            if sym is None:
                if not f.args and f.symbol not in self.symbols:
                    self.error(f"unknown identifier '{f.symbol}'", f)
                else:
                    self.error(f"unknown symbol '{f.symbol}'", f)
                return f
            if not sym.is_predicate:
                self.error(f"expected formula, found term: '{f.symbol}' is a function", f)
                return f
            return Atom(f.symbol, self._args(f, sym, scope), f.span)
        if isinstance(f, Reachable):
            ok = self._declared_type(f.type_name, f)
            sym = self.symbols.get(f.relation)
            if sym is None:
                self.error(f"unknown symbol '{f.relation}'", f)
            elif not sym.is_predicate or (ok and sym.signature != (f.type_name, f.type_name)):
                self.error(
                    f"type mismatch: reachable needs a binary predicate over {f.type_name}", f
                )
            start, ty = self.term(f.start, scope, f.type_name)
            if ty is not None and ok and ty != f.type_name:
                self.error(f"type mismatch: reachable start must be of type {f.type_name}", f.start)
            return Reachable(start, f.relation, f.type_name, f.span)
        if isinstance(f, Term):
            self.error("expected formula, found term", f)
            return f
        self.error(f"unsupported formula {f!r}", f)
        return f

    def _cmp(self, f: Cmp, scope: Scope):
        if f.op not in COMPARISONS:
            self.error(f"unknown comparison '{f.op}'", f)
        if self._needs_context(f.left, scope) and not self._needs_context(f.right, scope):
            right, rt = self.term(f.right, scope)
            left, lt = self.term(f.left, scope, rt)
        else:
            left, lt = self.term(f.left, scope)
            right, rt = self.term(f.right, scope, lt)
        if lt is not None and rt is not None:
            if f.op in ORDER_COMPARISONS:
                if not (self.numeric(lt) and self.numeric(rt)):
                    self.error(f"type mismatch: order comparison between {lt} and {rt}", f)
                self._mark_numeric(lt, rt)
            elif lt != rt:
                if self.numeric(lt) and self.numeric(rt):
                    self._mark_numeric(lt, rt)
                else:
                    self.error(f"type mismatch: cannot compare {lt} with {rt}", f)
        return Cmp(f.op, left, right, f.span)
