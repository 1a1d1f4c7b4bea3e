"""In-memory model optimization problems (vocabulary, partial structure,
theory, objective) and their assignment space."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .logic import Neg, Node, Span, Term

INT = "int"
KINDS = ("pred", "func", "const")
SENSES = ("minimize", "maximize")
DEFAULT_SPACE_BOUND = 10**6


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: Optional[Span] = None
    severity: str = "error"

    def __str__(self):
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity}: {self.message}"


@dataclass(frozen=True)
class TypeDecl:
    name: str
    elements: Tuple = ()
    interval: Optional[Tuple[int, int]] = None

    @classmethod
    def range(cls, name: str, lo: int, hi: int) -> "TypeDecl":
        return cls(name, tuple(range(lo, hi + 1)), (lo, hi))

    @property
    def numeric(self) -> bool:
        return self.interval is not None


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    kind: str
    signature: Tuple[str, ...] = ()
    result: Optional[str] = None
    interpreted: bool = True

    @property
    def arity(self) -> int:
        return len(self.signature)

    @property
    def is_predicate(self) -> bool:
        return self.kind == "pred"

    def mentions(self, type_name: str) -> bool:
        return type_name in self.signature or self.result == type_name


@dataclass(frozen=True)
class Vocabulary:
    types: Tuple[TypeDecl, ...] = ()
    symbols: Tuple[SymbolDecl, ...] = ()

    @cached_property
    def type_map(self) -> Dict[str, TypeDecl]:
        return {t.name: t for t in self.types}

    @cached_property
    def symbol_map(self) -> Dict[str, SymbolDecl]:
        return {s.name: s for s in self.symbols}

    def type(self, name: str) -> TypeDecl:
        return self.type_map[name]

    def symbol(self, name: str) -> SymbolDecl:
        return self.symbol_map[name]

    @property
    def var_symbols(self) -> Tuple[SymbolDecl, ...]:
        return tuple(s for s in self.symbols if not s.interpreted)


@dataclass(frozen=True)
class PartialStructure:
    """Type domains plus tables of the interpreted symbols.

    Predicate tables are frozensets of tuples; function tables are dicts from
    argument tuples to values (constants use the key ``()``).
    """

    type_domains: Dict[str, Tuple] = field(default_factory=dict)
    tables: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class Mop:
    """A model optimization problem.

    ``objective`` is always the term to *minimize*; a maximization problem
    stores ``Neg(user_term)`` and keeps ``sense == "maximize"`` for reporting.
    """

    name: str
    vocabulary: Vocabulary
    structure: PartialStructure
    theory: Tuple[Node, ...]
    objective: Term
    sense: str = "minimize"

    @classmethod
    def create(cls, name, vocabulary, structure, theory, objective, sense="minimize") -> "Mop":
        if sense == "maximize":
            objective = Neg(objective)
        return cls(name, vocabulary, structure, tuple(theory), objective, sense)

    @property
    def user_objective(self) -> Term:
        if self.sense == "maximize" and isinstance(self.objective, Neg):
            return self.objective.operand
        return self.objective

    def domain(self, type_name: str) -> Tuple:
        return self.structure.type_domains[type_name]

    def to_user(self, cost: int) -> int:
        """Convert an internal (minimized) value back to the user's sense."""
        return -cost if self.sense == "maximize" else cost

    @cached_property
    def cache(self) -> dict:
        # per-model memo for compiled evaluators and detection indexes
        return {}


class Assignment:
    """Tables for every var symbol; hashable and compared by content."""

    __slots__ = ("tables", "_key")

    def __init__(self, tables):
        self.tables = dict(tables)
        self._key = None

    @property
    def key(self):
        if self._key is None:
            self._key = tuple(
                (name, frozenset(t.items()) if isinstance(t, dict) else t)
                for name, t in sorted(self.tables.items())
            )
        return self._key

    def __getitem__(self, name):
        return self.tables[name]

    def __eq__(self, other):
        return isinstance(other, Assignment) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        parts = []
        for name, t in self.tables.items():
            if isinstance(t, dict):
                parts.append(f"{name}={dict(t)!r}")
            else:
                parts.append(f"{name}={sorted(t, key=repr)!r}")
        return f"Assignment({', '.join(parts)})"


@dataclass
class ValidationReport:
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)

    def messages(self) -> List[str]:
        return [d.message for d in self.diagnostics]


def _well_typed(value, type_name, domains) -> bool:
    if type_name == INT:
        return isinstance(value, int) and not isinstance(value, bool)
    return value in domains.get(type_name, ())


def validate(mop: Mop) -> ValidationReport:
    """Check a model for internal consistency; never raises."""
    from .typecheck import Checker

    diags: List[Diagnostic] = []
    err = lambda msg: diags.append(Diagnostic(msg))
    vocab = mop.vocabulary

    seen = set()
    for t in vocab.types:
        if not t.name:
            err("empty type name")
        elif t.name in seen or t.name == INT:
            err(f"duplicate declaration of '{t.name}'")
        seen.add(t.name)
        if t.interval is not None and t.interval[0] > t.interval[1]:
            err(f"empty interval for type '{t.name}'")
        if not t.elements:
            err(f"type '{t.name}' has an empty domain")
        if len(set(t.elements)) != len(t.elements):
            err(f"duplicate element in type '{t.name}'")
        if mop.structure.type_domains.get(t.name) != tuple(t.elements):
            err(f"structure domain of type '{t.name}' disagrees with its declaration")
    declared_types = {t.name for t in vocab.types}

    for s in vocab.symbols:
        if not s.name:
            err("empty symbol name")
        elif s.name in seen:
            err(f"duplicate declaration of '{s.name}'")
        seen.add(s.name)
        if s.kind not in KINDS:
            err(f"unknown symbol kind '{s.kind}' for '{s.name}'")
        for ty in s.signature:
            if ty == INT:
                err(f"type mismatch: argument positions of '{s.name}' need a declared type, not int")
            elif ty not in declared_types:
                err(f"unknown type '{ty}' in signature of '{s.name}'")
        if s.kind == "pred" and s.result is not None:
            err(f"predicate '{s.name}' cannot have a result type")
        if s.kind in ("func", "const"):
            if s.result is None:
                err(f"function '{s.name}' needs a result type")
            elif s.result != INT and s.result not in declared_types:
                err(f"unknown type '{s.result}' in signature of '{s.name}'")
            elif s.result == INT and not s.interpreted:
                err(f"var symbol '{s.name}' cannot range over unbounded int")
        if s.kind == "const" and s.signature:
            err(f"constant '{s.name}' must have arity 0")

    domains = mop.structure.type_domains
    for s in vocab.symbols:
        table = mop.structure.tables.get(s.name)
        if not s.interpreted:
            if table is not None:
                err(f"var symbol with a table: '{s.name}'")
            continue
        if table is None:
            err(f"missing interpretation for '{s.name}'")
            continue
        if any(ty not in domains for ty in s.signature):
            continue
        if s.is_predicate:
            for tup in table:
                if len(tup) != s.arity or not all(
                    _well_typed(v, ty, domains) for v, ty in zip(tup, s.signature)
                ):
                    err(f"type mismatch: ill-typed tuple {tup!r} in table of '{s.name}'")
                    break
        else:
            if not isinstance(table, dict):
                err(f"function table of '{s.name}' must map argument tuples to values")
                continue
            for args, value in table.items():
                if (
                    not isinstance(args, tuple)
                    or len(args) != s.arity
                    or not all(_well_typed(v, ty, domains) for v, ty in zip(args, s.signature))
                ):
                    err(f"type mismatch: ill-typed entry {args!r} in table of '{s.name}'")
                    break
                if s.result is not None and not _well_typed(value, s.result, domains):
                    err(f"type mismatch: ill-typed value {value!r} in table of '{s.name}'")
                    break
            else:
                expected = 1
                for ty in s.signature:
                    expected *= len(domains[ty])
                if len(table) != expected:
                    err(f"partial function table for '{s.name}'")
    for name in mop.structure.tables:
        if name not in vocab.symbol_map:
            err(f"unknown symbol '{name}' in structure")

    checker = Checker(vocab, diags)
    for f in mop.theory:
        checker.formula(f, {})
    if mop.sense not in SENSES:
        err(f"unknown optimization sense '{mop.sense}'")
    elif mop.sense == "maximize" and not isinstance(mop.objective, Neg):
        err("maximize/minimize conflict: maximize objective not stored negated")
    _, ty = checker.term(mop.objective, {})
    if ty is not None and not checker.numeric(ty):
        err("type mismatch: objective must be an integer term")
    return ValidationReport(diags)


# -- assignment space ---------------------------------------------------------


def _entries(mop: Mop) -> List[Tuple[SymbolDecl, Tuple, Tuple]]:
    """(symbol, argument tuple, candidate values) for every var-table entry, canonical order."""
    out = []
    domains = mop.structure.type_domains
    for s in mop.vocabulary.var_symbols:
        values = (False, True) if s.is_predicate else tuple(domains[s.result])
        for args in itertools.product(*(domains[t] for t in s.signature)):
            out.append((s, args, values))
    return out


def var_entries(mop: Mop):
    return mop.cache.setdefault("entries", _entries(mop))


def assignment_space_size(mop: Mop, bound: int = DEFAULT_SPACE_BOUND) -> Optional[int]:
    """Exact number of total assignments, or ``None`` when it exceeds ``bound``."""
    size = 1
    for _, _, values in var_entries(mop):
        size *= len(values)
        if size > bound:
            return None
    return size


def build_assignment(mop: Mop, values: Sequence) -> Assignment:
    """Assemble an Assignment from one value per entry of ``var_entries``."""
    tables: Dict[str, object] = {}
    for s in mop.vocabulary.var_symbols:
        tables[s.name] = set() if s.is_predicate else {}
    for (s, args, _), v in zip(var_entries(mop), values):
        if s.is_predicate:
            if v:
                tables[s.name].add(args)
        else:
            tables[s.name][args] = v
    for s in mop.vocabulary.var_symbols:
        if s.is_predicate:
            tables[s.name] = frozenset(tables[s.name])
    return Assignment(tables)


def enumerate_assignments(mop: Mop, bound: int = DEFAULT_SPACE_BOUND) -> Iterator[Assignment]:
    """Every total assignment once, lexicographically in declared domain order."""
    if assignment_space_size(mop, bound) is None:
        raise ValueError("assignment space exceeds the enumeration bound")
    entries = var_entries(mop)
    for combo in itertools.product(*(vals for _, _, vals in entries)):
        yield build_assignment(mop, combo)


def random_assignment(mop: Mop, rng: random.Random) -> Assignment:
    return build_assignment(mop, [rng.choice(vals) for _, _, vals in var_entries(mop)])
