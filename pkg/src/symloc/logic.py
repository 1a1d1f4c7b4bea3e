"""Abstract syntax for theories and objective terms.

Nodes are frozen dataclasses; equality ignores source spans, so a model that
is printed and parsed again compares equal to the original.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterator, Optional, Tuple


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    length: int = 1
    file: Optional[str] = None

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("span line and column are 1-based")

    def __str__(self):
        prefix = f"{self.file}:" if self.file else ""
        return f"{prefix}{self.line}:{self.column}"


def _span():
    return field(default=None, compare=False, repr=False)


class Node:
    """Base class of every formula and term node."""

    span: Optional[Span]


class Term(Node):
    pass


class Formula(Node):
    pass


# -- terms --------------------------------------------------------------------


@dataclass(frozen=True)
class Name(Term):
    """Unresolved identifier; only present between parsing and type checking."""

    ident: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Var(Term):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Elem(Term):
    value: object
    type_name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Int(Term):
    value: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class App(Term):
    symbol: str
    args: Tuple[Term, ...] = ()
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Arith(Term):
    op: str  # '+' or '-'
    left: Term
    right: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Neg(Term):
    operand: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Sum(Term):
    body: Term
    binders: Tuple[Tuple[str, str], ...]
    guard: Optional[Formula] = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Count(Term):
    var: str
    type_name: str
    guard: Formula
    span: Optional[Span] = _span()


# -- formulas -----------------------------------------------------------------

QUANTIFIERS = ("forall", "exists", "exists1")
CONNECTIVES = ("&", "|", "=>", "<=>")
COMPARISONS = ("=", "!=", "<", "<=", ">", ">=")
ORDER_COMPARISONS = ("<", "<=", ">", ">=")


@dataclass(frozen=True)
class Quant(Formula):
    kind: str
    var: str
    type_name: str
    body: Formula
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BinOp(Formula):
    op: str
    left: Formula
    right: Formula
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Cmp(Formula):
    op: str
    left: Term
    right: Term
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Atom(Formula):
    symbol: str
    args: Tuple[Term, ...] = ()
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Reachable(Formula):
    """True iff every element of ``type_name`` is reachable from ``start`` via ``relation``."""

    start: Term
    relation: str
    type_name: str
    span: Optional[Span] = _span()


def children(node: Node) -> Iterator[Node]:
    for f in fields(node):
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield value
        elif isinstance(value, tuple):
            for item in value:
                if isinstance(item, Node):
                    yield item


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


def symbols_in(*nodes: Node) -> set:
    """Names of predicate and function symbols referenced by the given nodes."""
    out = set()
    for root in nodes:
        for n in walk(root):
            if isinstance(n, (App, Atom)):
                out.add(n.symbol)
            elif isinstance(n, Reachable):
                out.add(n.relation)
    return out
