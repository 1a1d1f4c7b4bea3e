"""Text front end for ``.mop`` models and JSON assignments.

Example model::

    mop tsp {
      type Index = 0..3;
      type City = {c1, c2, c3, c4};
      func Distance(City, City) -> int;
      func Next(Index) -> Index;
      var func Map(Index) -> City;
      constraint forall x in Index: forall y in Index: x != y => Map(x) != Map(y);
      minimize sum{ Distance(Map(z), Map(Next(z))) | z in Index };
      Next = {0->1, 1->2, 2->3, 3->0};
      Distance = {...};
    }
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .logic import (
    App, Arith, Atom, BinOp, Cmp, Count, Elem, Int, Name, Neg, Node, Not,
    Quant, Reachable, Span, Sum, Var,
)
from .model import (
    INT, Assignment, Diagnostic, Mop, PartialStructure, SymbolDecl, TypeDecl,
    Vocabulary, validate,
)
from .typecheck import Checker

ParseDiagnostic = Diagnostic

KEYWORDS = {
    "mop", "type", "pred", "func", "const", "var", "constraint", "minimize",
    "maximize", "forall", "exists", "exists1", "in", "reachable", "sum", "count",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|//[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><=>|=>|->|\.\.|!=|<=|>=|[{}()\[\],;:=<>&|!+\-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'int', 'ident', 'op', 'eof'
    text: str
    line: int
    column: int

    def span(self, file=None) -> Span:
        return Span(self.line, self.column, max(len(self.text), 1), file)

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else f"'{self.text}'"


class ModelSyntaxError(Exception):
    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


class _Fail(Exception):
    def __init__(self, diagnostic):
        self.diagnostic = diagnostic


def tokenize(text: str, file: Optional[str] = None) -> List[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            span = Span(line, col, 1, file)
            raise _Fail(Diagnostic(f"syntax error: unexpected character {text[pos]!r}", span))
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- raw declarations ---------------------------------------------------------


@dataclass
class _Data:
    target: str
    kind: str  # 'entries', 'interval', 'value'
    payload: object
    span: Span


class _Parser:
    def __init__(self, tokens: List[Token], file=None):
        self.toks = tokens
        self.i = 0
        self.file = file

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text in texts

    def fail(self, what: str):
        raise _Fail(Diagnostic(f"syntax error: expected {what}, found {self.tok.describe()}",
                               self.tok.span(self.file)))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            if self.i == 0 and text == "mop":
                raise _Fail(Diagnostic("syntax error: expected 'mop'", self.tok.span(self.file)))
            self.fail(f"'{text}'")
        t = self.tok
        self.i += 1
        return t

    def ident(self, what="identifier") -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.fail(what)
        self.i += 1
        return t

    def span(self, tok: Token) -> Span:
        return tok.span(self.file)

    # model
    def model(self):
        self.expect("mop")
        name = self.ident("model name").text
        self.expect("{")
        decls = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail("'}'")
            decls.append(self.decl())
        self.expect("}")
        if self.tok.kind != "eof":
            self.fail("end of input")
        return name, decls

    def decl(self):
        t = self.tok
        if self.at("type"):
            self.i += 1
            name = self.ident("type name")
            domain = None
            if self.at("="):
                self.i += 1
                domain = self.domain()
            self.expect(";")
            return ("type", name, domain)
        if self.at("var"):
            self.i += 1
            if not self.at("pred", "func", "const"):
                self.fail("'pred', 'func' or 'const'")
            return self.symbol_decl(interpreted=False)
        if self.at("pred", "func", "const"):
            return self.symbol_decl(interpreted=True)
        if self.at("constraint"):
            self.i += 1
            f = self.formula()
            self.expect(";")
            return ("constraint", t, f)
        if self.at("minimize", "maximize"):
            self.i += 1
            term = self.term()
            self.expect(";")
            return ("objective", t, term)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            self.expect("=")
            data = self.data(t)
            self.expect(";")
            return ("data", t, data)
        self.fail("declaration")

    def domain(self):
        if self.at("{"):
            self.i += 1
            labels = [self.ident("element label")]
            while self.at(","):
                self.i += 1
                labels.append(self.ident("element label"))
            self.expect("}")
            return ("labels", labels)
        lo = self.signed_int()
        self.expect("..")
        hi = self.signed_int()
        return ("interval", (lo, hi))

    def signed_int(self) -> int:
        neg = False
        if self.at("-"):
            neg = True
            self.i += 1
        if self.tok.kind != "int":
            self.fail("integer")
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    def symbol_decl(self, interpreted: bool):
        kind_tok = self.tok
        kind = kind_tok.text
        self.i += 1
        name = self.ident("symbol name")
        sig: List[Token] = []
        if self.at("("):
            self.i += 1
            if not self.at(")"):
                sig.append(self.type_ref())
                while self.at(","):
                    self.i += 1
                    sig.append(self.type_ref())
            self.expect(")")
        elif kind != "const":
            self.fail("'('")
        result = None
        if self.at("->"):
            self.i += 1
            result = self.type_ref()
        self.expect(";")
        return ("symbol", kind_tok, name, kind, sig, result, interpreted)

    def type_ref(self) -> Token:
        t = self.tok
        if t.kind != "ident" or (t.text in KEYWORDS):
            self.fail("type name")
        self.i += 1
        return t

    def value(self):
        """Table cell: label or (signed) integer, with its token."""
        t = self.tok
        if t.kind == "int" or self.at("-"):
            return self.signed_int(), t
        return self.ident("value").text, t

    def data(self, target: Token) -> _Data:
        start = self.tok
        if self.at("{"):
            self.i += 1
            entries = []
            if not self.at("}"):
                entries.append(self.entry())
                while self.at(","):
                    self.i += 1
                    entries.append(self.entry())
            self.expect("}")
            return _Data(target.text, "entries", entries, self.span(start))
        if self.tok.kind == "int" or self.at("-"):
            lo = self.signed_int()
            if self.at(".."):
                self.i += 1
                hi = self.signed_int()
                return _Data(target.text, "interval", (lo, hi), self.span(start))
            return _Data(target.text, "value", (lo, start), self.span(start))
        v = self.value()
        return _Data(target.text, "value", v, self.span(start))

    def entry(self):
        if self.at("("):
            self.i += 1
            args = []
            if not self.at(")"):
                args.append(self.value())
                while self.at(","):
                    self.i += 1
                    args.append(self.value())
            self.expect(")")
        else:
            args = [self.value()]
        result = None
        if self.at("->"):
            self.i += 1
            result = self.value()
        return args, result

    # formulas
    def formula(self):
        left = self.implication()
        while self.at("<=>"):
            t = self.tok
            self.i += 1
            left = BinOp("<=>", left, self.implication(), self.span(t))
        return left

    def implication(self):
        left = self.disjunction()
        if self.at("=>"):
            t = self.tok
            self.i += 1
            return BinOp("=>", left, self.implication(), self.span(t))
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.at("|"):
            t = self.tok
            self.i += 1
            left = BinOp("|", left, self.conjunction(), self.span(t))
        return left

    def conjunction(self):
        left = self.unary()
        while self.at("&"):
            t = self.tok
            self.i += 1
            left = BinOp("&", left, self.unary(), self.span(t))
        return left

    def unary(self):
        t = self.tok
        if self.at("!"):
            self.i += 1
            return Not(self.unary(), self.span(t))
        if self.at("forall", "exists", "exists1"):
            self.i += 1
            var = self.ident("variable").text
            self.expect("in")
            ty = self.ident("type name").text
            self.expect(":")
            return Quant(t.text, var, ty, self.formula(), self.span(t))
        if self.at("reachable"):
            self.i += 1
            self.expect("(")
            start = self.term()
            self.expect(",")
            rel = self.ident("relation symbol").text
            self.expect(",")
            ty = self.ident("type name").text
            self.expect(")")
            return Reachable(start, rel, ty, self.span(t))
        return self.atomic()

    def atomic(self):
        mark = self.i
        try:
            left = self.term()
        except _Fail:
            left = None
            self.i = mark
        if left is not None:
            if self.at("=", "!=", "<", "<=", ">", ">="):
                op = self.tok.text
                op_tok = self.tok
                self.i += 1
                return Cmp(op, left, self.term(), self.span(op_tok))
            if isinstance(left, Name) and (self.i - mark) == 1:
                return Atom(left.ident, (), left.span)
            if isinstance(left, App) and not self._parenthesized(mark):
                return Atom(left.symbol, left.args, left.span)
        self.i = mark
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        if left is not None:
            self.i = mark
            self.term()
            self.fail("comparison operator")
        self.fail("formula")

    def _parenthesized(self, mark) -> bool:
        return self.toks[mark].text == "("

    # terms
    def term(self):
        left = self.primary()
        while self.at("+", "-"):
            t = self.tok
            self.i += 1
            left = Arith(t.text, left, self.primary(), self.span(t))
        return left

    def primary(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Int(int(t.text), self.span(t))
        if self.at("-"):
            self.i += 1
            if self.tok.kind == "int":
                n = self.tok
                self.i += 1
                return Int(-int(n.text), self.span(t))
            return Neg(self.primary(), self.span(t))
        if self.at("("):
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        if self.at("sum"):
            self.i += 1
            self.expect("{")
            body = self.term()
            self.expect("|")
            binders = [self.binder()]
            guard = None
            while self.at(","):
                self.i += 1
                if self.tok.kind == "ident" and self.peek().text == "in" and self.tok.text not in KEYWORDS:
                    binders.append(self.binder())
                else:
                    guard = self.formula()
                    break
            self.expect("}")
            return Sum(body, tuple(binders), guard, self.span(t))
        if self.at("count"):
            self.i += 1
            self.expect("{")
            var, ty = self.binder()
            self.expect("|")
            guard = self.formula()
            self.expect("}")
            return Count(var, ty, guard, self.span(t))
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if self.at("("):
                self.i += 1
                args = []
                if not self.at(")"):
                    args.append(self.term())
                    while self.at(","):
                        self.i += 1
                        args.append(self.term())
                self.expect(")")
                return App(t.text, tuple(args), self.span(t))
            return Name(t.text, self.span(t))
        self.fail("term")

    def binder(self):
        var = self.ident("variable").text
        self.expect("in")
        ty = self.ident("type name").text
        return var, ty


# -- resolution into a Mop ----------------------------------------------------


def _resolve(name: str, decls, file) -> Tuple[Optional[Mop], List[Diagnostic]]:
    diags: List[Diagnostic] = []

    def err(msg, span):
        diags.append(Diagnostic(msg, span))

    types: Dict[str, Optional[TypeDecl]] = {}
    type_spans = {}
    symbols: Dict[str, SymbolDecl] = {}
    symbol_spans = {}
    theory_raw, objectives, data = [], [], {}

    for d in decls:
        if d[0] == "type":
            _, tok, domain = d
            if tok.text in types or tok.text in symbols or tok.text == INT:
                err(f"duplicate declaration of '{tok.text}'", tok.span(file))
                continue
            types[tok.text] = _type_from(tok, domain, err, file)
            type_spans[tok.text] = tok.span(file)
        elif d[0] == "symbol":
            _, kind_tok, tok, kind, sig, result, interpreted = d
            if tok.text in types or tok.text in symbols:
                err(f"duplicate declaration of '{tok.text}'", tok.span(file))
                continue
            if kind == "pred" and result is not None:
                err(f"syntax error: predicate '{tok.text}' cannot have a result type", result.span(file))
            if kind in ("func", "const") and result is None:
                err(f"syntax error: expected '->' result type for '{tok.text}'", tok.span(file))
            if kind == "const" and sig:
                err(f"type mismatch: constant '{tok.text}' must have arity 0", tok.span(file))
            symbols[tok.text] = SymbolDecl(
                tok.text, kind, tuple(s.text for s in sig),
                result.text if result is not None else None, interpreted,
            )
            symbol_spans[tok.text] = (tok.span(file), sig, result)
        elif d[0] == "constraint":
            theory_raw.append(d[2])
        elif d[0] == "objective":
            objectives.append(d)
        else:
            _, tok, payload = d
            if tok.text in data:
                err(f"duplicate declaration of data for '{tok.text}'", tok.span(file))
                continue
            data[tok.text] = payload

    # type domains given as data lines
    for tname, payload in list(data.items()):
        if tname in types:
            del data[tname]
            if types[tname] is not None:
                err(f"duplicate declaration of domain for type '{tname}'", payload.span)
                continue
            if payload.kind == "interval":
                lo, hi = payload.payload
                types[tname] = _type_from_interval(tname, lo, hi, err, payload.span)
            elif payload.kind == "entries" and all(r is None and len(a) == 1 for a, r in payload.payload):
                labels = [a[0] for a, _ in payload.payload]
                if any(isinstance(v, int) for v, _ in labels):
                    err(f"type mismatch: element labels of '{tname}' must be identifiers", payload.span)
                    continue
                types[tname] = _type_from_labels(tname, [(v, t) for v, t in labels], err, file)
            else:
                err(f"syntax error: expected a domain for type '{tname}'", payload.span)
    for tname, decl in types.items():
        if decl is None:
            err(f"type '{tname}' has no domain", type_spans[tname])

    type_decls = tuple(t for t in types.values() if t is not None)
    for sname, (span, sig, result) in symbol_spans.items():
        for tok in list(sig) + ([result] if result is not None else []):
            if tok.text == INT and tok is not result:
                err(f"type mismatch: argument positions of '{sname}' need a declared type, not int",
                    tok.span(file))
            elif tok.text != INT and tok.text not in types:
                err(f"unknown identifier: type '{tok.text}'", tok.span(file))
        s = symbols[sname]
        if result is not None and result.text == INT and not s.interpreted:
            err(f"type mismatch: var symbol '{sname}' cannot range over unbounded int", result.span(file))
    if diags:
        return None, diags

    vocab = Vocabulary(type_decls, tuple(symbols.values()))
    domains = {t.name: tuple(t.elements) for t in type_decls}
    label_maps = {t.name: {e: e for e in t.elements} for t in type_decls}

    tables = {}
    for sname, payload in data.items():
        s = symbols.get(sname)
        if s is None:
            err(f"unknown identifier '{sname}'", payload.span)
            continue
        if not s.interpreted:
            err(f"var symbol with a table: '{sname}'", payload.span)
            continue
        table = _table_from(s, payload, label_maps, err, file)
        if table is not None:
            tables[sname] = table
    for s in symbols.values():
        if s.interpreted and s.name not in tables and s.name not in data:
            err(f"missing interpretation for '{s.name}'", symbol_spans[s.name][0])
    if diags:
        return None, diags

    checker = Checker(vocab, diags)
    theory = tuple(checker.formula(f, {}) for f in theory_raw)
    if not objectives:
        err("syntax error: expected 'minimize' or 'maximize' declaration",
            Span(1, 1, 1, file))
        return None, diags
    if len(objectives) > 1:
        err("maximize/minimize conflict: more than one objective", objectives[1][1].span(file))
        return None, diags
    _, sense_tok, raw_obj = objectives[0]
    objective, oty = checker.term(raw_obj, {})
    if oty is not None and not checker.numeric(oty):
        err("type mismatch: objective must be an integer term", raw_obj.span)
    if diags:
        return None, diags
    mop = Mop.create(name, vocab, PartialStructure(domains, tables), theory, objective, sense_tok.text)
    report = validate(mop)
    if not report.ok:
        return None, report.diagnostics
    return mop, []


def _type_from(tok, domain, err, file):
    if domain is None:
        return None
    kind, payload = domain
    if kind == "interval":
        return _type_from_interval(tok.text, *payload, err, tok.span(file))
    return _type_from_labels(tok.text, [(t.text, t) for t in payload], err, file)


def _type_from_interval(name, lo, hi, err, span):
    if lo > hi:
        err(f"type mismatch: empty interval {lo}..{hi} for type '{name}'", span)
        return None
    return TypeDecl.range(name, lo, hi)


def _type_from_labels(name, labels, err, file):
    seen = []
    for label, tok in labels:
        if label in seen:
            err(f"duplicate declaration of element '{label}' in type '{name}'", tok.span(file))
            continue
        seen.append(label)
    return TypeDecl(name, tuple(seen))


def _cell(value_tok, type_name, label_maps, err, file, sname):
    value, tok = value_tok
    if type_name == INT:
        if isinstance(value, int):
            return True, value
        err(f"type mismatch: expected an integer in table of '{sname}', found '{value}'", tok.span(file))
        return False, None
    if value in label_maps[type_name]:
        return True, value
    err(f"unknown element '{value}' of type '{type_name}' in table of '{sname}'", tok.span(file))
    return False, None


def _table_from(s: SymbolDecl, payload: _Data, label_maps, err, file):
    if payload.kind == "interval":
        err(f"type mismatch: '{s.name}' cannot be given an interval", payload.span)
        return None
    if payload.kind == "value":
        if s.kind == "pred" or s.arity != 0:
            err(f"type mismatch: '{s.name}' needs a table, not a single value", payload.span)
            return None
        ok, v = _cell(payload.payload, s.result, label_maps, err, file, s.name)
        return {(): v} if ok else None
    if s.is_predicate:
        rows = set()
        for args, result in payload.payload:
            if result is not None:
                err(f"type mismatch: predicate '{s.name}' table entries take no result", payload.span)
                return None
            if len(args) != s.arity:
                err(f"arity mismatch: '{s.name}' expects {s.arity}-tuples", args[0][1].span(file) if args else payload.span)
                return None
            cells = [_cell(a, ty, label_maps, err, file, s.name) for a, ty in zip(args, s.signature)]
            if not all(ok for ok, _ in cells):
                return None
            rows.add(tuple(v for _, v in cells))
        return frozenset(rows)
    table = {}
    for args, result in payload.payload:
        if result is None:
            err(f"syntax error: function '{s.name}' entries need '-> value'", payload.span)
            return None
        if len(args) != s.arity:
            err(f"arity mismatch: '{s.name}' expects {s.arity} argument(s)", args[0][1].span(file) if args else payload.span)
            return None
        cells = [_cell(a, ty, label_maps, err, file, s.name) for a, ty in zip(args, s.signature)]
        ok_r, value = _cell(result, s.result, label_maps, err, file, s.name)
        if not ok_r or not all(ok for ok, _ in cells):
            return None
        key = tuple(v for _, v in cells)
        if key in table and table[key] != value:
            err(f"function table for '{s.name}' is not single-valued at {key!r}", result[1].span(file))
            return None
        table[key] = value
    return table


def parse_model(text: str, file: Optional[str] = None) -> Mop:
    """Parse model text; raises :class:`ModelSyntaxError` carrying diagnostics."""
    mop, diags = parse_model_diagnostics(text, file)
    if mop is None:
        raise ModelSyntaxError(diags)
    return mop


def parse_model_diagnostics(text: str, file: Optional[str] = None):
    """Return ``(mop, [])`` on success or ``(None, diagnostics)``."""
    try:
        name, decls = _Parser(tokenize(text, file), file).model()
    except _Fail as exc:
        return None, [exc.diagnostic]
    return _resolve(name, decls, file)


# -- formatting ---------------------------------------------------------------

_PREC = {"<=>": 1, "=>": 2, "|": 3, "&": 4}


def _fmt_value(v) -> str:
    return str(v)


def format_term(t: Node) -> str:
    if isinstance(t, (Var,)):
        return t.name
    if isinstance(t, Name):
        return t.ident
    if isinstance(t, Elem):
        return _fmt_value(t.value)
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, App):
        if not t.args:
            return t.symbol
        return f"{t.symbol}({', '.join(format_term(a) for a in t.args)})"
    if isinstance(t, Arith):
        right = format_term(t.right)
        if isinstance(t.right, Arith):
            right = f"({right})"
        return f"{format_term(t.left)} {t.op} {right}"
    if isinstance(t, Neg):
        inner = format_term(t.operand)
        if isinstance(t.operand, (Arith, Int, Neg)):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(t, Sum):
        parts = [f"{v} in {ty}" for v, ty in t.binders]
        if t.guard is not None:
            parts.append(format_formula(t.guard))
        return f"sum{{ {format_term(t.body)} | {', '.join(parts)} }}"
    if isinstance(t, Count):
        return f"count{{ {t.var} in {t.type_name} | {format_formula(t.guard)} }}"
    raise TypeError(f"not a term: {t!r}")


def format_formula(f: Node, prec: int = 0) -> str:
    if isinstance(f, Quant):
        s = f"{f.kind} {f.var} in {f.type_name}: {format_formula(f.body)}"
        return f"({s})" if prec > 0 else s
    if isinstance(f, Not):
        return f"!{format_formula(f.operand, 5)}"
    if isinstance(f, BinOp):
        p = _PREC[f.op]
        right_assoc = f.op == "=>"
        left = format_formula(f.left, p + 1 if right_assoc else p)
        right = format_formula(f.right, p if right_assoc else p + 1)
        s = f"{left} {f.op} {right}"
        return f"({s})" if prec > p else s
    if isinstance(f, Cmp):
        return f"{format_term(f.left)} {f.op} {format_term(f.right)}"
    if isinstance(f, Atom):
        if not f.args:
            return f.symbol
        return f"{f.symbol}({', '.join(format_term(a) for a in f.args)})"
    if isinstance(f, Reachable):
        return f"reachable({format_term(f.start)}, {f.relation}, {f.type_name})"
    raise TypeError(f"not a formula: {f!r}")


def _fmt_tuple(args) -> str:
    if len(args) == 1:
        return _fmt_value(args[0])
    return "(" + ", ".join(_fmt_value(a) for a in args) + ")"


def _ordered_keys(mop: Mop, s: SymbolDecl):
    return itertools.product(*(mop.domain(t) for t in s.signature))


def format_table(mop: Mop, s: SymbolDecl, table) -> str:
    if s.kind == "const":
        return _fmt_value(table[()])
    if s.is_predicate:
        rows = [args for args in _ordered_keys(mop, s) if args in table]
        return "{" + ", ".join(_fmt_tuple(r) for r in rows) + "}"
    cells = [f"{_fmt_tuple(args)}->{_fmt_value(table[args])}" for args in _ordered_keys(mop, s)]
    return "{" + ", ".join(cells) + "}"


def format_model(mop: Mop) -> str:
    lines = [f"mop {mop.name} {{"]
    for t in mop.vocabulary.types:
        if t.interval is not None:
            dom = f"{t.interval[0]}..{t.interval[1]}"
        else:
            dom = "{" + ", ".join(_fmt_value(e) for e in t.elements) + "}"
        lines.append(f"  type {t.name} = {dom};")
    for s in mop.vocabulary.symbols:
        prefix = "" if s.interpreted else "var "
        sig = "" if s.kind == "const" else "(" + ", ".join(s.signature) + ")"
        res = f" -> {s.result}" if s.result is not None else ""
        lines.append(f"  {prefix}{s.kind} {s.name}{sig}{res};")
    for f in mop.theory:
        lines.append(f"  constraint {format_formula(f)};")
    lines.append(f"  {mop.sense} {format_term(mop.user_objective)};")
    for s in mop.vocabulary.symbols:
        if s.interpreted:
            lines.append(f"  {s.name} = {format_table(mop, s, mop.structure.tables[s.name])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- assignments as JSON ------------------------------------------------------


class AssignmentError(ValueError):
    pass


def assignment_to_data(mop: Mop, a: Assignment) -> dict:
    out = {}
    for s in mop.vocabulary.var_symbols:
        table = a.tables[s.name]
        if s.is_predicate:
            out[s.name] = [[_fmt_value(v) for v in args] for args in _ordered_keys(mop, s) if args in table]
        else:
            out[s.name] = {
                ",".join(_fmt_value(v) for v in args): _fmt_value(table[args])
                for args in _ordered_keys(mop, s)
            }
    return out


def write_assignment(mop: Mop, a: Assignment) -> str:
    return json.dumps(assignment_to_data(mop, a), indent=2)


def assignment_from_data(mop: Mop, data) -> Assignment:
    if not isinstance(data, dict):
        raise AssignmentError("schema violation: assignment must be a JSON object")
    labels = {t.name: {_fmt_value(e): e for e in t.elements} for t in mop.vocabulary.types}

    def element(label, type_name):
        if not isinstance(label, str):
            raise AssignmentError(f"schema violation: element labels must be strings, got {label!r}")
        try:
            return labels[type_name][label]
        except KeyError:
            raise AssignmentError(f"unknown element '{label}' for type '{type_name}'") from None

    var_syms = {s.name: s for s in mop.vocabulary.var_symbols}
    for name in data:
        if name not in var_syms:
            raise AssignmentError(f"unknown symbol '{name}' (not a var symbol)")
    tables = {}
    for name, s in var_syms.items():
        if name not in data:
            raise AssignmentError(f"missing table for var symbol '{name}'")
        raw = data[name]
        if s.is_predicate:
            if not isinstance(raw, list):
                raise AssignmentError(f"schema violation: '{name}' must be an array of tuples")
            rows = set()
            for row in raw:
                if not isinstance(row, list) or len(row) != s.arity:
                    raise AssignmentError(f"schema violation: '{name}' tuples must have {s.arity} labels")
                rows.add(tuple(element(v, ty) for v, ty in zip(row, s.signature)))
            tables[name] = frozenset(rows)
        else:
            if not isinstance(raw, dict):
                raise AssignmentError(f"schema violation: '{name}' must be an object")
            table = {}
            for key, value in raw.items():
                parts = key.split(",") if s.arity else []
                if len(parts) != s.arity:
                    raise AssignmentError(f"schema violation: key '{key}' of '{name}' has wrong arity")
                args = tuple(element(p, ty) for p, ty in zip(parts, s.signature))
                table[args] = element(value, s.result)
            expected = 1
            for ty in s.signature:
                expected *= len(mop.domain(ty))
            if len(table) != expected:
                raise AssignmentError(f"partial function table for '{name}'")
            tables[name] = table
    return Assignment(tables)


def read_assignment(mop: Mop, text: str) -> Assignment:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AssignmentError(f"schema violation: invalid JSON ({exc})") from None
    return assignment_from_data(mop, data)
