"""Domain-element-swap (DES) symmetries.

A DES symmetry swaps two elements ``a`` and ``b`` of one type inside the
tables of a set ``sigma`` of var symbols.  Detection runs in three steps:

1. candidate types are those in the signatures of var symbols occurring in
   the objective; every unordered element pair of those types is a candidate;
2. each pair is accepted by a structural test against the theory
   (:func:`check_des_pair`);
3. accepted pairs that leave the objective invariant are set aside.
"""
from __future__ import annotations

import itertools
import os
import random
import time
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .evaluator import compiled
from .logic import symbols_in
from .model import (
    DEFAULT_SPACE_BOUND, INT, Assignment, Mop, assignment_space_size,
    build_assignment, random_assignment, var_entries,
)
from .typecheck import Checker

DEFAULT_SAMPLES = 256
FAULT_ENV = "SYMLOC_FAULT"


@dataclass(frozen=True)
class Classification:
    kind: str  # variant | invariant_proved | invariant_sampled | unclassified
    witness: Optional[Assignment] = None
    samples: Optional[int] = None

    @property
    def invariant(self) -> bool:
        return self.kind in ("invariant_proved", "invariant_sampled")


UNCLASSIFIED = Classification("unclassified")


@dataclass(frozen=True)
class DesSymmetry:
    type_name: str
    a: object
    b: object
    sigma: Tuple[str, ...]
    classification: Classification = UNCLASSIFIED
    # (symbol, positions of type_name among the arguments, result has type_name, is predicate)
    positions: Tuple[Tuple[str, Tuple[int, ...], bool, bool], ...] = field(
        default=(), compare=False, repr=False
    )

    @property
    def pair(self):
        return (self.type_name, self.a, self.b)

    def classified(self, c: Classification) -> "DesSymmetry":
        return replace(self, classification=c)

    def swap(self, v):
        if v == self.a:
            return self.b
        if v == self.b:
            return self.a
        return v


@dataclass(frozen=True)
class Rejection:
    type_name: str
    a: object
    b: object
    reason: str  # interpreted-not-invariant | literal | numeric-use | objective-invariant
    detail: str
    symmetry: Optional[DesSymmetry] = None

    @property
    def pair(self):
        return (self.type_name, self.a, self.b)


@dataclass(frozen=True)
class Policy:
    kind: str = "exhaustive"  # syntactic | exhaustive | sample
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    bound: int = DEFAULT_SPACE_BOUND

    def __post_init__(self):
        if self.kind not in ("syntactic", "exhaustive", "sample"):
            raise ValueError(f"unknown policy '{self.kind}'")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")

    @classmethod
    def auto(cls, mop: Mop, samples: int = DEFAULT_SAMPLES, seed: int = 0,
             bound: int = DEFAULT_SPACE_BOUND) -> "Policy":
        """Exhaustive when the assignment space fits ``bound``, sampling otherwise."""
        kind = "exhaustive" if assignment_space_size(mop, bound) is not None else "sample"
        return cls(kind, samples, seed, bound)


@dataclass
class DetectionReport:
    candidates_checked: int
    symmetries: List[DesSymmetry]
    rejected: List[Rejection]
    elapsed: float = 0.0

    @property
    def detected(self) -> List[DesSymmetry]:
        """Every pair accepted by the structural test, survivors first."""
        return self.symmetries + [r.symmetry for r in self.rejected if r.symmetry is not None]

    @property
    def objective_invariant(self) -> List[Rejection]:
        return [r for r in self.rejected if r.reason == "objective-invariant"]


@dataclass
class VerificationReport:
    symmetry: DesSymmetry
    passed: bool
    mode: str  # exhaustive | sampled | trivial
    checked: int
    counterexample: Optional[Assignment] = None


def make_symmetry(mop: Mop, type_name: str, a, b, sigma: Optional[Sequence[str]] = None,
                  classification: Classification = UNCLASSIFIED) -> DesSymmetry:
    """Build a DES symmetry; ``sigma`` defaults to every var symbol mentioning the type."""
    dom = mop.domain(type_name)
    if a == b or a not in dom or b not in dom:
        raise ValueError(f"({a!r}, {b!r}) is not a pair of distinct elements of {type_name}")
    mentioning = [s.name for s in mop.vocabulary.var_symbols if s.mentions(type_name)]
    if sigma is None:
        sigma = mentioning
    elif not set(sigma) <= set(mentioning):
        raise ValueError(f"sigma must be var symbols mentioning {type_name}")
    positions = []
    for name in sigma:
        s = mop.vocabulary.symbol(name)
        arg_pos = tuple(i for i, t in enumerate(s.signature) if t == type_name)
        positions.append((name, arg_pos, s.result == type_name, s.is_predicate))
    return DesSymmetry(type_name, a, b, tuple(sigma), classification, tuple(positions))


def apply_symmetry(s: DesSymmetry, alpha: Assignment) -> Assignment:
    """Image of ``alpha``: every tuple of every sigma symbol pushed through the swap."""
    a, b = s.a, s.b

    def sw(v):
        return b if v == a else a if v == b else v

    tables = dict(alpha.tables)
    for name, arg_pos, on_result, is_pred in s.positions:
        table = alpha.tables[name]

        def perm(args):
            if not arg_pos:
                return args
            out = list(args)
            for i in arg_pos:
                out[i] = sw(out[i])
            return tuple(out)

        if is_pred:
            tables[name] = frozenset(perm(t) for t in table)
        else:
            tables[name] = {perm(k): (sw(v) if on_result else v) for k, v in table.items()}
    return Assignment(tables)


# -- structural detection -----------------------------------------------------


class _SymbolIndex:
    """Tuples of one interpreted table indexed by the elements they touch."""

    def __init__(self, mop: Mop, name: str, type_name: str):
        s = mop.vocabulary.symbol(name)
        self.name = name
        self.table = mop.structure.tables[name]
        self.is_pred = s.is_predicate
        self.arg_pos = tuple(i for i, t in enumerate(s.signature) if t == type_name)
        self.on_result = s.result == type_name
        self.touching: Dict[object, List[tuple]] = {}
        rows = self.table if self.is_pred else self.table.items()
        for row in rows:
            args, value = (row, None) if self.is_pred else row
            elems = {args[i] for i in self.arg_pos}
            if self.on_result:
                elems.add(value)
            for e in elems:
                self.touching.setdefault(e, []).append(args)

    def invariant(self, a, b) -> bool:
        sw = lambda v: b if v == a else a if v == b else v
        for args in itertools.chain(self.touching.get(a, ()), self.touching.get(b, ())):
            img = list(args)
            for i in self.arg_pos:
                img[i] = sw(img[i])
            img = tuple(img)
            if self.is_pred:
                if img not in self.table:
                    return False
            else:
                v = self.table[args]
                if self.table[img] != (sw(v) if self.on_result else v):
                    return False
        return True


class Detector:
    """Per-model analysis shared by every pair check."""

    def __init__(self, mop: Mop):
        self.mop = mop
        vocab = mop.vocabulary
        checker = Checker(vocab)
        for f in mop.theory:
            checker.formula(f, {})
        self.numeric_uses = checker.numeric_uses
        self.literals = checker.literals
        theory_syms = symbols_in(*mop.theory)
        self.theory_interpreted = [s for s in vocab.symbols if s.interpreted and s.name in theory_syms]
        self.objective_syms = symbols_in(mop.objective)
        var_in_t = [s for s in vocab.var_symbols if s.name in self.objective_syms]
        mentioned = set()
        for s in var_in_t:
            mentioned.update(s.signature)
            if s.result is not None:
                mentioned.add(s.result)
        self.candidate_types = [t.name for t in vocab.types if t.name in mentioned and t.name != INT]
        self._indexes: Dict[str, List[_SymbolIndex]] = {}

    def indexes(self, type_name: str) -> List[_SymbolIndex]:
        if type_name not in self._indexes:
            self._indexes[type_name] = [
                _SymbolIndex(self.mop, s.name, type_name)
                for s in self.theory_interpreted if s.mentions(type_name)
            ]
        return self._indexes[type_name]

    def candidate_pairs(self) -> List[Tuple[str, object, object]]:
        out = []
        for t in self.candidate_types:
            out.extend((t, a, b) for a, b in itertools.combinations(self.mop.domain(t), 2))
        return out

    def check(self, type_name: str, a, b) -> Union[DesSymmetry, Rejection]:
        if os.environ.get(FAULT_ENV) == "accept-all":
            return make_symmetry(self.mop, type_name, a, b)
        for idx in self.indexes(type_name):
            if not idx.invariant(a, b):
                return Rejection(type_name, a, b, "interpreted-not-invariant",
                                 f"interpretation of {idx.name} is not invariant under the swap")
        for e in (a, b):
            if (type_name, e) in self.literals:
                return Rejection(type_name, a, b, "literal", f"element {e} occurs as a literal in the theory")
        if type_name in self.numeric_uses:
            return Rejection(type_name, a, b, "numeric-use",
                             f"type {type_name} is used under arithmetic or order in the theory")
        return make_symmetry(self.mop, type_name, a, b)


def detector(mop: Mop) -> Detector:
    d = mop.cache.get("detector")
    if d is None:
        d = mop.cache["detector"] = Detector(mop)
    return d


def candidate_pairs(mop: Mop) -> List[Tuple[str, object, object]]:
    return detector(mop).candidate_pairs()


def check_des_pair(mop: Mop, type_name: str, a, b) -> Union[DesSymmetry, Rejection]:
    """Accept the swap of ``a`` and ``b`` as a symmetry, or say why not.

    Accepted when every interpreted theory symbol mentioning the type is
    invariant under the swap, neither element is a theory literal, and the
    type is not used numerically in the theory.
    """
    return detector(mop).check(type_name, a, b)


# -- objective variance -------------------------------------------------------


class _Space:
    """The assignment space as mixed-radix vectors of value indices."""

    def __init__(self, mop: Mop, bound: int):
        if assignment_space_size(mop, bound) is None:
            raise ValueError("exhaustive policy refused: assignment space exceeds the bound")
        self.mop = mop
        self.entries = var_entries(mop)
        self.values = [vals for _, _, vals in self.entries]
        self.pos = {(s.name, args): i for i, (s, args, _) in enumerate(self.entries)}
        self.weights = [0] * len(self.entries)
        w = 1
        for i in range(len(self.entries) - 1, -1, -1):
            self.weights[i] = w
            w *= len(self.values[i])
        self.size = w
        self.costs: Dict[int, int] = {}
        self.models: Dict[int, bool] = {}

    def image_map(self, s: DesSymmetry):
        info = {name: (arg_pos, res) for name, arg_pos, res, _ in s.positions}
        out = []
        for i, (sym, args, vals) in enumerate(self.entries):
            if sym.name not in info:
                out.append((i, None))
                continue
            arg_pos, res = info[sym.name]
            img = list(args)
            for p in arg_pos:
                img[p] = s.swap(img[p])
            j = self.pos[(sym.name, tuple(img))]
            vmap = tuple(vals.index(s.swap(v)) for v in vals) if res else None
            out.append((j, vmap))
        return out

    def image(self, combo, imap) -> int:
        idx = 0
        w = self.weights
        for k, (j, vmap) in zip(combo, imap):
            idx += w[j] * (k if vmap is None else vmap[k])
        return idx

    def decode(self, idx: int) -> tuple:
        combo = []
        for w, vals in zip(self.weights, self.values):
            k, idx = divmod(idx, w)
            combo.append(k)
        return tuple(combo)

    def assignment(self, combo) -> Assignment:
        return build_assignment(self.mop, [vals[k] for vals, k in zip(self.values, combo)])

    def cost(self, idx: int, combo=None) -> int:
        v = self.costs.get(idx)
        if v is None:
            a = self.assignment(combo if combo is not None else self.decode(idx))
            v = self.costs[idx] = compiled(self.mop).cost(a)
        return v

    def is_model(self, idx: int, combo=None) -> bool:
        v = self.models.get(idx)
        if v is None:
            a = self.assignment(combo if combo is not None else self.decode(idx))
            v = self.models[idx] = compiled(self.mop).check(a)
        return v

    def combos(self):
        return itertools.product(*(range(len(v)) for v in self.values))


def _space(mop: Mop, bound: int) -> _Space:
    key = ("space", bound)
    sp = mop.cache.get(key)
    if sp is None:
        sp = mop.cache[key] = _Space(mop, bound)
    return sp


def classify_variance(mop: Mop, s: DesSymmetry, policy: Policy = Policy()) -> Classification:
    if not set(s.sigma) & symbols_in(mop.objective):
        return Classification("invariant_proved")
    if policy.kind == "syntactic":
        return UNCLASSIFIED
    if policy.kind == "exhaustive":
        space = _space(mop, policy.bound)
        imap = space.image_map(s)
        for idx, combo in enumerate(space.combos()):
            if space.cost(idx, combo) != space.cost(space.image(combo, imap)):
                return Classification("variant", witness=space.assignment(combo))
        return Classification("invariant_proved")
    rng = random.Random(f"{policy.seed}:{s.type_name}:{s.a}:{s.b}")
    c = compiled(mop)
    for _ in range(policy.samples):
        alpha = random_assignment(mop, rng)
        if c.cost(alpha) != c.cost(apply_symmetry(s, alpha)):
            return Classification("variant", witness=alpha)
    return Classification("invariant_sampled", samples=policy.samples)


def detect(mop: Mop, policy: Optional[Policy] = None) -> DetectionReport:
    """Steps 1-3 of neighborhood detection; survivors keep their classification."""
    policy = policy or Policy.auto(mop)
    start = time.perf_counter()
    det = detector(mop)
    pairs = det.candidate_pairs()
    survivors, rejected = [], []
    for type_name, a, b in pairs:
        res = det.check(type_name, a, b)
        if isinstance(res, Rejection):
            rejected.append(res)
            continue
        res = res.classified(classify_variance(mop, res, policy))
        if res.classification.invariant:
            rejected.append(Rejection(type_name, a, b, "objective-invariant",
                                      f"objective is {res.classification.kind.replace('_', ' ')}", res))
        else:
            survivors.append(res)
    return DetectionReport(len(pairs), survivors, rejected, time.perf_counter() - start)


# -- semantic verification ----------------------------------------------------


def verify_symmetry(mop: Mop, s: DesSymmetry, max_assignments: int = 10**5,
                    samples: int = DEFAULT_SAMPLES, seed: int = 0) -> VerificationReport:
    """Check alpha |= T <=> S(alpha) |= T, exhaustively when the space fits."""
    if not s.sigma:
        return VerificationReport(s, True, "trivial", 0)
    if assignment_space_size(mop, max_assignments) is not None:
        space = _space(mop, max_assignments)
        imap = space.image_map(s)
        n = 0
        for idx, combo in enumerate(space.combos()):
            n += 1
            if space.is_model(idx, combo) != space.is_model(space.image(combo, imap)):
                return VerificationReport(s, False, "exhaustive", n, space.assignment(combo))
        return VerificationReport(s, True, "exhaustive", n)
    rng = random.Random(f"verify:{seed}:{s.type_name}:{s.a}:{s.b}")
    c = compiled(mop)
    for n in range(1, samples + 1):
        alpha = random_assignment(mop, rng)
        if c.check(alpha) != c.check(apply_symmetry(s, alpha)):
            return VerificationReport(s, False, "sampled", n, alpha)
    return VerificationReport(s, True, "sampled", samples)
