"""Symmetry-induced neighborhoods: each model maps to its images under a
fixed list of generator symmetries."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

from .model import Assignment, Mop
from .symmetry import DesSymmetry, DetectionReport, apply_symmetry


@dataclass(frozen=True)
class Move:
    generator_index: int
    description: Tuple[str, object, object, Tuple[str, ...]]


@dataclass(frozen=True)
class Neighborhood:
    generators: Tuple[DesSymmetry, ...]

    def __len__(self):
        return len(self.generators)

    def move(self, i: int) -> Move:
        g = self.generators[i]
        return Move(i, (g.type_name, g.a, g.b, g.sigma))

    def apply(self, i: int, a: Assignment) -> Assignment:
        return apply_symmetry(self.generators[i], a)


class OrbitCapExceeded(Exception):
    def __init__(self, partial: frozenset):
        self.partial = partial
        super().__init__(f"orbit closure exceeded cap after {len(partial)} states")


def build_neighborhood(report: DetectionReport, linear: bool = False,
                       mop: Optional[Mop] = None) -> Optional[Neighborhood]:
    """Neighborhood from every surviving symmetry, or ``None`` when none survive.

    ``linear=True`` keeps only swaps of consecutive elements (needs ``mop`` for
    the domain order); it biases search along that order and is off by default.
    """
    gens = [s for s in report.symmetries if not s.classification.invariant]
    if linear:
        if mop is None:
            raise ValueError("linear generator set needs the model for domain order")
        def adjacent(s):
            dom = mop.domain(s.type_name)
            return abs(dom.index(s.a) - dom.index(s.b)) == 1
        gens = [s for s in gens if adjacent(s)]
    if not gens:
        return None
    return Neighborhood(tuple(gens))


def neighbors(n: Neighborhood, a: Assignment) -> Iterator[Tuple[Move, Assignment]]:
    for i in range(len(n.generators)):
        yield n.move(i), n.apply(i, a)


def orbit_closure(n: Optional[Neighborhood], a: Assignment, cap: int = 10_000) -> frozenset:
    """Breadth-first closure of ``a`` under the generators; raises past ``cap`` states."""
    seen = {a}
    if n is None:
        return frozenset(seen)
    queue = deque([a])
    while queue:
        cur = queue.popleft()
        for i in range(len(n.generators)):
            nxt = n.apply(i, cur)
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > cap:
                    raise OrbitCapExceeded(frozenset(seen))
                queue.append(nxt)
    return frozenset(seen)
