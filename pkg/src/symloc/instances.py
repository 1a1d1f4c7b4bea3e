"""Seeded model generators for the benchmark problems, the bundled instance
files, and machine-readable detection expectations."""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

from .model import Mop
from .symmetry import DetectionReport

PROBLEMS = ("tsp", "tsp-alt", "shortest-path", "max-clique", "cnp", "knapsack", "assignment")

# (default, lo, hi) per parameter
PARAMS: Dict[str, Dict[str, tuple]] = {
    "tsp": {"n": (4, 2, 300), "symmetric": (False, None, None)},
    "tsp-alt": {"n": (4, 2, 50)},
    "shortest-path": {"n": (5, 3, 50)},
    "max-clique": {"nodes": (6, 4, 60), "symmetric": (False, None, None), "edge_prob": (0.5, 0.0, 1.0)},
    "cnp": {"nodes": (3, 1, 60), "colors": (3, 1, 20), "edge_prob": (0.5, 0.0, 1.0), "complete": (False, None, None)},
    "knapsack": {"objects": (3, 1, 60), "equal_volume_pairs": (0, 0, 30), "equal_value_pairs": (0, 0, 30)},
    "assignment": {"agents": (2, 1, 30)},
}


@dataclass(frozen=True)
class InstanceSpec:
    problem: str
    params: Dict[str, object] = field(default_factory=dict)
    seed: int = 0

    def resolved(self) -> Dict[str, object]:
        """Parameters with defaults filled in, after range checks."""
        if self.problem not in PARAMS:
            raise ValueError(f"unknown problem '{self.problem}' (choose from {', '.join(PROBLEMS)})")
        table = PARAMS[self.problem]
        unknown = set(self.params) - set(table)
        if unknown:
            raise ValueError(f"unknown parameter(s) for {self.problem}: {', '.join(sorted(unknown))}")
        out = {}
        for name, (default, lo, hi) in table.items():
            v = self.params.get(name, default)
            if lo is not None and not lo <= v <= hi:
                raise ValueError(f"{name} must lie in [{lo}, {hi}], got {v}")
            out[name] = v
        if self.problem == "knapsack":
            pairs = out["equal_volume_pairs"] + out["equal_value_pairs"]
            if 2 * pairs > out["objects"]:
                raise ValueError("equal_volume_pairs + equal_value_pairs needs 2 objects per pair")
        return out


def _fmt_table(name: str, rows: List[str], per_line: int = 6) -> str:
    if not rows:
        return f"  {name} = {{}};"
    chunks = [", ".join(rows[i:i + per_line]) for i in range(0, len(rows), per_line)]
    pad = " " * (len(name) + 6)
    return f"  {name} = {{" + (",\n" + pad).join(chunks) + "};"


def _distances(rng: random.Random, cities: List[str], symmetric: bool) -> List[str]:
    d = {}
    for i, a in enumerate(cities):
        for j, b in enumerate(cities):
            if i == j:
                d[a, b] = 0
            elif symmetric and j < i:
                d[a, b] = d[b, a]
            else:
                d[a, b] = rng.randint(1, 99)
    return [f"({a},{b})->{d[a, b]}" for a in cities for b in cities]


def _tsp(p, rng, name):
    n = p["n"]
    cities = [f"c{i + 1}" for i in range(n)]
    nxt = [f"{i}->{(i + 1) % n}" for i in range(n)]
    return "\n".join([
        f"mop {name} {{",
        f"  type Index = 0..{n - 1};",
        f"  type City = {{{', '.join(cities)}}};",
        "  func Distance(City, City) -> int;",
        "  func Next(Index) -> Index;",
        "  var func Map(Index) -> City;",
        "  constraint forall x in Index: forall y in Index: x != y => Map(x) != Map(y);",
        "  minimize sum{ Distance(Map(z), Map(Next(z))) | z in Index };",
        _fmt_table("Next", nxt, 10),
        _fmt_table("Distance", _distances(rng, cities, p["symmetric"])),
        "}",
    ])


def _tsp_alt(p, rng, name):
    cities = [f"c{i + 1}" for i in range(p["n"])]
    return "\n".join([
        f"mop {name} {{",
        f"  type City = {{{', '.join(cities)}}};",
        "  func Distance(City, City) -> int;",
        "  var pred Following(City, City);",
        "  constraint forall x in City: exists1 y in City: Following(x, y);",
        "  constraint forall y in City: exists1 x in City: Following(x, y);",
        "  // no subtours: every city reaches every other one",
        "  constraint forall x in City: reachable(x, Following, City);",
        "  minimize sum{ Distance(x, y) | x in City, y in City, Following(x, y) };",
        _fmt_table("Distance", _distances(rng, cities, False)),
        "}",
    ])


def _shortest_path(p, rng, name):
    cities = [f"c{i + 1}" for i in range(p["n"])]
    return "\n".join([
        f"mop {name} {{",
        f"  type City = {{{', '.join(cities)}}};",
        "  func Distance(City, City) -> int;",
        "  const Start -> City;",
        "  const End -> City;",
        "  var pred Following(City, City);",
        "  constraint forall x in City: !Following(x, Start);",
        "  constraint forall y in City: y != Start => exists1 x in City: Following(x, y);",
        "  constraint forall x in City: x != End => forall y in City: forall z in City:"
        " Following(x, y) & Following(x, z) => y = z;",
        "  constraint exists y in City: Following(Start, y);",
        "  // cities skipped by the path hang off End",
        "  constraint reachable(Start, Following, City);",
        "  minimize sum{ Distance(x, y) | x in City, y in City, Following(x, y) & x != End };",
        f"  Start = {cities[0]};",
        f"  End = {cities[-1]};",
        _fmt_table("Distance", _distances(rng, cities, False)),
        "}",
    ])


def _twins(nodes, edges, a, b) -> bool:
    na = {y for x, y in edges if x == a} - {b}
    nb = {y for x, y in edges if x == b} - {a}
    return na == nb


def _max_clique(p, rng, name):
    n = p["nodes"]
    nodes = [f"n{i + 1}" for i in range(n)]
    base = nodes[:-1] if p["symmetric"] else nodes
    for _ in range(10_000):
        und = {(a, b) for a, b in itertools.combinations(base, 2) if rng.random() < p["edge_prob"]}
        if p["symmetric"]:
            # last node copies the neighbourhood of a random node (and links to it)
            src = rng.choice(base)
            und |= {(a, nodes[-1]) for a, b in list(und) if b == src}
            und |= {(b, nodes[-1]) for a, b in list(und) if a == src}
            und.add((src, nodes[-1]))
        edges = und | {(b, a) for a, b in und}
        pairs = [(a, b) for a, b in itertools.combinations(nodes, 2) if _twins(nodes, edges, a, b)]
        if p["symmetric"] or not pairs:
            break
    else:
        raise ValueError(f"no twin-free graph found for nodes={n}, edge_prob={p['edge_prob']}")
    rows = [f"({a},{b})" for a, b in sorted(edges, key=lambda e: (nodes.index(e[0]), nodes.index(e[1])))]
    return "\n".join([
        f"mop {name} {{",
        f"  type Node = {{{', '.join(nodes)}}};",
        "  pred Edge(Node, Node);",
        "  var pred Clique(Node);",
        "  constraint forall x in Node: forall y in Node: Clique(x) & Clique(y) & x != y => Edge(x, y);",
        "  maximize count{ x in Node | Clique(x) };",
        _fmt_table("Edge", rows, 8),
        "}",
    ])


def _cnp(p, rng, name):
    nodes = [f"n{i + 1}" for i in range(p["nodes"])]
    colors = [f"k{i + 1}" for i in range(p["colors"])]
    if p["complete"]:
        if p["nodes"] > p["colors"]:
            raise ValueError("complete graph needs at least as many colors as nodes")
        edges = list(itertools.combinations(nodes, 2))
    else:
        # plant a proper colouring so the instance stays satisfiable
        hidden = {v: rng.randrange(p["colors"]) for v in nodes}
        edges = [(a, b) for a, b in itertools.combinations(nodes, 2)
                 if hidden[a] != hidden[b] and rng.random() < p["edge_prob"]]
    return "\n".join([
        f"mop {name} {{",
        f"  type Node = {{{', '.join(nodes)}}};",
        f"  type Color = {{{', '.join(colors)}}};",
        "  pred Edge(Node, Node);",
        "  var func Coloring(Node) -> Color;",
        "  constraint forall x in Node: forall y in Node: Edge(x, y) => Coloring(x) != Coloring(y);",
        "  minimize count{ z in Color | exists x in Node: Coloring(x) = z };",
        _fmt_table("Edge", [f"({a},{b})" for a, b in edges], 8),
        "}",
    ])


def _knapsack(p, rng, name):
    n = p["objects"]
    objs = [f"o{i + 1}" for i in range(n)]
    ev, eq = p["equal_volume_pairs"], p["equal_value_pairs"]
    groups = [2] * (ev + eq) + [1] * (n - 2 * (ev + eq))
    volumes_pool = rng.sample(range(1, 10 * n + 10), len(groups))
    values_pool = rng.sample(range(1, 20 * n + 20), n + len(groups))
    volume, value = {}, {}
    k = 0
    for g, (size, vol) in enumerate(zip(groups, volumes_pool)):
        members = objs[k:k + size]
        for m in members:
            volume[m] = vol
        if size == 2 and g >= ev:
            shared = values_pool.pop()
            for m in members:
                value[m] = shared
        else:
            for m in members:
                value[m] = values_pool.pop()
        k += size
    order = objs[:]
    rng.shuffle(order)
    rename = dict(zip(order, objs))
    volume = {rename[o]: v for o, v in volume.items()}
    value = {rename[o]: v for o, v in value.items()}
    capacity = max(1, sum(volume.values()) // 2)
    return "\n".join([
        f"mop {name} {{",
        f"  type Object = {{{', '.join(objs)}}};",
        "  func Volume(Object) -> int;",
        "  func Value(Object) -> int;",
        "  const Capacity -> int;",
        "  var pred In(Object);",
        "  constraint sum{ Volume(o) | o in Object, In(o) } <= Capacity;",
        "  maximize sum{ Value(o) | o in Object, In(o) };",
        _fmt_table("Volume", [f"{o}->{volume[o]}" for o in objs], 10),
        _fmt_table("Value", [f"{o}->{value[o]}" for o in objs], 10),
        f"  Capacity = {capacity};",
        "}",
    ])


def _assignment(p, rng, name):
    n = p["agents"]
    agents = [f"a{i + 1}" for i in range(n)]
    tasks = [f"t{i + 1}" for i in range(n)]
    costs = rng.sample(range(1, 100 * n * n), n * n)
    rows = [f"({a},{t})->{costs[i * n + j]}" for i, a in enumerate(agents) for j, t in enumerate(tasks)]
    return "\n".join([
        f"mop {name} {{",
        f"  type Agent = {{{', '.join(agents)}}};",
        f"  type Task = {{{', '.join(tasks)}}};",
        "  func Cost(Agent, Task) -> int;",
        "  var func Assign(Agent) -> Task;",
        "  constraint forall x in Agent: forall y in Agent: x != y => Assign(x) != Assign(y);",
        "  minimize sum{ Cost(x, Assign(x)) | x in Agent };",
        _fmt_table("Cost", rows),
        "}",
    ])


_GENERATORS = {
    "tsp": _tsp, "tsp-alt": _tsp_alt, "shortest-path": _shortest_path, "max-clique": _max_clique,
    "cnp": _cnp, "knapsack": _knapsack, "assignment": _assignment,
}


def generate(spec: InstanceSpec, name: Optional[str] = None) -> str:
    """Model text for ``spec``; identical output for identical specs."""
    p = spec.resolved()
    rng = random.Random(f"{spec.problem}:{spec.seed}")
    if name is None:
        sizes = [str(v) for v in p.values() if isinstance(v, int) and not isinstance(v, bool)]
        name = "_".join([spec.problem.replace("-", "_"), *sizes, f"s{spec.seed}"])
    return _GENERATORS[spec.problem](p, rng, name) + "\n"


# -- expectations -------------------------------------------------------------


def expected_detection(problem: str, symmetric: bool = False) -> dict:
    """Per-type rules saying how each candidate pair must come out of detect().

    A rule applies when every condition in ``when`` holds; the first matching
    rule decides.  Conditions: ``always``, ``involves:C`` (a or b is the value
    of constant C), ``same:F`` / ``differ:F`` (unary function F agrees or not
    on a and b), ``automorphic:R`` (swapping a and b preserves relation R),
    ``pairs:a-b,c-d`` (the pair is one of those listed).
    Outcomes: ``variant``, ``invariant`` (dropped as objective-invariant),
    ``rejected`` (structurally), ``not-variant`` (either of the last two).
    """
    R = lambda t, when, expect: {"type": t, "when": when, "expect": expect}
    if problem == "tsp":
        rules = [R("Index", ["always"], "variant"), R("City", ["always"], "variant")]
    elif problem == "tsp-alt":
        rules = [R("City", ["always"], "variant")]
    elif problem == "shortest-path":
        rules = [R("City", ["involves:Start"], "rejected"), R("City", ["involves:End"], "rejected"),
                 R("City", ["always"], "variant")]
    elif problem == "max-clique":
        rules = [R("Node", ["automorphic:Edge"], "invariant"), R("Node", ["always"], "rejected")]
        if not symmetric:
            rules = [R("Node", ["always"], "rejected")]
    elif problem == "cnp":
        rules = [R("Color", ["always"], "invariant"), R("Node", ["automorphic:Edge"], "invariant"),
                 R("Node", ["always"], "rejected")]
    elif problem == "knapsack":
        rules = [R("Object", ["same:Volume", "differ:Value"], "variant"),
                 R("Object", ["same:Volume", "same:Value"], "invariant"),
                 R("Object", ["always"], "rejected")]
    elif problem == "assignment":
        rules = [R("Agent", ["always"], "variant"), R("Task", ["always"], "variant")]
    else:
        raise ValueError(f"unknown problem '{problem}'")
    return {"problem": problem, "symmetric": symmetric, "types": sorted({r["type"] for r in rules}),
            "rules": rules}


def _holds(cond: str, mop: Mop, a, b) -> bool:
    if cond == "always":
        return True
    kind, _, sym = cond.partition(":")
    if kind == "pairs":
        listed = {frozenset(p.split("-")) for p in sym.split(",")}
        return frozenset((str(a), str(b))) in listed
    table = mop.structure.tables[sym]
    if kind == "involves":
        return table[()] in (a, b)
    if kind in ("same", "differ"):
        return (table[(a,)] == table[(b,)]) == (kind == "same")
    if kind == "automorphic":
        sw = lambda v: b if v == a else a if v == b else v
        return {tuple(sw(v) for v in row) for row in table} == set(table)
    raise ValueError(f"unknown condition '{cond}'")


def expected_outcome(expectation: dict, mop: Mop, type_name: str, a, b) -> Optional[str]:
    for rule in expectation["rules"]:
        if rule["type"] == type_name and all(_holds(c, mop, a, b) for c in rule["when"]):
            return rule["expect"]
    return None


def check_expectation(expectation: dict, mop: Mop, report: DetectionReport) -> List[str]:
    """Mismatches between ``report`` and ``expectation``; empty when they agree."""
    outcome = {}
    for s in report.symmetries:
        outcome[(s.type_name, s.a, s.b)] = "variant" if not s.classification.invariant else "invariant"
    for r in report.rejected:
        outcome[(r.type_name, r.a, r.b)] = "invariant" if r.reason == "objective-invariant" else "rejected"
    problems = []
    types = sorted({t for t, _, _ in outcome})
    if types != sorted(expectation["types"]) and outcome:
        problems.append(f"candidate types {types} != expected {expectation['types']}")
    for (t, a, b), got in outcome.items():
        want = expected_outcome(expectation, mop, t, a, b)
        ok = want == got or (want == "not-variant" and got != "variant")
        if not ok:
            problems.append(f"{t} ({a},{b}): expected {want}, got {got}")
    return problems


# -- bundled files ------------------------------------------------------------


# bundled files written by generate(); knapsack3 and assignment2 are hand-written
BUNDLED = {
    "tsp4": ("tsp", {"n": 4}, 1),
    "tsp_alt4": ("tsp-alt", {"n": 4}, 1),
    "shortest_path4": ("shortest-path", {"n": 4}, 1),
    "shortest_path5": ("shortest-path", {"n": 5}, 1),
    "max_clique6": ("max-clique", {"nodes": 6}, 1),
    "max_clique_sym6": ("max-clique", {"nodes": 6, "symmetric": True}, 1),
    "cnp_k3": ("cnp", {"nodes": 3, "colors": 3, "complete": True}, 0),
}


def data_dir() -> Path:
    return Path(str(resources.files("symloc") / "data"))


def bundled_names() -> List[str]:
    return sorted(p.stem for p in data_dir().glob("*.mop"))


def bundled_text(name: str) -> str:
    return (data_dir() / f"{name}.mop").read_text()


def bundled_expectation(name: str) -> dict:
    return json.loads((data_dir() / f"{name}.expected.json").read_text())
