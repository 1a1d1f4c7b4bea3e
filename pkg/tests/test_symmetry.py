import random

import pytest

from symloc.evaluator import check_model, compiled, objective_value
from symloc.model import random_assignment
from symloc.parser import parse_model, read_assignment
from symloc.symmetry import (
    FAULT_ENV, DesSymmetry, Policy, Rejection, apply_symmetry, candidate_pairs, check_des_pair,
    classify_variance, detect, make_symmetry, verify_symmetry,
)

from conftest import gen

TRIANGLE_PATH = """mop mc {
  type Node = {n1, n2, n3};
  pred Edge(Node, Node);
  var pred Clique(Node);
  constraint forall x in Node: forall y in Node: Clique(x) & Clique(y) & x != y => Edge(x, y);
  maximize count{ x in Node | Clique(x) };
  Edge = {(n1,n2), (n2,n1)};
}"""


def test_candidate_pairs_tsp(tsp4):
    pairs = candidate_pairs(tsp4)
    assert len(pairs) == 12
    assert pairs[0] == ("Index", 0, 1)
    assert sum(1 for t, _, _ in pairs if t == "City") == 6


def test_candidate_pairs_cnp_colours(cnp_k3):
    assert sum(1 for t, _, _ in candidate_pairs(cnp_k3) if t == "Color") == 3


def test_no_var_symbol_in_objective():
    m = parse_model("mop m { type T = {a, b, c}; var pred P(T); constraint exists x in T: P(x); minimize 0; }")
    assert candidate_pairs(m) == []
    assert detect(m).candidates_checked == 0


def test_tsp_city_pair_accepted(tsp4):
    s = check_des_pair(tsp4, "City", "c1", "c2")
    assert isinstance(s, DesSymmetry) and s.sigma == ("Map",)


def test_max_clique_non_automorphic_pair_rejected():
    m = parse_model(TRIANGLE_PATH)
    r = check_des_pair(m, "Node", "n1", "n3")
    assert isinstance(r, Rejection) and r.reason == "interpreted-not-invariant"
    assert isinstance(check_des_pair(m, "Node", "n1", "n2"), DesSymmetry)


def test_shortest_path_start_rejected(bundled):
    m = bundled["shortest_path5"]
    for other in ("c2", "c3", "c4"):
        r = check_des_pair(m, "City", "c1", other)
        assert isinstance(r, Rejection)
        assert "Start" in r.detail


def test_literal_and_numeric_rejections():
    lit = parse_model("""mop m { type T = {a, b, c}; var func F(T) -> T;
      constraint F(a) != a; minimize count{ x in T | F(x) = x }; }""")
    reasons = {(r.a, r.b): r.reason for r in detect(lit).rejected}
    assert reasons[("a", "b")] == "literal"
    num = parse_model("""mop m { type I = 0..3; var func F(I) -> I;
      constraint forall x in I: F(x) >= x; minimize sum{ F(x) | x in I }; }""")
    report = detect(num)
    assert report.symmetries == [] and {r.reason for r in report.rejected} == {"numeric-use"}


def test_apply_tsp_swap(tsp4):
    s = make_symmetry(tsp4, "City", "c1", "c2")
    a = read_assignment(tsp4, '{"Map": {"0":"c1","1":"c2","2":"c3","3":"c4"}}')
    b = apply_symmetry(s, a)
    assert b["Map"] == {(0,): "c2", (1,): "c1", (2,): "c3", (3,): "c4"}
    idx = apply_symmetry(make_symmetry(tsp4, "Index", 0, 3), a)
    assert idx["Map"] == {(0,): "c4", (1,): "c2", (2,): "c3", (3,): "c1"}


def test_apply_is_involution(bundled):
    rng = random.Random(11)
    for mop in bundled.values():
        for t, a, b in candidate_pairs(mop)[:6]:
            s = make_symmetry(mop, t, a, b)
            for _ in range(100 // max(1, len(bundled))):
                alpha = random_assignment(mop, rng)
                assert apply_symmetry(s, apply_symmetry(s, alpha)) == alpha


def test_empty_sigma_is_identity(tsp4):
    s = make_symmetry(tsp4, "City", "c1", "c2", sigma=())
    a = random_assignment(tsp4, random.Random(0))
    assert apply_symmetry(s, a) == a
    assert verify_symmetry(tsp4, s).mode == "trivial"


def test_classification_examples(tsp4, cnp_k3, knapsack3):
    for s in detect(tsp4, Policy("exhaustive")).symmetries:
        c = s.classification
        assert c.kind == "variant"
        assert objective_value(tsp4, c.witness) != objective_value(tsp4, apply_symmetry(s, c.witness))
    colour = make_symmetry(cnp_k3, "Color", "k1", "k2")
    assert classify_variance(cnp_k3, colour, Policy("exhaustive")).kind == "invariant_proved"
    assert classify_variance(knapsack3, make_symmetry(knapsack3, "Object", "o1", "o2")).kind == "variant"
    same = gen("knapsack", 3, objects=2, equal_value_pairs=1)
    assert classify_variance(same, make_symmetry(same, "Object", "o1", "o2")).kind == "invariant_proved"


def test_syntactic_and_sampled_policies(tsp4, cnp_k3):
    s = make_symmetry(tsp4, "City", "c1", "c2")
    assert classify_variance(tsp4, s, Policy("syntactic")).kind == "unclassified"
    assert classify_variance(tsp4, s, Policy("sample", samples=64)).kind == "variant"
    c = classify_variance(cnp_k3, make_symmetry(cnp_k3, "Color", "k1", "k2"), Policy("sample", samples=32))
    assert c.kind == "invariant_sampled" and c.samples == 32


def test_syntactic_proof_when_sigma_misses_objective():
    m = parse_model("""mop m { type T = {a, b}; var pred P(T); var pred Q(T);
      constraint forall x in T: P(x) | Q(x); minimize count{ x in T | Q(x) }; }""")
    s = make_symmetry(m, "T", "a", "b", sigma=("P",))
    assert classify_variance(m, s, Policy("syntactic")).kind == "invariant_proved"


def test_exhaustive_is_exact(bundled):
    # variant iff some assignment changes value; checked against a separate brute-force scan
    from symloc.model import enumerate_assignments
    for name in ("tsp4_sym", "knapsack3", "cnp_k3", "assignment2"):
        mop = bundled[name]
        c = compiled(mop)
        for t, a, b in candidate_pairs(mop):
            s = make_symmetry(mop, t, a, b)
            brute = any(c.cost(x) != c.cost(apply_symmetry(s, x)) for x in enumerate_assignments(mop))
            assert (classify_variance(mop, s, Policy("exhaustive")).kind == "variant") == brute, (name, t, a, b)


def test_detect_report_examples(tsp4, cnp_k3, bundled):
    r = detect(tsp4, Policy("exhaustive"))
    assert (len(r.symmetries), len(r.rejected)) == (12, 0)
    r = detect(cnp_k3, Policy("exhaustive"))
    assert r.symmetries == [] and len(r.objective_invariant) == 3
    assert {x.type_name for x in r.objective_invariant} == {"Color"}
    r = detect(bundled["assignment2"])
    assert {s.type_name for s in r.symmetries} == {"Agent", "Task"}


def test_detect_deterministic(bundled):
    for mop in bundled.values():
        a, b = detect(mop, Policy("sample", seed=4)), detect(mop, Policy("sample", seed=4))
        assert a.symmetries == b.symmetries and a.rejected == b.rejected


def test_report_partitions_pairs(bundled):
    for mop in bundled.values():
        r = detect(mop)
        kept = {s.pair for s in r.symmetries}
        dropped = {x.pair for x in r.rejected}
        assert not kept & dropped
        assert len(kept) + len(dropped) == r.candidates_checked


def test_verify_bogus_clique_swap():
    m = parse_model(TRIANGLE_PATH)
    bogus = make_symmetry(m, "Node", "n1", "n3")
    v = verify_symmetry(m, bogus)
    assert not v.passed and v.mode == "exhaustive"
    x = v.counterexample
    assert check_model(m, x) != check_model(m, apply_symmetry(bogus, x))


def test_verify_sampled_mode():
    m = gen("tsp", n=7)
    s = make_symmetry(m, "City", "c1", "c2")
    v = verify_symmetry(m, s, max_assignments=1000, samples=50)
    assert v.passed and v.mode == "sampled" and v.checked == 50


def test_fault_injection_accepts_everything(monkeypatch):
    m = parse_model(TRIANGLE_PATH)
    monkeypatch.setenv(FAULT_ENV, "accept-all")
    assert isinstance(check_des_pair(m, "Node", "n1", "n3"), DesSymmetry)
    monkeypatch.delenv(FAULT_ENV)
    assert isinstance(check_des_pair(m, "Node", "n1", "n3"), Rejection)


def test_exhaustive_refused_on_overflow():
    m = gen("tsp", n=9)
    with pytest.raises(ValueError):
        classify_variance(m, make_symmetry(m, "City", "c1", "c2"), Policy("exhaustive"))
