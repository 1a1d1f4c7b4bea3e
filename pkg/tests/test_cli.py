import json
import subprocess
import sys

import jsonschema

from symloc.cli import main
from symloc.instances import data_dir
from symloc.reports import schema

DATA = data_dir()


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    report = json.loads(out)
    jsonschema.validate(report, schema())
    return code, report


def test_parse_ok(capsys):
    code, out, _ = run(capsys, "parse", DATA / "tsp4.mop")
    assert code == 0 and "ok" in out


def test_parse_print_round_trips(capsys, tmp_path):
    _, out, _ = run(capsys, "parse", DATA / "knapsack3.mop", "--print")
    f = tmp_path / "k.mop"
    f.write_text(out)
    assert run(capsys, "parse", f)[0] == 0


def test_parse_syntax_error(capsys, tmp_path):
    f = tmp_path / "bad.mop"
    f.write_text("mop m {\n  type T = {a};\n  var pred P(T)\n}\n")
    code, _, err = run(capsys, "parse", f)
    assert code == 1 and f"{f}:4:1" in err


def test_parse_missing_file(capsys):
    code, _, err = run(capsys, "parse", "/nonexistent/x.mop")
    assert code == 1 and "cannot read" in err


def test_detect_tsp(capsys):
    code, report = run_json(capsys, "detect", DATA / "tsp4.mop", "--policy", "exhaustive")
    d = report["detection"]
    assert code == 0 and d["neighborhood_size"] == 12
    assert all(s["classification"]["kind"] == "variant" for s in d["symmetries"])
    assert report["model"]["digest"].startswith("sha256:")
    assert "timings" not in report


def test_detect_cnp(capsys):
    code, report = run_json(capsys, "detect", DATA / "cnp_k3.mop", "--policy", "exhaustive")
    d = report["detection"]
    assert d["detected"] == 3 and d["neighborhood_size"] == 0
    assert sum(r["reason"] == "objective-invariant" for r in d["rejected"]) == 3


def test_detect_human_table(capsys, monkeypatch):
    monkeypatch.setenv("SYMLOC_COLOR", "0")
    code, out, _ = run(capsys, "detect", DATA / "cnp_k3.mop")
    assert "objective-invariant" in out and "\033[" not in out
    assert "neighborhood size 0" in out


def test_detect_exhaustive_refused_on_large_space(capsys, tmp_path):
    f = tmp_path / "t9.mop"
    assert run(capsys, "gen", "tsp", "--n", 9, "-o", f)[0] == 0
    code, _, err = run(capsys, "detect", f, "--policy", "exhaustive")
    assert code == 1 and "refused" in err


def test_timings_flag(capsys):
    _, report = run_json(capsys, "detect", DATA / "tsp4.mop", "--timings")
    assert set(report["timings"]) == {"detect", "total"}


def test_solve_exact_assignment(capsys):
    code, report = run_json(capsys, "solve", DATA / "assignment2.mop", "--method", "exact")
    assert code == 0 and report["exact"]["objective"] == 2


def test_solve_local_tsp(capsys):
    code, report = run_json(capsys, "solve", DATA / "tsp4.mop", "--method", "local", "--seed", 1)
    s = report["search"]
    assert code == 0 and s["best_objective"] <= s["initial_objective"]
    assert s["trajectory"][0] == [0, s["initial_objective"]]


def test_solve_cnp_no_neighborhood(capsys):
    code, out, _ = run(capsys, "solve", DATA / "cnp_k3.mop", "--method", "local")
    assert code == 0 and "no-neighborhood" in out


def test_solve_exit_codes(capsys, tmp_path):
    two = tmp_path / "k3two.mop"
    two.write_text((DATA / "cnp_k3.mop").read_text().replace("{k1, k2, k3}", "{k1, k2}"))
    assert run(capsys, "solve", two)[0] == 2
    assert run(capsys, "solve", two, "--method", "exact")[0] == 2
    assert run(capsys, "solve", DATA / "tsp4.mop", "--max-nodes", 1)[0] == 3
    assert run(capsys, "solve", DATA / "tsp4.mop", "--method", "exact", "--max-nodes", 5)[0] == 3
    assert run(capsys, "solve", DATA / "tsp4.mop", "--max-iters", 0)[0] == 1


def test_verify_tsp(capsys):
    code, report = run_json(capsys, "verify", DATA / "tsp4.mop")
    res = report["verification"]["results"]
    assert code == 0 and len(res) == 12 and all(r["passed"] and r["checked"] == 256 for r in res)
    assert report["oracle"]["gap"] is not None


def test_verify_knapsack(capsys):
    code, report = run_json(capsys, "verify", DATA / "knapsack3.mop")
    assert code == 0 and report["verification"]["passed"]
    assert report["oracle"]["exact_objective"] == 16
    _, report = run_json(capsys, "verify", DATA / "knapsack3.mop", "--restarts", 4)
    assert report["oracle"]["gap"] == 0


def test_verify_fault_injection_exit_4(capsys, monkeypatch):
    monkeypatch.setenv("SYMLOC_FAULT", "accept-all")
    code, report = run_json(capsys, "verify", DATA / "max_clique6.mop")
    assert code == 4 and not report["verification"]["passed"]
    failing = [r for r in report["verification"]["results"] if not r["passed"]]
    assert failing and all(r["counterexample"] is not None for r in failing)


def test_gen_then_parse(capsys, tmp_path):
    f = tmp_path / "t6.mop"
    assert run(capsys, "gen", "tsp", "--n", 6, "--seed", 3, "-o", f)[0] == 0
    assert run(capsys, "parse", f)[0] == 0


def test_gen_knapsack_detects_swaps(capsys, tmp_path):
    f = tmp_path / "k.mop"
    run(capsys, "gen", "knapsack", "--objects", 5, "--equal-volume-pairs", 2, "--seed", 9, "-o", f)
    _, report = run_json(capsys, "detect", f)
    assert report["detection"]["detected"] >= 2


def test_gen_max_clique_asymmetric(capsys, tmp_path):
    f = tmp_path / "mc.mop"
    run(capsys, "gen", "max-clique", "--nodes", 8, "--seed", 4, "-o", f)
    _, report = run_json(capsys, "detect", f)
    assert report["detection"]["detected"] == 0


def test_gen_invalid_params(capsys):
    assert run(capsys, "gen", "tsp", "--n", 0)[0] == 1
    code, _, err = run(capsys, "gen", "tsp", "--colors", 3)
    assert code == 1 and "--colors" in err


def test_gen_stdout(capsys):
    code, out, _ = run(capsys, "gen", "assignment", "--agents", 3)
    assert code == 0 and out.startswith("mop assignment_3_s0 {")


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "symloc", "parse", str(DATA / "tsp4.mop")],
                       capture_output=True, text=True)
    assert p.returncode == 0
    p = subprocess.run([sys.executable, "-m", "symloc", "--help"], capture_output=True, text=True)
    assert "SYMLOC_COLOR" in p.stdout and "detect" in p.stdout
