"""``symloc`` command line: parse, detect, solve, verify, gen.

Exit codes: 0 ok/sat, 1 input error, 2 unsat, 3 budget exhausted,
4 soundness violation (a detected symmetry failed the semantic check).
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from typing import List, Optional

from . import reports
from .instances import PARAMS, PROBLEMS, InstanceSpec, generate
from .model import DEFAULT_SPACE_BOUND, Mop, assignment_space_size
from .parser import ModelSyntaxError, format_model, parse_model
from .search import BudgetExhausted, SearchConfig, STRATEGIES, Unsatisfiable, run_pipeline
from .solver import Budget, optimize_exact
from .symmetry import DEFAULT_SAMPLES, Policy, detect, verify_symmetry

EXIT_OK, EXIT_INPUT, EXIT_UNSAT, EXIT_BUDGET, EXIT_UNSOUND = 0, 1, 2, 3, 4


class _InputError(Exception):
    pass


def _style(code: str, text: str, stream=sys.stdout) -> str:
    if os.environ.get("SYMLOC_COLOR", "1") == "0" or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def _load(path: str) -> Mop:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return parse_model(text, file=path)
    except ModelSyntaxError as exc:
        raise _InputError("\n".join(str(d) for d in exc.diagnostics)) from None


def _policy(args, mop: Mop) -> Policy:
    if args.policy == "auto":
        return Policy.auto(mop, samples=args.samples, seed=args.seed)
    if args.policy == "exhaustive" and assignment_space_size(mop, DEFAULT_SPACE_BOUND) is None:
        raise _InputError(f"exhaustive policy refused: assignment space exceeds {DEFAULT_SPACE_BOUND}")
    return Policy(args.policy, args.samples, args.seed)


def _emit(args, report: dict, timings: dict):
    if getattr(args, "timings", False):
        report["timings"] = {k: round(v, 6) for k, v in timings.items()}
    sys.stdout.write(reports.dumps(report))


# -- commands -----------------------------------------------------------------


def cmd_parse(args) -> int:
    mop = _load(args.file)
    if args.print:
        sys.stdout.write(format_model(mop))
    else:
        n_var = len(mop.vocabulary.var_symbols)
        print(f"{args.file}: ok ({mop.name}: {len(mop.vocabulary.types)} types, "
              f"{len(mop.vocabulary.symbols)} symbols, {n_var} var, {len(mop.theory)} constraint{'' if len(mop.theory) == 1 else 's'}, {mop.sense})")
    return EXIT_OK


def cmd_detect(args) -> int:
    t0 = time.perf_counter()
    mop = _load(args.file)
    policy = _policy(args, mop)
    report = detect(mop, policy)
    timings = {"detect": report.elapsed, "total": time.perf_counter() - t0}
    if args.json:
        out = reports.envelope("detect", {"policy": policy.kind, "samples": policy.samples, "seed": policy.seed}, mop)
        out["detection"] = reports.detection_data(mop, report, policy)
        _emit(args, out, timings)
        return EXIT_OK
    print(f"model {mop.name}: policy {policy.kind}, {report.candidates_checked} candidate pairs")
    rows = [[s.type_name, str(s.a), str(s.b), ",".join(s.sigma),
             _style("32" if s.classification.kind == "variant" else "33", s.classification.kind)]
            for s in report.symmetries]
    rows += [[r.type_name, str(r.a), str(r.b), "", _style("31", "rejected: " + r.reason)]
             for r in report.rejected]
    if rows:
        print(reports.table(["type", "a", "b", "sigma", "outcome"], rows))
    print(f"detected {len(report.detected)}, rejected {len(report.rejected)} "
          f"({len(report.objective_invariant)} objective-invariant), neighborhood size {len(report.symmetries)}")
    if args.timings:
        print(f"elapsed {report.elapsed:.3f}s")
    return EXIT_OK


def _config(args) -> SearchConfig:
    try:
        return SearchConfig(strategy=args.strategy, max_iters=args.max_iters, restarts=args.restarts,
                            sideways_limit=args.sideways, seed=args.seed, time_limit=args.time_limit)
    except ValueError as exc:
        raise _InputError(str(exc)) from None


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    mop = _load(args.file)
    budget = Budget(args.max_nodes, args.time_limit)
    out = reports.envelope("solve", {
        "method": args.method, "strategy": args.strategy, "max_iters": args.max_iters,
        "restarts": args.restarts, "sideways": args.sideways, "seed": args.seed,
        "time_limit": args.time_limit, "max_nodes": args.max_nodes}, mop)
    if args.method == "exact":
        res = optimize_exact(mop, budget)
        code = {"sat": EXIT_OK, "unsat": EXIT_UNSAT, "exhausted": EXIT_BUDGET}[res.status]
        if args.json:
            out["exact"] = reports.exact_data(mop, res)
            _emit(args, out, {"total": time.perf_counter() - t0})
            return code
        print(f"status {res.status}, objective {res.objective}, nodes {res.nodes_explored}")
        if res.assignment is not None:
            print(reports.json.dumps(reports.assignment_to_data(mop, res.assignment)))
        return code
    cfg = _config(args)
    policy = Policy.auto(mop, samples=args.samples, seed=args.seed)
    try:
        res = run_pipeline(mop, cfg, policy, budget)
    except Unsatisfiable:
        print("unsat: the theory has no model", file=sys.stderr)
        return EXIT_UNSAT
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.json:
        out["detection"] = reports.detection_data(mop, res.report, policy)
        out["search"] = reports.search_data(mop, res.search, res.initial.objective)
        _emit(args, out, {"detect": res.report.elapsed, "total": time.perf_counter() - t0})
        return EXIT_OK
    s = res.search
    print(f"initial objective {res.initial.objective}, neighborhood size {len(res.report.symmetries)}")
    print(f"termination {_style('1', s.termination)}, best objective {s.best_objective}, "
          f"{s.iterations} iterations, {s.moves_executed} moves")
    print("trajectory " + " ".join(f"{i}:{v}" for i, v in s.trajectory))
    print(reports.json.dumps(reports.assignment_to_data(mop, s.best)))
    return EXIT_OK


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    mop = _load(args.file)
    policy = Policy.auto(mop, samples=args.samples, seed=args.seed)
    report = detect(mop, policy)
    checks = [verify_symmetry(mop, s, args.budget, args.samples, args.seed) for s in report.detected]
    failed = [v for v in checks if not v.passed]
    t_verify = time.perf_counter() - t0
    oracle = {"status": "skipped", "pipeline_objective": None, "exact_objective": None, "gap": None}
    if assignment_space_size(mop, args.budget) is not None:
        try:
            pipe = run_pipeline(mop, SearchConfig(seed=args.seed, restarts=args.restarts), policy)
            ex = optimize_exact(mop)
            oracle = {"status": ex.status, "pipeline_objective": pipe.search.best_objective,
                      "exact_objective": ex.objective,
                      "gap": None if ex.objective is None else abs(pipe.search.best_objective - ex.objective)}
        except Unsatisfiable:
            oracle["status"] = "unsat"
        except BudgetExhausted:
            oracle["status"] = "exhausted"
    code = EXIT_UNSOUND if failed else EXIT_OK
    if args.json:
        out = reports.envelope("verify", {"budget": args.budget, "samples": args.samples, "seed": args.seed,
                                          "restarts": args.restarts}, mop)
        out["verification"] = {
            "passed": not failed,
            "results": [reports.verification_data(mop, v) for v in checks],
        }
        out["oracle"] = oracle
        _emit(args, out, {"verify": t_verify, "total": time.perf_counter() - t0})
        return code
    for v in checks:
        mark = _style("32", "pass") if v.passed else _style("31", "FAIL")
        print(f"{mark}  {v.symmetry.type_name} ({v.symmetry.a},{v.symmetry.b})  {v.mode}, {v.checked} checked")
        if v.counterexample is not None:
            print("      counterexample " + reports.json.dumps(reports.assignment_to_data(mop, v.counterexample)))
    print(f"{len(checks) - len(failed)}/{len(checks)} symmetries verified")
    if oracle["status"] == "skipped":
        print("oracle comparison skipped: assignment space exceeds budget")
    elif oracle["gap"] is None:
        print(f"oracle comparison: {oracle['status']}")
    else:
        print(f"local {oracle['pipeline_objective']}, exact {oracle['exact_objective']}, gap {oracle['gap']}")
    if failed:
        print(_style("31", "soundness violation: detected symmetry failed the semantic check", sys.stderr),
              file=sys.stderr)
    return code


_GEN_FLAGS = ("n", "nodes", "colors", "objects", "agents", "equal_volume_pairs", "equal_value_pairs",
              "edge_prob", "symmetric", "complete")


def cmd_gen(args) -> int:
    params = {k: v for k in _GEN_FLAGS if (v := getattr(args, k)) is not None and v is not False}
    allowed = PARAMS.get(args.problem, {})
    stray = [k for k in params if k not in allowed]
    if stray:
        raise _InputError(f"{args.problem} does not take --{stray[0].replace('_', '-')}")
    try:
        text = generate(InstanceSpec(args.problem, params, args.seed))
    except ValueError as exc:
        raise _InputError(str(exc)) from None
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise _InputError(f"cannot write {args.output}: {exc.strerror or exc}") from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="symloc",
        description="Detect element-swap symmetries of optimization models and search the neighborhoods they induce.",
        epilog="Exit codes: 0 ok, 1 input error, 2 unsat, 3 budget exhausted, 4 soundness violation. "
               "SYMLOC_COLOR=0 disables ANSI styling.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, json_flag=True):
        sp.add_argument("file", help="model file (.mop)")
        if json_flag:
            sp.add_argument("--json", action="store_true", help="print a JSON report")
            sp.add_argument("--timings", action="store_true",
                            help="include wall-clock timings (JSON reports are otherwise byte-stable)")
        sp.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                        help=f"assignments drawn by sampling checks (default {DEFAULT_SAMPLES})")

    sp = sub.add_parser("parse", help="parse and validate a model")
    sp.add_argument("file", help="model file (.mop)")
    sp.add_argument("--print", action="store_true", help="print the model in canonical form")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("detect", help="detect swap symmetries and classify them against the objective")
    common(sp)
    sp.add_argument("--policy", choices=("auto", "syntactic", "exhaustive", "sample"), default="auto",
                    help=f"variance check; auto = exhaustive when the assignment space is at most "
                         f"{DEFAULT_SPACE_BOUND}, else sample")
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("solve", help="solve by symmetry-neighborhood local search or exactly")
    common(sp)
    sp.add_argument("--method", choices=("local", "exact"), default="local")
    sp.add_argument("--strategy", choices=STRATEGIES, default="best-improvement")
    sp.add_argument("--max-iters", type=int, default=1000)
    sp.add_argument("--restarts", type=int, default=0)
    sp.add_argument("--sideways", type=int, default=0, help="consecutive equal-objective moves allowed")
    sp.add_argument("--time-limit", type=float, default=None, help="seconds")
    sp.add_argument("--max-nodes", type=int, default=1_000_000, help="exact-solver node budget")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="check detected symmetries semantically and compare with the exact optimum")
    common(sp)
    sp.add_argument("--budget", type=int, default=10**5,
                    help="largest assignment space checked exhaustively (default 100000)")
    sp.add_argument("--restarts", type=int, default=0,
                    help="extra seeded initial models for the local run compared with the optimum")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("gen", help="generate a benchmark instance")
    sp.add_argument("problem", choices=PROBLEMS)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", help="output file (default stdout)")
    for flag, typ in (("n", int), ("nodes", int), ("colors", int), ("objects", int), ("agents", int),
                      ("equal-volume-pairs", int), ("equal-value-pairs", int), ("edge-prob", float)):
        sp.add_argument(f"--{flag}", type=typ, default=None)
    sp.add_argument("--symmetric", action="store_true")
    sp.add_argument("--complete", action="store_true", help="cnp: complete graph")
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
