"""JSON payloads for command reports.  Field names here are the published
report format (see ``schemas/report.schema.json``)."""
from __future__ import annotations

import hashlib
import json
from importlib import resources
from typing import List, Optional

from .model import Mop
from .parser import assignment_to_data, format_model
from .search import SearchResult
from .solver import ExactResult
from .symmetry import DesSymmetry, DetectionReport, Policy, Rejection, VerificationReport

SCHEMA_ID = "symloc.report/1"


def model_digest(mop: Mop) -> str:
    return "sha256:" + hashlib.sha256(format_model(mop).encode()).hexdigest()


def envelope(command: str, args: dict, mop: Optional[Mop]) -> dict:
    out = {"schema": SCHEMA_ID, "command": command, "args": args}
    if mop is not None:
        out["model"] = {"name": mop.name, "digest": model_digest(mop), "sense": mop.sense}
    return out


def symmetry_data(mop: Mop, s: DesSymmetry) -> dict:
    c = s.classification
    cls = {"kind": c.kind}
    if c.witness is not None:
        cls["witness"] = assignment_to_data(mop, c.witness)
    if c.samples is not None:
        cls["samples"] = c.samples
    return {"type": s.type_name, "a": s.a, "b": s.b, "sigma": list(s.sigma), "classification": cls}


def rejection_data(r: Rejection) -> dict:
    return {"type": r.type_name, "a": r.a, "b": r.b, "reason": r.reason, "detail": r.detail}


def detection_data(mop: Mop, report: DetectionReport, policy: Policy) -> dict:
    return {
        "policy": {"kind": policy.kind, "samples": policy.samples, "seed": policy.seed},
        "candidates_checked": report.candidates_checked,
        "detected": len(report.detected),
        "neighborhood_size": len(report.symmetries),
        "symmetries": [symmetry_data(mop, s) for s in report.symmetries],
        "rejected": [rejection_data(r) for r in report.rejected],
    }


def exact_data(mop: Mop, r: ExactResult) -> dict:
    return {
        "status": r.status,
        "objective": r.objective,
        "nodes_explored": r.nodes_explored,
        "assignment": None if r.assignment is None else assignment_to_data(mop, r.assignment),
    }


def search_data(mop: Mop, r: SearchResult, initial_objective: int) -> dict:
    return {
        "termination": r.termination,
        "initial_objective": initial_objective,
        "best_objective": r.best_objective,
        "iterations": r.iterations,
        "moves_executed": r.moves_executed,
        "trajectory": [list(p) for p in r.trajectory],
        "assignment": assignment_to_data(mop, r.best),
    }


def verification_data(mop: Mop, v: VerificationReport) -> dict:
    return {
        "type": v.symmetry.type_name, "a": v.symmetry.a, "b": v.symmetry.b,
        "passed": v.passed, "mode": v.mode, "checked": v.checked,
        "counterexample": None if v.counterexample is None else assignment_to_data(mop, v.counterexample),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def schema() -> dict:
    return json.loads((resources.files("symloc") / "schemas" / "report.schema.json").read_text())


def table(headers: List[str], rows: List[List[object]]) -> str:
    cells = [[str(c) for c in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(headers)]
    line = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    return "\n".join([line(headers), line(["-" * w for w in widths])] + [line(r) for r in cells])
