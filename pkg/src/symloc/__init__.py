"""Element-swap symmetry detection and symmetry-induced local search for
first-order optimization models."""
from .evaluator import check_model, eval_formula, eval_term, objective_value
from .instances import InstanceSpec, check_expectation, expected_detection, generate
from .model import (
    Assignment, Mop, PartialStructure, SymbolDecl, TypeDecl, ValidationReport, Vocabulary,
    assignment_space_size, enumerate_assignments, validate,
)
from .neighborhood import Move, Neighborhood, OrbitCapExceeded, build_neighborhood, neighbors, orbit_closure
from .parser import (
    AssignmentError, ModelSyntaxError, format_model, parse_model, parse_model_diagnostics,
    read_assignment, write_assignment,
)
from .search import (
    BudgetExhausted, PipelineResult, SearchConfig, SearchResult, Unsatisfiable, local_search, run_pipeline,
)
from .solver import Budget, ExactResult, initial_model, optimize_exact
from .symmetry import (
    Classification, DesSymmetry, DetectionReport, Policy, Rejection, VerificationReport,
    apply_symmetry, candidate_pairs, check_des_pair, classify_variance, detect, make_symmetry,
    verify_symmetry,
)

__all__ = [
    "Assignment",
    "AssignmentError",
    "Budget",
    "BudgetExhausted",
    "Classification",
    "DesSymmetry",
    "DetectionReport",
    "ExactResult",
    "InstanceSpec",
    "ModelSyntaxError",
    "Mop",
    "Move",
    "Neighborhood",
    "OrbitCapExceeded",
    "PartialStructure",
    "PipelineResult",
    "Policy",
    "Rejection",
    "SearchConfig",
    "SearchResult",
    "SymbolDecl",
    "TypeDecl",
    "Unsatisfiable",
    "ValidationReport",
    "VerificationReport",
    "Vocabulary",
    "apply_symmetry",
    "assignment_space_size",
    "build_neighborhood",
    "candidate_pairs",
    "check_des_pair",
    "check_expectation",
    "check_model",
    "classify_variance",
    "detect",
    "enumerate_assignments",
    "eval_formula",
    "eval_term",
    "expected_detection",
    "format_model",
    "generate",
    "initial_model",
    "local_search",
    "make_symmetry",
    "neighbors",
    "objective_value",
    "optimize_exact",
    "orbit_closure",
    "parse_model",
    "parse_model_diagnostics",
    "read_assignment",
    "run_pipeline",
    "validate",
    "verify_symmetry",
    "write_assignment",
]

__version__ = "0.1.0"
