"""Tableau-based decision procedure for the description logic SHIQ.

The package decides ABox consistency, concept satisfiability and concept
subsumption for knowledge bases with general concept inclusions,
transitive roles, inverse roles, role hierarchies and qualified number
restrictions on simple roles.
"""

from .errors import (
    EngineLimitError,
    ExtractionError,
    ParseError,
    ShiqError,
    SignatureError,
    ValidationError,
)
from .syntax import (
    All,
    And,
    Atom,
    AtLeast,
    AtMost,
    Concept,
    ConceptAssertion,
    Gci,
    Inequality,
    KnowledgeBase,
    Not,
    Or,
    Role,
    RoleAssertion,
    RoleBox,
    Some,
    concept_closure,
    nnf,
    neg_nnf,
    problem_closure,
    sexpr,
)
from .reduction import (
    ReducedProblem,
    internalized_concept,
    reduce_abox_consistency,
    reduce_concept_sat,
    reduce_subsumption,
)
from .forest import Forest, initial_forest
from .engine import Limits, SolveResult, limits_for, solve
from .semantics import (
    Interpretation,
    check_model,
    eval_concept,
    find_model_violation,
    format_interpretation,
    parse_interpretation,
)
from .modelsearch import find_model_bruteforce
from .tableau import (
    TableauStructure,
    check_tableau,
    extract_model,
    tableau_of_interpretation,
    unravel_bounded,
)
from .parser import kb_to_text, parse_concept_text, parse_kb
from .reasoner import Answer, consistency, satisfiability, subsumption

__version__ = "0.1.0"

__all__ = [
    "All",
    "And",
    "Answer",
    "Atom",
    "AtLeast",
    "AtMost",
    "Concept",
    "ConceptAssertion",
    "EngineLimitError",
    "ExtractionError",
    "Forest",
    "Gci",
    "Inequality",
    "Interpretation",
    "KnowledgeBase",
    "Limits",
    "Not",
    "Or",
    "ParseError",
    "ReducedProblem",
    "Role",
    "RoleAssertion",
    "RoleBox",
    "ShiqError",
    "SignatureError",
    "SolveResult",
    "Some",
    "TableauStructure",
    "ValidationError",
    "check_model",
    "check_tableau",
    "concept_closure",
    "consistency",
    "eval_concept",
    "extract_model",
    "find_model_bruteforce",
    "find_model_violation",
    "format_interpretation",
    "initial_forest",
    "internalized_concept",
    "kb_to_text",
    "limits_for",
    "neg_nnf",
    "nnf",
    "parse_concept_text",
    "parse_interpretation",
    "parse_kb",
    "problem_closure",
    "reduce_abox_consistency",
    "reduce_concept_sat",
    "reduce_subsumption",
    "satisfiability",
    "sexpr",
    "solve",
    "subsumption",
    "tableau_of_interpretation",
    "unravel_bounded",
]
