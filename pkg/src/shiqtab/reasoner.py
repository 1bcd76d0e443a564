"""High-level reasoning services over a knowledge base."""

from __future__ import annotations

from dataclasses import dataclass

from .engine import SolveResult, solve
from .reduction import (
    ReducedProblem,
    reduce_abox_consistency,
    reduce_concept_sat,
    reduce_subsumption,
)
from .syntax import Concept, KnowledgeBase


@dataclass
class Answer:
    """Outcome of a reasoning query.

    affirmative follows the query's own polarity: consistency and
    satisfiability hold when the reduced problem is consistent,
    subsumption holds when it is not.
    """

    affirmative: bool
    result: SolveResult
    problem: ReducedProblem


def consistency(kb: KnowledgeBase, **options) -> Answer:
    problem = reduce_abox_consistency(kb)
    result = solve(problem, **options)
    return Answer(result.consistent, result, problem)


def satisfiability(kb: KnowledgeBase, concept: Concept, **options) -> Answer:
    problem = reduce_concept_sat(concept, kb)
    result = solve(problem, **options)
    return Answer(result.consistent, result, problem)


def subsumption(kb: KnowledgeBase, sub: Concept, sup: Concept, **options) -> Answer:
    problem = reduce_subsumption(sub, sup, kb)
    result = solve(problem, **options)
    return Answer(not result.consistent, result, problem)
