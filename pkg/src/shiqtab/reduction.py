"""Folding the TBox away: every reasoning task becomes ABox consistency.

A TBox {C1 below D1, ...} is equivalent to the single concept
CT = (not C1 or D1) and ... holding at every element.  Adding CT and
(all U CT) to each named individual, where U is a fresh transitive role
above every role of the signature, forces CT along every role path, so
the engine only ever sees problems with an empty TBox.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    All,
    And,
    Assertion,
    ConceptAssertion,
    Concept,
    Gci,
    KnowledgeBase,
    Not,
    Or,
    Role,
    RoleBox,
    TRIVIAL_TRUE,
    UNIVERSAL_ROLE,
    concept_role_names,
    nnf,
)

#: Fresh individual carrying the query concept of a satisfiability or
#: subsumption question.
QUERY_INDIVIDUAL = "$q0"
#: Fresh individual standing in for an individual-free ABox.
ANONYMOUS_INDIVIDUAL = "$a0"


@dataclass(frozen=True)
class ReducedProblem:
    """An ABox-consistency problem with no TBox left.

    The role box is the source one extended with the universal role; the
    provenance string records which query produced the problem.
    """

    abox: tuple[Assertion, ...]
    rbox: RoleBox
    universal_role: str
    provenance: str
    individuals: tuple[str, ...]


def internalized_concept(tbox: tuple[Gci, ...]) -> Concept:
    """Single concept equivalent to a TBox holding at an element.

    The empty TBox folds to the trivially true (not $bot).
    """
    parts = [nnf(Or(Not(g.sub), g.sup)) for g in tbox]
    if not parts:
        return TRIVIAL_TRUE
    acc = parts[0]
    for p in parts[1:]:
        acc = And(acc, p)
    return acc


def universal_rbox(rbox: RoleBox) -> RoleBox:
    """Extend a role box with the fresh transitive role U sitting above
    every signature role and its inverse."""
    u = Role(UNIVERSAL_ROLE)
    incs = set(rbox.inclusions)
    for name in sorted(rbox.signature):
        incs.add((Role(name), u))
        incs.add((Role(name, True), u))
    return RoleBox(
        frozenset(incs),
        rbox.transitive_names | {UNIVERSAL_ROLE},
        rbox.extra_names | {UNIVERSAL_ROLE},
    )


def _tbox_tag(tbox: tuple[Gci, ...]) -> Concept:
    ct = internalized_concept(tbox)
    return nnf(And(ct, All(Role(UNIVERSAL_ROLE), ct)))


def reduce_abox_consistency(kb: KnowledgeBase) -> ReducedProblem:
    """Consistency of a knowledge base as a TBox-free problem.

    Every named individual receives the internalized TBox and its
    propagation along U; an individual-free ABox gets one fresh root.
    """
    tag = _tbox_tag(kb.tbox)
    individuals = kb.individuals or (ANONYMOUS_INDIVIDUAL,)
    abox: list[Assertion] = []
    for a in kb.abox:
        if isinstance(a, ConceptAssertion):
            abox.append(ConceptAssertion(a.individual, nnf(a.concept)))
        else:
            abox.append(a)
    abox.extend(ConceptAssertion(name, tag) for name in individuals)
    return ReducedProblem(
        abox=tuple(abox),
        rbox=universal_rbox(kb.rbox),
        universal_role=UNIVERSAL_ROLE,
        provenance="abox-consistency",
        individuals=individuals,
    )


def reduce_concept_sat(concept: Concept, kb: KnowledgeBase) -> ReducedProblem:
    """Satisfiability of a concept with respect to a knowledge base's TBox
    and role box, as a one-individual consistency problem."""
    rbox = kb.rbox
    extra = concept_role_names(concept) - set(rbox.signature)
    if extra:
        rbox = RoleBox(
            rbox.inclusions, rbox.transitive_names, rbox.extra_names | extra
        )
    ct = internalized_concept(kb.tbox)
    payload = nnf(And(And(concept, ct), All(Role(UNIVERSAL_ROLE), ct)))
    return ReducedProblem(
        abox=(ConceptAssertion(QUERY_INDIVIDUAL, payload),),
        rbox=universal_rbox(rbox),
        universal_role=UNIVERSAL_ROLE,
        provenance="concept-sat",
        individuals=(QUERY_INDIVIDUAL,),
    )


def reduce_subsumption(sub: Concept, sup: Concept, kb: KnowledgeBase) -> ReducedProblem:
    """sub below sup holds iff (sub and (not sup)) is unsatisfiable."""
    problem = reduce_concept_sat(And(sub, Not(sup)), kb)
    return ReducedProblem(
        abox=problem.abox,
        rbox=problem.rbox,
        universal_role=problem.universal_role,
        provenance="subsumption",
        individuals=problem.individuals,
    )
