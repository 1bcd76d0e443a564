"""Reductions: TBox internalization and the three reasoning problems."""

import random

from shiqtab import (
    All,
    And,
    Atom,
    Gci,
    KnowledgeBase,
    Not,
    Or,
    Role,
    RoleBox,
    find_model_bruteforce,
    internalized_concept,
    nnf,
    parse_kb,
    reduce_abox_consistency,
    reduce_concept_sat,
    reduce_subsumption,
    sexpr,
    solve,
)
from shiqtab.syntax import (
    TRIVIAL_TRUE,
    UNIVERSAL_ROLE,
    ConceptAssertion,
    Inequality,
    RoleAssertion,
)

from corpus import CURATED, random_kb_text

A, B, C = Atom("A"), Atom("B"), Atom("C")
U = Role(UNIVERSAL_ROLE)


def _conjuncts(c):
    """Flatten a left-associated conjunction."""
    out = []
    while isinstance(c, And):
        out.append(c.right)
        c = c.left
    out.append(c)
    out.reverse()
    return out


# ---------------------------------------------------------------------------
# internalization


def test_internalized_single_axiom():
    assert internalized_concept((Gci(A, B),)) == Or(Not(A), B)


def test_internalized_empty_tbox():
    assert internalized_concept(()) == TRIVIAL_TRUE


def test_internalized_conjunction_of_axioms():
    got = internalized_concept((Gci(A, B), Gci(B, C)))
    assert got == And(Or(Not(A), B), Or(Not(B), C))


def test_internalized_normalizes():
    got = internalized_concept((Gci(And(A, B), C),))
    assert got == Or(Or(Not(A), Not(B)), C)


# ---------------------------------------------------------------------------
# concept satisfiability


def test_reduce_concept_sat_payload_shape():
    kb = KnowledgeBase.assemble()
    reduced = reduce_concept_sat(A, kb)
    assert len(reduced.abox) == 1
    assertion = reduced.abox[0]
    assert isinstance(assertion, ConceptAssertion)
    assert reduced.individuals == (assertion.individual,)
    assert assertion.individual.startswith("$")
    assert assertion.concept == And(And(A, TRIVIAL_TRUE), All(U, TRIVIAL_TRUE))


def test_reduce_concept_sat_internalizes_tbox():
    kb = parse_kb("(implies A B)\n")
    reduced = reduce_concept_sat(A, kb)
    ct = Or(Not(A), B)
    assert reduced.abox[0].concept == And(And(A, ct), All(U, ct))


def test_reduce_concept_sat_universal_role_spans_signature():
    kb = parse_kb("(subrole r s)\n(related a b t)\n")
    reduced = reduce_concept_sat(A, kb)
    for name in ("r", "s", "t"):
        assert reduced.rbox.subsumes(Role(name), U)
        assert reduced.rbox.subsumes(Role(name, True), U)
    assert reduced.rbox.is_transitive(U)
    assert UNIVERSAL_ROLE not in kb.rbox.signature


def test_reduce_concept_sat_registers_concept_roles():
    kb = KnowledgeBase.assemble()
    reduced = reduce_concept_sat(parse_concept("(some q A)"), kb)
    assert reduced.rbox.subsumes(Role("q"), U)


def parse_concept(text):
    from shiqtab import parse_concept_text

    return parse_concept_text(text)


def test_reduce_concept_sat_provenance_and_solve():
    kb = KnowledgeBase.assemble()
    reduced = reduce_concept_sat(And(A, Not(A)), kb)
    assert reduced.provenance == "concept-sat"
    assert solve(reduced).consistent is False
    assert solve(reduce_concept_sat(A, kb)).consistent is True


# ---------------------------------------------------------------------------
# subsumption


def test_reduce_subsumption_carries_counterexample_seed():
    kb = KnowledgeBase.assemble()
    reduced = reduce_subsumption(A, A, kb)
    assert reduced.provenance == "subsumption"
    payload = reduced.abox[0].concept
    assert And(A, Not(A)) in _conjuncts(payload) or payload == And(
        And(And(A, Not(A)), TRIVIAL_TRUE), All(U, TRIVIAL_TRUE)
    )
    assert solve(reduced).consistent is False  # A subsumed by A


def test_reduce_subsumption_uses_axioms():
    kb = parse_kb("(implies A B)\n")
    assert solve(reduce_subsumption(A, B, kb)).consistent is False
    empty = KnowledgeBase.assemble()
    reduced = reduce_subsumption(A, B, empty)
    assert solve(reduced).consistent is True
    # the counterexample is a real model: something in A and not in B
    assert find_model_bruteforce(reduced, max_domain=2) is not None


# ---------------------------------------------------------------------------
# ABox consistency


def test_reduce_abox_tags_every_individual():
    kb = parse_kb("(implies A B)\n(instance a A)\n(related a b r)\n")
    reduced = reduce_abox_consistency(kb)
    assert reduced.provenance == "abox-consistency"
    ct = Or(Not(A), B)
    tag = And(ct, All(U, ct))
    tagged = {
        a.individual
        for a in reduced.abox
        if isinstance(a, ConceptAssertion) and a.concept == tag
    }
    assert tagged == {"a", "b"}


def test_reduce_abox_preserves_assertions():
    kb = parse_kb(
        "(instance a (and A (not B)))\n(related a b r)\n(distinct a b)\n"
    )
    reduced = reduce_abox_consistency(kb)
    assert ConceptAssertion("a", And(A, Not(B))) in reduced.abox
    assert RoleAssertion("a", "b", Role("r")) in reduced.abox
    assert Inequality("a", "b") in reduced.abox
    assert reduced.individuals == ("a", "b")


def test_reduce_abox_normalizes_concept_assertions():
    kb = parse_kb("(instance a (not (and A B)))\n")
    reduced = reduce_abox_consistency(kb)
    assert ConceptAssertion("a", Or(Not(A), Not(B))) in reduced.abox


def test_reduce_abox_empty_kb_gets_fresh_individual():
    reduced = reduce_abox_consistency(KnowledgeBase.assemble())
    assert len(reduced.individuals) == 1
    assert reduced.individuals[0].startswith("$")
    assert solve(reduced).consistent is True


def test_reduce_abox_empty_tbox_adds_only_trivial_tags():
    kb = parse_kb("(instance a A)\n(related a b s)\n")
    reduced = reduce_abox_consistency(kb)
    extra = [x for x in reduced.abox if x not in kb.abox]
    tag = And(TRIVIAL_TRUE, All(U, TRIVIAL_TRUE))
    assert all(
        isinstance(x, ConceptAssertion) and x.concept == tag for x in extra
    )
    assert len(extra) == 2


def test_reduction_size_stays_linear():
    rng = random.Random(7)
    for _ in range(25):
        kb = parse_kb(random_kb_text(rng))
        reduced = reduce_abox_consistency(kb)
        assert len(reduced.abox) == len(kb.abox) + max(1, len(kb.individuals))
        source = sum(len(sexpr(g.sub)) + len(sexpr(g.sup)) for g in kb.tbox)
        payload = sum(
            len(sexpr(a.concept))
            for a in reduced.abox
            if isinstance(a, ConceptAssertion)
        )
        original = sum(
            len(sexpr(a.concept))
            for a in kb.abox
            if isinstance(a, ConceptAssertion)
        )
        bound = original + (len(kb.individuals) + 1) * (3 * source + 60)
        assert payload <= bound


def test_reductions_share_verdicts_with_reasoner_wrappers():
    from shiqtab import consistency, satisfiability, subsumption

    for case in CURATED[:6]:
        kb = parse_kb(case.kb)
        direct = solve(reduce_abox_consistency(kb)).consistent
        assert consistency(kb).affirmative is direct
    kb = parse_kb("(implies A B)\n")
    assert satisfiability(kb, And(A, Not(B))).affirmative is False
    assert subsumption(kb, A, B).affirmative is True
