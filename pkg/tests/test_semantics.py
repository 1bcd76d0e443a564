"""Concept evaluation, model checking and interpretation serialization."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiqtab import (
    All,
    And,
    AtLeast,
    AtMost,
    Atom,
    Interpretation,
    Not,
    Or,
    Role,
    SignatureError,
    Some,
    check_model,
    eval_concept,
    find_model_violation,
    format_interpretation,
    neg_nnf,
    nnf,
    parse_interpretation,
    parse_kb,
)

from corpus import random_concept_ast, random_interpretation

A, B = Atom("A"), Atom("B")
R = Role("r")


@pytest.fixture
def interp():
    return Interpretation(
        domain=(0, 1),
        atoms={"A": frozenset({0}), "B": frozenset({1})},
        roles={"r": frozenset({(0, 1)})},
        individuals={"a": 0, "b": 1},
    )


def test_eval_boolean_connectives(interp):
    assert eval_concept(interp, A) == {0}
    assert eval_concept(interp, Not(A)) == {1}
    assert eval_concept(interp, And(A, B)) == frozenset()
    assert eval_concept(interp, Or(A, B)) == {0, 1}
    assert eval_concept(interp, Not(Not(B))) == {1}


def test_eval_restrictions(interp):
    assert eval_concept(interp, Some(R, B)) == {0}
    # Element 1 has no r-successors, so the universal holds vacuously.
    assert eval_concept(interp, All(R, B)) == {0, 1}
    assert eval_concept(interp, All(R, A)) == {1}
    assert eval_concept(interp, AtLeast(1, R, B)) == {0}
    assert eval_concept(interp, AtLeast(0, R, B)) == {0, 1}
    assert eval_concept(interp, AtMost(0, R, B)) == {1}
    assert eval_concept(interp, AtMost(1, R, B)) == {0, 1}


def test_eval_inverse_roles(interp):
    inv = R.inverse()
    assert interp.pairs_of(inv) == {(1, 0)}
    assert interp.successors(1, inv) == {0}
    assert eval_concept(interp, Some(inv, A)) == {1}
    assert eval_concept(interp, All(inv, B)) == {0}


def test_eval_unknown_names_raise(interp):
    with pytest.raises(SignatureError, match="atom Z"):
        eval_concept(interp, Atom("Z"))
    with pytest.raises(SignatureError, match="role q"):
        interp.pairs_of(Role("q"))
    with pytest.raises(SignatureError, match="role q"):
        eval_concept(interp, Some(Role("q"), A))


def test_model_check_role_inclusion():
    kb = parse_kb("(subrole r s)\n(instance a A)")
    good = Interpretation(
        (0,), {"A": frozenset({0})},
        {"r": frozenset({(0, 0)}), "s": frozenset({(0, 0)})},
        {"a": 0},
    )
    assert check_model(good, kb)
    bad = Interpretation(
        (0,), {"A": frozenset({0})},
        {"r": frozenset({(0, 0)}), "s": frozenset()},
        {"a": 0},
    )
    assert find_model_violation(bad, kb) == "role inclusion violated: r into s"


def test_model_check_transitivity():
    kb = parse_kb("(transitive r)\n(instance a A)")
    bad = Interpretation(
        (0, 1, 2), {"A": frozenset({0})},
        {"r": frozenset({(0, 1), (1, 2)})},
        {"a": 0},
    )
    assert find_model_violation(bad, kb) == "transitivity violated: r misses (0, 2)"
    good = Interpretation(
        (0, 1, 2), {"A": frozenset({0})},
        {"r": frozenset({(0, 1), (1, 2), (0, 2)})},
        {"a": 0},
    )
    assert check_model(good, kb)


def test_model_check_axiom():
    kb = parse_kb("(implies A B)\n(instance a A)")
    bad = Interpretation(
        (0,), {"A": frozenset({0}), "B": frozenset()}, {}, {"a": 0}
    )
    assert find_model_violation(bad, kb) == "axiom violated at 0: (implies A B)"


def test_model_check_assertions():
    kb = parse_kb("(instance a A)\n(related a b r)\n(distinct a b)")
    atoms = {"A": frozenset({0})}
    roles = {"r": frozenset({(0, 1)})}
    assert check_model(Interpretation((0, 1), atoms, roles, {"a": 0, "b": 1}), kb)
    no_atom = Interpretation((0, 1), {"A": frozenset()}, roles, {"a": 0, "b": 1})
    assert find_model_violation(no_atom, kb) == "assertion violated: (instance a A)"
    no_edge = Interpretation(
        (0, 1), atoms, {"r": frozenset()}, {"a": 0, "b": 1}
    )
    assert find_model_violation(no_edge, kb) == "assertion violated: (related a b r)"
    same = Interpretation(
        (0, 1), atoms, {"r": frozenset({(0, 0)})}, {"a": 0, "b": 0}
    )
    assert find_model_violation(same, kb) == "assertion violated: (distinct a b)"


@given(st.integers(0, 10**6))
@settings(max_examples=200, deadline=None)
def test_eval_agrees_with_normal_forms(seed):
    rng = random.Random(seed)
    concept = random_concept_ast(rng, rng.randint(0, 4))
    interp = random_interpretation(rng)
    domain = frozenset(interp.domain)
    extension = eval_concept(interp, concept)
    assert eval_concept(interp, nnf(concept)) == extension
    assert eval_concept(interp, Not(concept)) == domain - extension
    assert eval_concept(interp, neg_nnf(concept)) == domain - extension


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_interpretation_round_trip(seed):
    rng = random.Random(seed)
    interp = random_interpretation(rng, individuals=("a", "b"))
    parsed = parse_interpretation(format_interpretation(interp))
    assert parsed.domain == interp.domain
    assert parsed.atoms == interp.atoms
    assert parsed.roles == interp.roles
    assert parsed.individuals == interp.individuals


def test_parse_interpretation_accepts_comments_and_empty_roles():
    parsed = parse_interpretation(
        "# candidate model\ndomain 2\n\natom A 0 1\natom B\nrole r\nrole s 0 1\n"
        "individual a 1\n"
    )
    assert parsed.domain == (0, 1)
    assert parsed.atoms == {"A": frozenset({0, 1}), "B": frozenset()}
    assert parsed.roles == {"r": frozenset(), "s": frozenset({(0, 1)})}
    assert parsed.individuals == {"a": 1}


def test_parse_interpretation_errors():
    with pytest.raises(ValueError, match="unknown interpretation line"):
        parse_interpretation("domain 1\nwhatever x\n")
    with pytest.raises(ValueError, match="lacks a domain"):
        parse_interpretation("atom A 0\n")
