"""Witness structures: model extraction, closure checking, unravelling."""

import pytest

from shiqtab import (
    All,
    And,
    AtLeast,
    AtMost,
    Atom,
    ExtractionError,
    Not,
    Or,
    Role,
    Some,
    TableauStructure,
    check_model,
    check_tableau,
    extract_model,
    find_model_bruteforce,
    parse_kb,
    reduce_abox_consistency,
    solve,
    tableau_of_interpretation,
    unravel_bounded,
)

from corpus import CURATED, run_case

CASES = {c.name: c for c in CURATED}

A, B = Atom("A"), Atom("B")
R = Role("r")


def solved(name):
    case = CASES[name]
    problem = reduce_abox_consistency(parse_kb(case.kb))
    result = solve(problem)
    assert result.consistent is case.expected
    return result, problem


# ---------------------------------------------------------------------------
# model extraction


def test_extract_model_simple_forest():
    result, problem = solved("conjunction")
    interp = extract_model(result.forest, problem)
    assert check_model(interp, problem)
    assert "a" in interp.individuals


def test_extract_model_with_tree_successors():
    result, problem = solved("existential")
    interp = extract_model(result.forest, problem)
    assert check_model(interp, problem)
    a = interp.individuals["a"]
    assert interp.successors(a, R) & interp.atoms["A"]


def test_extract_model_identifies_merged_individuals():
    result, problem = solved("root-merge")
    interp = extract_model(result.forest, problem)
    assert check_model(interp, problem)
    assert interp.individuals["a"] == interp.individuals["b"]


def test_extract_model_closes_transitive_roles():
    kb = parse_kb(
        "(transitive t)\n(related a b t)\n(related b c t)\n"
        "(distinct a b)\n(distinct b c)\n(distinct a c)\n(instance a A)"
    )
    problem = reduce_abox_consistency(kb)
    result = solve(problem)
    interp = extract_model(result.forest, problem)
    assert check_model(interp, problem)
    a, b, c = (interp.individuals[n] for n in "abc")
    assert (a, c) in interp.roles["t"]


def test_extract_model_rejects_blocked_forests():
    result, problem = solved("blocking-simple-cycle")
    with pytest.raises(ExtractionError, match="blocked"):
        extract_model(result.forest, problem)


# ---------------------------------------------------------------------------
# closure checking on hand-built structures


def _kb_problem(text):
    return parse_kb(text)


def _structure(kb, labels, edges=(), individuals=None, frontier=()):
    table: dict[Role, set] = {}
    for a, b, role in edges:
        table.setdefault(role, set()).add((a, b))
        table.setdefault(role.inverse(), set()).add((b, a))
    return TableauStructure(
        elements=tuple(sorted(labels)),
        labels={k: frozenset(v) for k, v in labels.items()},
        edges=table,
        individuals=individuals or {},
        frontier=frozenset(frontier),
    )


def test_check_tableau_contradiction():
    kb = _kb_problem("(instance a A)")
    s = _structure(kb, {0: {A, Not(A)}}, individuals={"a": 0})
    assert check_tableau(s, kb) == "contradictory literals at 0: A"


def test_check_tableau_requires_negation_normal_form():
    kb = _kb_problem("(instance a A)")
    s = _structure(kb, {0: {A, Not(And(A, B))}}, individuals={"a": 0})
    assert check_tableau(s, kb).startswith("label not in negation normal form")


def test_check_tableau_boolean_expansion():
    kb = _kb_problem("(instance a A)")
    s = _structure(kb, {0: {A, And(A, B)}}, individuals={"a": 0})
    assert check_tableau(s, kb) == "conjunction not expanded at 0: (and A B)"
    s = _structure(kb, {0: {A, Or(B, B)}}, individuals={"a": 0})
    assert check_tableau(s, kb) == "disjunction not expanded at 0: (or B B)"


def test_check_tableau_universal_and_existential():
    kb = _kb_problem("(instance a A)")
    s = _structure(
        kb,
        {0: {A, All(R, B)}, 1: set()},
        edges=[(0, 1, R)],
        individuals={"a": 0},
    )
    assert (
        check_tableau(s, kb) == "universal restriction violated at 0 -> 1: (all r B)"
    )
    s = _structure(kb, {0: {A, Some(R, B)}}, individuals={"a": 0})
    assert check_tableau(s, kb) == "existential unsatisfied at 0: (some r B)"
    # The same element on the frontier is exempt from witnesses.
    s = _structure(kb, {0: {A, Some(R, B)}}, individuals={"a": 0}, frontier=[0])
    assert check_tableau(s, kb) is None


def test_check_tableau_transitive_propagation():
    kb = _kb_problem("(transitive r)\n(instance a (all r B))")
    s = _structure(
        kb,
        {0: {All(R, B)}, 1: {B}},
        edges=[(0, 1, R)],
        individuals={"a": 0},
    )
    assert check_tableau(s, kb) == (
        "transitive universal not propagated at 0 -> 1: (all r B) via r"
    )
    s = _structure(
        kb,
        {0: {All(R, B)}, 1: {B, All(R, B)}},
        edges=[(0, 1, R)],
        individuals={"a": 0},
    )
    assert check_tableau(s, kb) is None


def test_check_tableau_counting_conditions():
    kb = _kb_problem("(instance a A)")
    s = _structure(kb, {0: {A, AtLeast(1, R, B)}}, individuals={"a": 0})
    assert check_tableau(s, kb) == "at-least unsatisfied at 0: (at-least 1 r B)"
    s = _structure(
        kb,
        {0: {A, AtMost(0, R, B)}, 1: {B}},
        edges=[(0, 1, R)],
        individuals={"a": 0},
    )
    assert check_tableau(s, kb) == "at-most exceeded at 0: (at-most 0 r B)"
    # Successors must decide the qualifier one way or the other.
    s = _structure(
        kb,
        {0: {A, AtMost(1, R, B)}, 1: set()},
        edges=[(0, 1, R)],
        individuals={"a": 0},
    )
    assert check_tableau(s, kb) == "undecided qualifier at 0 -> 1: (at-most 1 r B)"


def test_check_tableau_structural_conditions():
    kb = _kb_problem("(subrole r s)\n(instance a A)")
    s = TableauStructure(
        elements=(0, 1),
        labels={0: frozenset({A}), 1: frozenset()},
        edges={R: {(0, 1)}},
        individuals={"a": 0},
    )
    assert check_tableau(s, kb) == "inverse edges out of sync for r"
    s = TableauStructure(
        elements=(0, 1),
        labels={0: frozenset({A}), 1: frozenset()},
        edges={R: {(0, 1)}, R.inverse(): {(1, 0)}},
        individuals={"a": 0},
    )
    assert check_tableau(s, kb) == "role hierarchy violated: r not within s"


def test_check_tableau_assertions():
    kb = _kb_problem("(instance a A)\n(related a b r)\n(distinct a b)")
    good = _structure(
        kb, {0: {A}, 1: set()}, edges=[(0, 1, R)], individuals={"a": 0, "b": 1}
    )
    assert check_tableau(good, kb) is None
    missing_concept = _structure(
        kb, {0: set(), 1: set()}, edges=[(0, 1, R)], individuals={"a": 0, "b": 1}
    )
    assert check_tableau(missing_concept, kb) == "asserted concept missing for a: A"
    missing_edge = _structure(
        kb, {0: {A}, 1: set()}, individuals={"a": 0, "b": 1}
    )
    assert check_tableau(missing_edge, kb) == "asserted edge missing: a b r"
    identified = _structure(kb, {0: {A}}, edges=[(0, 0, R)], individuals={"a": 0, "b": 0})
    assert check_tableau(identified, kb) == "distinct individuals identified: a b"


# ---------------------------------------------------------------------------
# bounded unravelling


def test_unravel_depth_zero_keeps_roots_on_frontier():
    result, problem = solved("blocking-simple-cycle")
    structure = unravel_bounded(result.forest, problem, 0)
    assert all(len(path) == 1 for path in structure.elements)
    assert structure.frontier == frozenset(structure.elements)
    assert check_tableau(structure, problem) is None


def test_unravel_finite_forest_has_empty_frontier():
    result, problem = solved("existential")
    structure = unravel_bounded(result.forest, problem, 8)
    assert structure.frontier == frozenset()
    assert check_tableau(structure, problem) is None


def test_unravel_blocked_forest_extends_to_depth():
    result, problem = solved("blocking-simple-cycle")
    structure = unravel_bounded(result.forest, problem, 6)
    assert check_tableau(structure, problem) is None
    depths = sorted(len(path) - 1 for path in structure.elements)
    assert depths[-1] == 6
    assert structure.frontier == frozenset(
        p for p in structure.elements if len(p) - 1 == 6
    )
    assert structure.frontier


def test_unravel_wires_root_edges_and_merges():
    result, problem = solved("root-merge")
    structure = unravel_bounded(result.forest, problem, 4)
    assert check_tableau(structure, problem) is None
    assert structure.individuals["a"] == structure.individuals["b"]


def test_unravel_inverse_blocking_case():
    result, problem = solved("blocking-with-inverse")
    structure = unravel_bounded(result.forest, problem, 8)
    assert check_tableau(structure, problem) is None


# ---------------------------------------------------------------------------
# structures from interpretations


def test_tableau_of_interpretation_passes_checks():
    for name in ("conjunction", "existential", "at-least-within-at-most"):
        problem = reduce_abox_consistency(parse_kb(CASES[name].kb))
        interp = find_model_bruteforce(problem, max_domain=4)
        assert interp is not None, name
        structure = tableau_of_interpretation(interp, problem)
        assert check_tableau(structure, problem) is None, name
