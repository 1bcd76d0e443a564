"""Witness structures derived from completion forests.

A tableau structure is a (possibly infinite, here always finite) labelled
graph; check_tableau verifies the closure conditions that make such a
structure a certificate of consistency.  Two constructions produce
structures from a finished forest: extract_model reads a finite
interpretation directly off a blocking-free forest, and unravel_bounded
unfolds an arbitrary clash-free forest into the prefix of the infinite
unravelling, following edges from blocked nodes up to their blockers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ExtractionError
from .forest import DIRECT, Forest, INDIRECT, UNBLOCKED
from .semantics import Interpretation
from .syntax import (
    All,
    Atom,
    AtLeast,
    AtMost,
    ConceptAssertion,
    Inequality,
    Not,
    Or,
    And,
    Role,
    RoleAssertion,
    Some,
    concept_atom_names,
    concept_key,
    neg_nnf,
    problem_closure,
    sexpr,
)


@dataclass
class TableauStructure:
    """Elements with concept labels and role edges.

    frontier marks elements whose outgoing witnesses were cut off by a
    depth bound; the existential conditions are not required there.
    """

    elements: tuple
    labels: dict
    edges: dict[Role, set]
    individuals: dict[str, object]
    frontier: frozenset = frozenset()


def check_tableau(structure: TableauStructure, problem) -> str | None:
    """First violated closure condition, or None when the structure is a
    valid witness for the problem."""
    rbox = problem.rbox
    roles = rbox.roles()
    edges = {role: structure.edges.get(role, set()) for role in roles}
    forward: dict[Role, dict] = {}
    for role in roles:
        table: dict = {}
        for a, b in edges[role]:
            table.setdefault(a, set()).add(b)
        forward[role] = table

    def successors(element, role: Role):
        return forward[role].get(element, frozenset())

    def label(element) -> frozenset:
        return structure.labels[element]

    for s in structure.elements:
        for c in sorted(label(s), key=concept_key):
            if Not(c) in label(s):
                return f"contradictory literals at {s}: {sexpr(c)}"
            if isinstance(c, Not) and not isinstance(c.operand, Atom):
                return f"label not in negation normal form at {s}: {sexpr(c)}"
            if isinstance(c, And):
                if c.left not in label(s) or c.right not in label(s):
                    return f"conjunction not expanded at {s}: {sexpr(c)}"
            elif isinstance(c, Or):
                if c.left not in label(s) and c.right not in label(s):
                    return f"disjunction not expanded at {s}: {sexpr(c)}"
            elif isinstance(c, All):
                for t in sorted(successors(s, c.role)):
                    if c.operand not in label(t):
                        return (
                            f"universal restriction violated at {s} -> {t}: "
                            f"{sexpr(c)}"
                        )
                for r in roles:
                    if not rbox.is_transitive(r) or not rbox.subsumes(r, c.role):
                        continue
                    pushed = All(r, c.operand)
                    for t in sorted(successors(s, r)):
                        if pushed not in label(t):
                            return (
                                f"transitive universal not propagated at {s} -> "
                                f"{t}: {sexpr(c)} via {r}"
                            )
            elif isinstance(c, Some):
                if s in structure.frontier:
                    continue
                if not any(c.operand in label(t) for t in successors(s, c.role)):
                    return f"existential unsatisfied at {s}: {sexpr(c)}"
            elif isinstance(c, AtLeast):
                if s not in structure.frontier:
                    count = sum(
                        1 for t in successors(s, c.role) if c.operand in label(t)
                    )
                    if count < c.count:
                        return f"at-least unsatisfied at {s}: {sexpr(c)}"
                negated = neg_nnf(c.operand)
                for t in sorted(successors(s, c.role)):
                    if c.operand not in label(t) and negated not in label(t):
                        return (
                            f"undecided qualifier at {s} -> {t}: {sexpr(c)}"
                        )
            elif isinstance(c, AtMost):
                count = sum(
                    1 for t in successors(s, c.role) if c.operand in label(t)
                )
                if count > c.count:
                    return f"at-most exceeded at {s}: {sexpr(c)}"
                negated = neg_nnf(c.operand)
                for t in sorted(successors(s, c.role)):
                    if c.operand not in label(t) and negated not in label(t):
                        return (
                            f"undecided qualifier at {s} -> {t}: {sexpr(c)}"
                        )
    for role in roles:
        mirror = edges[role.inverse()]
        for a, b in edges[role]:
            if (b, a) not in mirror:
                return f"inverse edges out of sync for {role}"
    for role in roles:
        for sup in rbox.superroles(role):
            if sup == role:
                continue
            if not edges[role] <= edges[sup]:
                return f"role hierarchy violated: {role} not within {sup}"
    for assertion in problem.abox:
        if isinstance(assertion, ConceptAssertion):
            element = structure.individuals[assertion.individual]
            if assertion.concept not in label(element):
                return (
                    f"asserted concept missing for {assertion.individual}: "
                    f"{sexpr(assertion.concept)}"
                )
        elif isinstance(assertion, RoleAssertion):
            a = structure.individuals[assertion.subject]
            b = structure.individuals[assertion.target]
            if (a, b) not in edges[assertion.role]:
                return (
                    f"asserted edge missing: {assertion.subject} "
                    f"{assertion.target} {assertion.role}"
                )
        elif isinstance(assertion, Inequality):
            a = structure.individuals[assertion.left]
            b = structure.individuals[assertion.right]
            if a == b:
                return (
                    f"distinct individuals identified: {assertion.left} "
                    f"{assertion.right}"
                )
    return None


# ---------------------------------------------------------------------------
# finite models from blocking-free forests


def _transitive_closure(pairs: set) -> set:
    closure = set(pairs)
    added = True
    while added:
        added = False
        for a, b in list(closure):
            for c, d in list(closure):
                if b == c and (a, d) not in closure:
                    closure.add((a, d))
                    added = True
    return closure


def extract_model(forest: Forest, problem) -> Interpretation:
    """Finite interpretation read off a complete clash-free forest in
    which no node is blocked.  Transitive roles are closed transitively;
    every role absorbs its subroles afterwards, most specific first."""
    statuses = forest.blocking()
    live = forest.live_ids()
    for x in live:
        if statuses[x].status != UNBLOCKED:
            raise ExtractionError(
                f"node {x} is blocked; the forest has no finite reading"
            )
    index = {nid: i for i, nid in enumerate(live)}
    rbox = problem.rbox
    roles = rbox.roles()
    base: dict[Role, set] = {role: set() for role in roles}
    for (x, y), roleset in forest.edges.items():
        if x not in index or y not in index:
            continue
        for r in roleset:
            for sup in rbox.superroles(r):
                base[sup].add((index[x], index[y]))
                base[sup.inverse()].add((index[y], index[x]))

    groups: dict[frozenset, list[Role]] = {}
    for role in roles:
        groups.setdefault(rbox.superroles(role), []).append(role)
    ordered = sorted(
        groups.items(),
        key=lambda item: (-len(item[0]), min((r.name, r.inverted) for r in item[1])),
    )
    values: dict[Role, set] = {}
    for supers, members in ordered:
        pairs: set = set()
        for member in members:
            pairs |= base[member]
        for member in members:
            for sub_role, sub_pairs in values.items():
                if rbox.subsumes(sub_role, member):
                    pairs |= sub_pairs
        if any(rbox.is_transitive(member) for member in members):
            pairs = _transitive_closure(pairs)
        for member in members:
            values[member] = pairs

    atom_names = sorted(
        {
            name
            for x in live
            for c in forest.nodes[x].label
            for name in concept_atom_names(c)
        }
    )
    atoms = {
        name: frozenset(
            index[x] for x in live if Atom(name) in forest.nodes[x].label
        )
        for name in atom_names
    }
    role_values = {
        name: frozenset(values[Role(name)]) for name in sorted(rbox.signature)
    }
    individuals = {
        a: index[forest.resolve_root(a)] for a in forest.individual_root
    }
    return Interpretation(
        domain=tuple(range(len(live))),
        atoms=atoms,
        roles=role_values,
        individuals=individuals,
    )


def tableau_of_interpretation(
    interp: Interpretation, problem
) -> TableauStructure:
    """View an interpretation as a tableau structure by labelling each
    element with the closure concepts it satisfies."""
    from .semantics import eval_concept

    closure = problem_closure(problem)
    labels = {
        d: frozenset(
            c for c in closure if d in eval_concept(interp, c)
        )
        for d in interp.domain
    }
    edges: dict[Role, set] = {}
    for role in problem.rbox.roles():
        edges[role] = set(interp.pairs_of(role))
    return TableauStructure(
        elements=tuple(interp.domain),
        labels=labels,
        edges=edges,
        individuals=dict(interp.individuals),
    )


# ---------------------------------------------------------------------------
# bounded unravelling of forests with blocked nodes


def unravel_bounded(forest: Forest, problem, depth: int) -> TableauStructure:
    """Prefix of the infinite unravelling of a clash-free forest.

    Elements are paths of (node, twin) pairs starting at live roots;
    stepping onto a directly blocked child records its blocker as the
    node and the blocked child as the twin, so labels continue from the
    blocker while edges are read off the twin.  Paths stop after the
    given number of steps and are reported as the frontier.
    """
    statuses = forest.blocking()
    rbox = problem.rbox

    def path_label(path):
        return frozenset(forest.nodes[path[-1][0]].label)

    roots = [
        x
        for x in forest.live_ids()
        if forest.nodes[x].is_root
    ]
    elements: list[tuple] = []
    labels: dict = {}
    edges: dict[Role, set] = {role: set() for role in rbox.roles()}

    def connect(source, target, roleset) -> None:
        for r in roleset:
            for sup in rbox.superroles(r):
                edges[sup].add((source, target))
                edges[sup.inverse()].add((target, source))

    queue: list[tuple] = []
    for r in roots:
        path = ((r, r),)
        elements.append(path)
        labels[path] = path_label(path)
        queue.append(path)

    frontier: set = set()
    qi = 0
    while qi < len(queue):
        path = queue[qi]
        qi += 1
        if len(path) - 1 >= depth:
            frontier.add(path)
            continue
        tail = path[-1][0]
        for z in forest.tree_children(tail):
            roleset = forest.edge_label(tail, z)
            if not roleset:
                continue
            info = statuses[z]
            if info.status == UNBLOCKED:
                child = path + ((z, z),)
            elif info.status == DIRECT:
                child = path + ((info.blocker, z),)
            else:
                continue
            elements.append(child)
            labels[child] = path_label(child)
            connect(path, child, roleset)
            queue.append(child)

    path_of_root = {path[0][0]: path for path in elements if len(path) == 1}
    for role in rbox.roles():
        for x in roots:
            for y in forest.s_neighbours(x, role):
                if forest.nodes[y].is_root and y in path_of_root:
                    edges[role].add((path_of_root[x], path_of_root[y]))

    individuals = {
        a: path_of_root[forest.resolve_root(a)]
        for a in forest.individual_root
    }
    return TableauStructure(
        elements=tuple(elements),
        labels=labels,
        edges=edges,
        individuals=individuals,
        frontier=frozenset(frontier),
    )
