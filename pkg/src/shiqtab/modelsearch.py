"""Exhaustive small-model search, independent of the tableau engine.

Problems are compiled to CNF over atom and role membership variables and
solved with a small DPLL procedure.  Domain sizes are tried in ascending
order; for each size every canonical assignment of individuals to
elements (restricted growth strings, filtered by the declared
inequalities) is attempted.  Every model found is re-checked against the
problem semantics before being returned.
"""

from __future__ import annotations

from itertools import combinations

from .semantics import Interpretation, find_model_violation
from .syntax import (
    All,
    And,
    Atom,
    AtLeast,
    AtMost,
    Concept,
    ConceptAssertion,
    Inequality,
    Not,
    Or,
    Role,
    RoleAssertion,
    Some,
    concept_atom_names,
)

DEFAULT_MAX_DOMAIN = 4


def _problem_concepts(problem):
    for gci in getattr(problem, "tbox", ()):
        yield gci.sub
        yield gci.sup
    for assertion in problem.abox:
        if isinstance(assertion, ConceptAssertion):
            yield assertion.concept


def _atom_names(problem) -> list[str]:
    names: set[str] = set()
    for concept in _problem_concepts(problem):
        names |= concept_atom_names(concept)
    return sorted(names)


def _individual_maps(problem, size: int) -> list[dict[str, int]]:
    """Canonical maps from individuals to domain elements: the first
    individual lands on 0 and each later one on a used element or the
    next fresh one, so isomorphic assignments are generated once."""
    names = list(problem.individuals)
    neqs = [
        (a.left, a.right) for a in problem.abox if isinstance(a, Inequality)
    ]
    maps: list[dict[str, int]] = []

    def extend(i: int, current: list[int], used: int) -> None:
        if i == len(names):
            candidate = dict(zip(names, current))
            if all(candidate[a] != candidate[b] for a, b in neqs):
                maps.append(candidate)
            return
        for value in range(min(used, size - 1) + 1):
            extend(i + 1, current + [value], max(used, value + 1))

    extend(0, [], 0)
    return maps


class _Cnf:
    """Clause accumulator with fresh-variable allocation and small
    and/or gadgets over literals."""

    def __init__(self) -> None:
        self.clauses: list[tuple[int, ...]] = []
        self.count = 0
        self._true: int | None = None

    def fresh(self) -> int:
        self.count += 1
        return self.count

    def add(self, *literals: int) -> None:
        self.clauses.append(tuple(literals))

    def true_literal(self) -> int:
        if self._true is None:
            self._true = self.fresh()
            self.add(self._true)
        return self._true

    def conj(self, literals: list[int]) -> int:
        true = self.true_literal()
        parts = [l for l in literals if l != true]
        if any(l == -true for l in parts):
            return -true
        if not parts:
            return true
        if len(parts) == 1:
            return parts[0]
        out = self.fresh()
        for l in parts:
            self.add(-out, l)
        self.add(out, *(-l for l in parts))
        return out

    def disj(self, literals: list[int]) -> int:
        return -self.conj([-l for l in literals])


def _solve_cnf(clauses: list[tuple[int, ...]], count: int) -> list[bool] | None:
    """Chronological DPLL with unit propagation over occurrence lists.
    Returns a full assignment indexed by variable (slot 0 unused)."""
    occ_pos: list[list[int]] = [[] for _ in range(count + 1)]
    occ_neg: list[list[int]] = [[] for _ in range(count + 1)]
    for ci, clause in enumerate(clauses):
        for lit in clause:
            (occ_pos if lit > 0 else occ_neg)[abs(lit)].append(ci)
    assign = [0] * (count + 1)
    trail: list[int] = []

    def value(lit: int) -> int:
        v = assign[abs(lit)]
        return v if lit > 0 else -v

    def assign_lit(lit: int) -> None:
        assign[abs(lit)] = 1 if lit > 0 else -1
        trail.append(abs(lit))

    def propagate(queue: list[int]) -> bool:
        qi = 0
        while qi < len(queue):
            lit = queue[qi]
            qi += 1
            watchers = occ_neg[abs(lit)] if lit > 0 else occ_pos[abs(lit)]
            for ci in watchers:
                clause = clauses[ci]
                satisfied = False
                unassigned = 0
                free = 0
                for l in clause:
                    v = value(l)
                    if v > 0:
                        satisfied = True
                        break
                    if v == 0:
                        free += 1
                        unassigned = l
                if satisfied:
                    continue
                if free == 0:
                    return False
                if free == 1 and value(unassigned) == 0:
                    assign_lit(unassigned)
                    queue.append(unassigned)
        return True

    def undo_to(mark: int) -> None:
        while len(trail) > mark:
            assign[trail.pop()] = 0

    queue: list[int] = []
    for clause in clauses:
        if len(clause) == 1:
            lit = clause[0]
            v = value(lit)
            if v < 0:
                return None
            if v == 0:
                assign_lit(lit)
                queue.append(lit)
    if not propagate(queue):
        return None

    decisions: list[list] = []  # [trail mark, variable, flipped]
    pending: int | None = None
    while True:
        if pending is None:
            var = 1
            while var <= count and assign[var] != 0:
                var += 1
            if var > count:
                return [v > 0 for v in assign]
            decisions.append([len(trail), var, False])
            pending = -var
        assign_lit(pending)
        ok = propagate([pending])
        pending = None
        if not ok:
            while decisions:
                mark, var, flipped = decisions.pop()
                undo_to(mark)
                if not flipped:
                    decisions.append([mark, var, True])
                    pending = var
                    break
            else:
                return None


def _encode(problem, size: int, imap: dict[str, int]):
    rbox = problem.rbox
    atom_names = _atom_names(problem)
    role_names = sorted(rbox.signature)
    cnf = _Cnf()
    avar = {
        (name, d): cnf.fresh() for name in atom_names for d in range(size)
    }
    rvar = {
        (name, d, e): cnf.fresh()
        for name in role_names
        for d in range(size)
        for e in range(size)
    }

    def role_literal(role: Role, d: int, e: int) -> int:
        if role.inverted:
            return rvar[(role.name, e, d)]
        return rvar[(role.name, d, e)]

    memo: dict[tuple[Concept, int], int] = {}

    def encode(concept: Concept, d: int) -> int:
        key = (concept, d)
        if key in memo:
            return memo[key]
        if isinstance(concept, Atom):
            lit = avar[(concept.name, d)]
        elif isinstance(concept, Not):
            lit = -encode(concept.operand, d)
        elif isinstance(concept, And):
            lit = cnf.conj([encode(concept.left, d), encode(concept.right, d)])
        elif isinstance(concept, Or):
            lit = cnf.disj([encode(concept.left, d), encode(concept.right, d)])
        elif isinstance(concept, Some):
            lit = cnf.disj(
                [
                    cnf.conj([role_literal(concept.role, d, e), encode(concept.operand, e)])
                    for e in range(size)
                ]
            )
        elif isinstance(concept, All):
            lit = cnf.conj(
                [
                    cnf.disj([-role_literal(concept.role, d, e), encode(concept.operand, e)])
                    for e in range(size)
                ]
            )
        elif isinstance(concept, AtLeast):
            members = [
                cnf.conj([role_literal(concept.role, d, e), encode(concept.operand, e)])
                for e in range(size)
            ]
            if concept.count == 0:
                lit = cnf.true_literal()
            elif concept.count > size:
                lit = -cnf.true_literal()
            else:
                lit = cnf.disj(
                    [
                        cnf.conj([members[e] for e in chosen])
                        for chosen in combinations(range(size), concept.count)
                    ]
                )
        elif isinstance(concept, AtMost):
            if concept.count >= size:
                lit = cnf.true_literal()
            else:
                members = [
                    cnf.conj([role_literal(concept.role, d, e), encode(concept.operand, e)])
                    for e in range(size)
                ]
                lit = cnf.conj(
                    [
                        -cnf.conj([members[e] for e in chosen])
                        for chosen in combinations(range(size), concept.count + 1)
                    ]
                )
        else:
            raise TypeError(f"not a concept: {concept!r}")
        memo[key] = lit
        return lit

    for sub, sup in sorted(
        rbox.inclusions,
        key=lambda p: (p[0].name, p[0].inverted, p[1].name, p[1].inverted),
    ):
        for d in range(size):
            for e in range(size):
                cnf.add(-role_literal(sub, d, e), role_literal(sup, d, e))
    for name in sorted(rbox.transitive_names):
        for d in range(size):
            for e in range(size):
                for g in range(size):
                    cnf.add(
                        -rvar[(name, d, e)],
                        -rvar[(name, e, g)],
                        rvar[(name, d, g)],
                    )
    for gci in getattr(problem, "tbox", ()):
        for d in range(size):
            cnf.add(cnf.disj([-encode(gci.sub, d), encode(gci.sup, d)]))
    for assertion in problem.abox:
        if isinstance(assertion, ConceptAssertion):
            cnf.add(encode(assertion.concept, imap[assertion.individual]))
        elif isinstance(assertion, RoleAssertion):
            cnf.add(
                role_literal(
                    assertion.role, imap[assertion.subject], imap[assertion.target]
                )
            )
    return cnf, avar, rvar, atom_names, role_names


def find_model_bruteforce(
    problem, max_domain: int = DEFAULT_MAX_DOMAIN
) -> Interpretation | None:
    """Smallest model with at most max_domain elements, or None."""
    for size in range(1, max_domain + 1):
        for imap in _individual_maps(problem, size):
            cnf, avar, rvar, atom_names, role_names = _encode(problem, size, imap)
            model = _solve_cnf(cnf.clauses, cnf.count)
            if model is None:
                continue
            interp = Interpretation(
                domain=tuple(range(size)),
                atoms={
                    name: frozenset(
                        d for d in range(size) if model[avar[(name, d)]]
                    )
                    for name in atom_names
                },
                roles={
                    name: frozenset(
                        (d, e)
                        for d in range(size)
                        for e in range(size)
                        if model[rvar[(name, d, e)]]
                    )
                    for name in role_names
                },
                individuals=dict(imap),
            )
            violation = find_model_violation(interp, problem)
            if violation is not None:
                raise AssertionError(
                    f"model search produced a non-model: {violation}"
                )
            return interp
    return None
