"""Interpretations, concept evaluation and model checking.

An interpretation fixes a finite domain, an extension for every atomic
concept and role name, and an element for every individual.  Evaluation
is the standard set semantics; model checking reports the first violated
requirement as a string so tests and the CLI can show why a candidate
model fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SignatureError
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
    sexpr,
)


@dataclass(frozen=True)
class Interpretation:
    domain: tuple[int, ...]
    atoms: dict[str, frozenset[int]]
    roles: dict[str, frozenset[tuple[int, int]]]
    individuals: dict[str, int] = field(default_factory=dict)

    def pairs_of(self, role: Role) -> frozenset[tuple[int, int]]:
        if role.name not in self.roles:
            raise SignatureError(f"role {role.name} not interpreted")
        pairs = self.roles[role.name]
        if role.inverted:
            return frozenset((b, a) for a, b in pairs)
        return pairs

    def successors(self, element: int, role: Role) -> frozenset[int]:
        return frozenset(b for a, b in self.pairs_of(role) if a == element)


def eval_concept(interp: Interpretation, concept: Concept) -> frozenset[int]:
    """Extension of a concept, defined for arbitrary (not only NNF) input."""
    domain = frozenset(interp.domain)
    if isinstance(concept, Atom):
        if concept.name not in interp.atoms:
            raise SignatureError(f"atom {concept.name} not interpreted")
        return interp.atoms[concept.name]
    if isinstance(concept, Not):
        return domain - eval_concept(interp, concept.operand)
    if isinstance(concept, And):
        return eval_concept(interp, concept.left) & eval_concept(interp, concept.right)
    if isinstance(concept, Or):
        return eval_concept(interp, concept.left) | eval_concept(interp, concept.right)
    operand = eval_concept(interp, concept.operand)
    if isinstance(concept, Some):
        return frozenset(
            d for d in domain if interp.successors(d, concept.role) & operand
        )
    if isinstance(concept, All):
        return frozenset(
            d for d in domain if interp.successors(d, concept.role) <= operand
        )
    if isinstance(concept, AtLeast):
        return frozenset(
            d
            for d in domain
            if len(interp.successors(d, concept.role) & operand) >= concept.count
        )
    if isinstance(concept, AtMost):
        return frozenset(
            d
            for d in domain
            if len(interp.successors(d, concept.role) & operand) <= concept.count
        )
    raise TypeError(f"not a concept: {concept!r}")


def find_model_violation(interp: Interpretation, problem) -> str | None:
    """First requirement of the problem the interpretation breaks, or None.

    Accepts either a knowledge base or a reduced problem (anything with
    rbox and abox attributes, and optionally tbox).
    """
    rbox = problem.rbox
    for sub, sup in sorted(
        rbox.inclusions, key=lambda p: (p[0].name, p[0].inverted, p[1].name, p[1].inverted)
    ):
        if not interp.pairs_of(sub) <= interp.pairs_of(sup):
            return f"role inclusion violated: {sub} into {sup}"
    for name in sorted(rbox.transitive_names):
        pairs = interp.pairs_of(Role(name))
        for a, b in pairs:
            for c, d in pairs:
                if b == c and (a, d) not in pairs:
                    return f"transitivity violated: {name} misses ({a}, {d})"
    for gci in getattr(problem, "tbox", ()):
        holds = eval_concept(interp, Not(gci.sub)) | eval_concept(interp, gci.sup)
        for d in interp.domain:
            if d not in holds:
                return f"axiom violated at {d}: (implies {sexpr(gci.sub)} {sexpr(gci.sup)})"
    for assertion in problem.abox:
        if isinstance(assertion, ConceptAssertion):
            element = interp.individuals[assertion.individual]
            if element not in eval_concept(interp, assertion.concept):
                return (
                    f"assertion violated: (instance {assertion.individual} "
                    f"{sexpr(assertion.concept)})"
                )
        elif isinstance(assertion, RoleAssertion):
            a = interp.individuals[assertion.subject]
            b = interp.individuals[assertion.target]
            if (a, b) not in interp.pairs_of(assertion.role):
                return (
                    f"assertion violated: (related {assertion.subject} "
                    f"{assertion.target} {assertion.role})"
                )
        elif isinstance(assertion, Inequality):
            if interp.individuals[assertion.left] == interp.individuals[assertion.right]:
                return (
                    f"assertion violated: (distinct {assertion.left} "
                    f"{assertion.right})"
                )
    return None


def check_model(interp: Interpretation, problem) -> bool:
    return find_model_violation(interp, problem) is None


# ---------------------------------------------------------------------------
# plain-text serialization (one fact per line, deterministic order)


def format_interpretation(interp: Interpretation) -> str:
    index = {d: i for i, d in enumerate(sorted(interp.domain))}
    lines = [f"domain {len(interp.domain)}"]
    for name in sorted(interp.atoms):
        members = " ".join(str(index[d]) for d in sorted(interp.atoms[name]))
        lines.append(f"atom {name} {members}".rstrip())
    for name in sorted(interp.roles):
        if not interp.roles[name]:
            lines.append(f"role {name}")
        for a, b in sorted(interp.roles[name]):
            lines.append(f"role {name} {index[a]} {index[b]}")
    for ind in sorted(interp.individuals):
        lines.append(f"individual {ind} {index[interp.individuals[ind]]}")
    return "\n".join(lines) + "\n"


def parse_interpretation(text: str) -> Interpretation:
    domain: tuple[int, ...] | None = None
    atoms: dict[str, set[int]] = {}
    roles: dict[str, set[tuple[int, int]]] = {}
    individuals: dict[str, int] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        head = parts[0]
        if head == "domain":
            domain = tuple(range(int(parts[1])))
        elif head == "atom":
            atoms[parts[1]] = {int(p) for p in parts[2:]}
        elif head == "role":
            pairs = roles.setdefault(parts[1], set())
            if len(parts) > 2:
                pairs.add((int(parts[2]), int(parts[3])))
        elif head == "individual":
            individuals[parts[1]] = int(parts[2])
        else:
            raise ValueError(f"unknown interpretation line: {line}")
    if domain is None:
        raise ValueError("interpretation lacks a domain line")
    return Interpretation(
        domain=domain,
        atoms={k: frozenset(v) for k, v in atoms.items()},
        roles={k: frozenset(v) for k, v in roles.items()},
        individuals=individuals,
    )
