"""Core data model: roles, role hierarchies, concepts, knowledge bases.

Concept expressions are immutable trees compared structurally.  The
tableau machinery keeps node labels as plain sets of concepts, so
equality, hashing and a stable total order are the only operations the
model provides; no simplification or reordering is applied anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union

from .errors import SignatureError, ValidationError

RESERVED_PREFIX = "$"
# Reserved concept name used to encode an unsatisfiable corner: the
# complement of (at-least 0 R C) rewrites to ($bot and (not $bot)).
BOTTOM_ATOM = "$bot"
# Reserved role name used when folding the TBox into a single concept.
UNIVERSAL_ROLE = "$u"


# ---------------------------------------------------------------------------
# roles


@dataclass(frozen=True)
class Role:
    """A role name or its inverse.  Double inversion is unrepresentable."""

    name: str
    inverted: bool = False

    def inverse(self) -> Role:
        inv = self.__dict__.get("_inverse")
        if inv is None:
            inv = Role(self.name, not self.inverted)
            object.__setattr__(self, "_inverse", inv)
            object.__setattr__(inv, "_inverse", self)
        return inv

    def __str__(self) -> str:
        return f"(inv {self.name})" if self.inverted else self.name


def role_key(r: Role) -> tuple[str, bool]:
    return (r.name, r.inverted)


# ---------------------------------------------------------------------------
# concepts


class Concept:
    """Base class for concept expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Concept):
    name: str


@dataclass(frozen=True)
class Not(Concept):
    operand: Concept


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Some(Concept):
    role: Role
    operand: Concept


@dataclass(frozen=True)
class All(Concept):
    role: Role
    operand: Concept


@dataclass(frozen=True)
class AtLeast(Concept):
    count: int
    role: Role
    operand: Concept


@dataclass(frozen=True)
class AtMost(Concept):
    count: int
    role: Role
    operand: Concept


def _cache_hash(cls) -> None:
    """Replace the generated field-tuple hash with one that is computed
    once per instance.  Concepts are deep immutable trees living in many
    sets; recomputing their hash on every membership test dominates the
    engine's runtime otherwise."""
    generated = cls.__hash__

    def cached(self, _generated=generated):
        value = self.__dict__.get("_hash_value")
        if value is None:
            value = _generated(self)
            object.__setattr__(self, "_hash_value", value)
        return value

    cls.__hash__ = cached


for _cls in (Atom, Not, And, Or, Some, All, AtLeast, AtMost):
    _cache_hash(_cls)
del _cls


#: Structurally fixed contradiction, the rewrite of (not (at-least 0 R C)).
CONTRADICTION = And(Atom(BOTTOM_ATOM), Not(Atom(BOTTOM_ATOM)))
#: Structurally fixed tautology modulo the reserved atom staying empty;
#: used as the fold of an empty TBox.
TRIVIAL_TRUE = Not(Atom(BOTTOM_ATOM))

_KEY_CACHE: dict[Concept, tuple] = {}


def concept_key(c: Concept):
    """Total structural order on concepts, used wherever iteration order
    must not depend on hash seeds.  Keys are memoized; concepts are
    immutable and shared, so each tree is walked once."""
    key = _KEY_CACHE.get(c)
    if key is not None:
        return key
    if isinstance(c, Atom):
        key = (0, c.name)
    elif isinstance(c, Not):
        key = (1, concept_key(c.operand))
    elif isinstance(c, And):
        key = (2, concept_key(c.left), concept_key(c.right))
    elif isinstance(c, Or):
        key = (3, concept_key(c.left), concept_key(c.right))
    elif isinstance(c, Some):
        key = (4, role_key(c.role), concept_key(c.operand))
    elif isinstance(c, All):
        key = (5, role_key(c.role), concept_key(c.operand))
    elif isinstance(c, AtLeast):
        key = (6, c.count, role_key(c.role), concept_key(c.operand))
    elif isinstance(c, AtMost):
        key = (7, c.count, role_key(c.role), concept_key(c.operand))
    else:
        raise TypeError(f"not a concept: {c!r}")
    _KEY_CACHE[c] = key
    return key


def sexpr(c: Concept) -> str:
    """Render a concept in the surface syntax."""
    if isinstance(c, Atom):
        return c.name
    if isinstance(c, Not):
        return f"(not {sexpr(c.operand)})"
    if isinstance(c, And):
        return f"(and {sexpr(c.left)} {sexpr(c.right)})"
    if isinstance(c, Or):
        return f"(or {sexpr(c.left)} {sexpr(c.right)})"
    if isinstance(c, Some):
        return f"(some {c.role} {sexpr(c.operand)})"
    if isinstance(c, All):
        return f"(all {c.role} {sexpr(c.operand)})"
    if isinstance(c, AtLeast):
        return f"(at-least {c.count} {c.role} {sexpr(c.operand)})"
    if isinstance(c, AtMost):
        return f"(at-most {c.count} {c.role} {sexpr(c.operand)})"
    raise TypeError(f"not a concept: {c!r}")


def direct_subconcepts(c: Concept) -> tuple[Concept, ...]:
    if isinstance(c, Atom):
        return ()
    if isinstance(c, Not):
        return (c.operand,)
    if isinstance(c, (And, Or)):
        return (c.left, c.right)
    return (c.operand,)


def concept_role_names(c: Concept) -> set[str]:
    names: set[str] = set()
    stack = [c]
    while stack:
        cur = stack.pop()
        if isinstance(cur, (Some, All, AtLeast, AtMost)):
            names.add(cur.role.name)
        stack.extend(direct_subconcepts(cur))
    return names


def concept_atom_names(c: Concept) -> set[str]:
    names: set[str] = set()
    stack = [c]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Atom):
            names.add(cur.name)
        stack.extend(direct_subconcepts(cur))
    return names


# ---------------------------------------------------------------------------
# negation normal form


def nnf(c: Concept) -> Concept:
    """Push negation down to atoms.

    Number restrictions keep their operand unnegated; the complement of
    (at-least 0 ...) is the reserved contradiction since no cardinality
    can be below zero.
    """
    if isinstance(c, Atom):
        return c
    if isinstance(c, And):
        return And(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return Or(nnf(c.left), nnf(c.right))
    if isinstance(c, Some):
        return Some(c.role, nnf(c.operand))
    if isinstance(c, All):
        return All(c.role, nnf(c.operand))
    if isinstance(c, AtLeast):
        return AtLeast(c.count, c.role, nnf(c.operand))
    if isinstance(c, AtMost):
        return AtMost(c.count, c.role, nnf(c.operand))
    inner = c.operand
    if isinstance(inner, Atom):
        return c
    if isinstance(inner, Not):
        return nnf(inner.operand)
    if isinstance(inner, And):
        return Or(nnf(Not(inner.left)), nnf(Not(inner.right)))
    if isinstance(inner, Or):
        return And(nnf(Not(inner.left)), nnf(Not(inner.right)))
    if isinstance(inner, Some):
        return All(inner.role, nnf(Not(inner.operand)))
    if isinstance(inner, All):
        return Some(inner.role, nnf(Not(inner.operand)))
    if isinstance(inner, AtMost):
        return AtLeast(inner.count + 1, inner.role, nnf(inner.operand))
    if isinstance(inner, AtLeast):
        if inner.count == 0:
            return CONTRADICTION
        return AtMost(inner.count - 1, inner.role, nnf(inner.operand))
    raise TypeError(f"not a concept: {c!r}")


_NEG_NNF_CACHE: dict[Concept, Concept] = {}


def neg_nnf(c: Concept) -> Concept:
    """Complement of a concept already in negation normal form."""
    cached = _NEG_NNF_CACHE.get(c)
    if cached is None:
        cached = _NEG_NNF_CACHE[c] = _neg_nnf(c)
    return cached


def _neg_nnf(c: Concept) -> Concept:
    if isinstance(c, Atom):
        return Not(c)
    if isinstance(c, Not):
        return c.operand
    if isinstance(c, And):
        return Or(neg_nnf(c.left), neg_nnf(c.right))
    if isinstance(c, Or):
        return And(neg_nnf(c.left), neg_nnf(c.right))
    if isinstance(c, Some):
        return All(c.role, neg_nnf(c.operand))
    if isinstance(c, All):
        return Some(c.role, neg_nnf(c.operand))
    if isinstance(c, AtMost):
        return AtLeast(c.count + 1, c.role, c.operand)
    if isinstance(c, AtLeast):
        if c.count == 0:
            return CONTRADICTION
        return AtMost(c.count - 1, c.role, c.operand)
    raise TypeError(f"not a concept: {c!r}")


# ---------------------------------------------------------------------------
# role box


@dataclass(frozen=True)
class RoleBox:
    """Role hierarchy with transitivity flags.

    The role order used everywhere is the reflexive-transitive closure of
    the declared inclusions together with their inverted copies, so
    r below s implies (inv r) below (inv s).
    """

    inclusions: frozenset[tuple[Role, Role]] = frozenset()
    transitive_names: frozenset[str] = frozenset()
    extra_names: frozenset[str] = frozenset()

    @cached_property
    def signature(self) -> frozenset[str]:
        names = set(self.extra_names) | set(self.transitive_names)
        for sub, sup in self.inclusions:
            names.add(sub.name)
            names.add(sup.name)
        return frozenset(names)

    def roles(self) -> tuple[Role, ...]:
        """Both polarities of every signature name, in stable order."""
        out = []
        for name in sorted(self.signature):
            out.append(Role(name))
            out.append(Role(name, True))
        return tuple(out)

    @cached_property
    def _superroles(self) -> dict[Role, frozenset[Role]]:
        succ: dict[Role, set[Role]] = {r: {r} for r in self.roles()}
        for sub, sup in self.inclusions:
            succ[sub].add(sup)
            succ[sub.inverse()].add(sup.inverse())
        table: dict[Role, frozenset[Role]] = {}
        for start in succ:
            seen = {start}
            queue = [start]
            while queue:
                cur = queue.pop()
                for nxt in succ[cur]:
                    if nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
            table[start] = frozenset(seen)
        return table

    @cached_property
    def _subroles(self) -> dict[Role, frozenset[Role]]:
        table: dict[Role, set[Role]] = {r: set() for r in self.roles()}
        for sub, supers in self._superroles.items():
            for sup in supers:
                table[sup].add(sub)
        return {r: frozenset(subs) for r, subs in table.items()}

    @cached_property
    def _transitive_subroles(self) -> dict[Role, tuple[Role, ...]]:
        transitive = [r for r in self.roles() if r.name in self.transitive_names]
        return {
            s: tuple(r for r in transitive if s in self._superroles[r])
            for s in self.roles()
        }

    def _check(self, role: Role) -> None:
        if role.name not in self.signature:
            raise SignatureError(f"unknown role: {role}")

    def is_transitive(self, role: Role) -> bool:
        """True when the role or its inverse was declared transitive."""
        self._check(role)
        return role.name in self.transitive_names

    def subsumes(self, sub: Role, sup: Role) -> bool:
        """True when sub sits below sup in the role order (reflexively)."""
        self._check(sub)
        self._check(sup)
        return sup in self._superroles[sub]

    def superroles(self, role: Role) -> frozenset[Role]:
        self._check(role)
        return self._superroles[role]

    def subroles(self, role: Role) -> frozenset[Role]:
        self._check(role)
        return self._subroles[role]

    def transitive_subroles(self, role: Role) -> tuple[Role, ...]:
        """Transitive roles below the given one, in stable order."""
        self._check(role)
        return self._transitive_subroles[role]

    def is_simple(self, role: Role) -> bool:
        """True when no transitive role sits below the given one.

        Number restrictions are only admitted over simple roles.
        """
        self._check(role)
        return not any(
            self.is_transitive(p) for p in self.roles() if self.subsumes(p, role)
        )


# ---------------------------------------------------------------------------
# axioms, assertions, knowledge bases


@dataclass(frozen=True)
class Gci:
    """General concept inclusion: sub is subsumed by sup."""

    sub: Concept
    sup: Concept


@dataclass(frozen=True)
class ConceptAssertion:
    individual: str
    concept: Concept


@dataclass(frozen=True)
class RoleAssertion:
    subject: str
    target: str
    role: Role


@dataclass(frozen=True)
class Inequality:
    left: str
    right: str


Assertion = Union[ConceptAssertion, RoleAssertion, Inequality]


@dataclass(frozen=True)
class KnowledgeBase:
    tbox: tuple[Gci, ...]
    rbox: RoleBox
    abox: tuple[Assertion, ...]
    individuals: tuple[str, ...]

    @staticmethod
    def assemble(
        tbox: Iterable[Gci] = (),
        rbox: RoleBox | None = None,
        abox: Iterable[Assertion] = (),
    ) -> KnowledgeBase:
        """Build a knowledge base, registering every used role name in the
        role box signature and validating number restrictions."""
        tbox = tuple(tbox)
        abox = tuple(abox)
        rbox = rbox or RoleBox()
        used: set[str] = set()
        for gci in tbox:
            used |= concept_role_names(gci.sub)
            used |= concept_role_names(gci.sup)
        individuals: list[str] = []

        def note(name: str) -> None:
            if name not in individuals:
                individuals.append(name)

        for a in abox:
            if isinstance(a, ConceptAssertion):
                used |= concept_role_names(a.concept)
                note(a.individual)
            elif isinstance(a, RoleAssertion):
                used.add(a.role.name)
                note(a.subject)
                note(a.target)
            elif isinstance(a, Inequality):
                note(a.left)
                note(a.right)
            else:
                raise TypeError(f"not an assertion: {a!r}")
        if used - set(rbox.signature):
            rbox = RoleBox(
                rbox.inclusions,
                rbox.transitive_names,
                frozenset(rbox.extra_names | used),
            )
        kb = KnowledgeBase(tbox, rbox, abox, tuple(individuals))
        validate_number_restrictions(kb)
        return kb


def iter_kb_concepts(kb: KnowledgeBase) -> Iterator[Concept]:
    for gci in kb.tbox:
        yield gci.sub
        yield gci.sup
    for a in kb.abox:
        if isinstance(a, ConceptAssertion):
            yield a.concept


def validate_number_restrictions(kb: KnowledgeBase) -> None:
    """Reject number restrictions over non-simple roles."""
    for top in iter_kb_concepts(kb):
        stack = [top]
        while stack:
            c = stack.pop()
            if isinstance(c, (AtLeast, AtMost)) and not kb.rbox.is_simple(c.role):
                raise ValidationError(
                    f"number restriction over non-simple role {c.role}: {sexpr(c)}"
                )
            stack.extend(direct_subconcepts(c))


# ---------------------------------------------------------------------------
# syntactic closure


def concept_closure(seeds: Iterable[Concept], rbox: RoleBox) -> frozenset[Concept]:
    """Smallest set containing the seeds that is closed under subconcepts,
    NNF complement, and the value restrictions introduced by transitive
    propagation: All(R, C) for every member All(S, C) and every
    transitive R below S.

    Seeds must be in negation normal form.
    """
    transitive_roles = [r for r in rbox.roles() if r.name in rbox.transitive_names]
    seen: set[Concept] = set()
    todo = list(seeds)
    while todo:
        c = todo.pop()
        if c in seen:
            continue
        seen.add(c)
        todo.append(neg_nnf(c))
        todo.extend(direct_subconcepts(c))
        if isinstance(c, All):
            for r in transitive_roles:
                if rbox.subsumes(r, c.role):
                    todo.append(All(r, c.operand))
    return frozenset(seen)


def problem_closure(problem) -> frozenset[Concept]:
    """Closure of every concept asserted in a knowledge base or reduced
    problem (anything with .abox and .rbox)."""
    seeds = [
        a.concept for a in problem.abox if isinstance(a, ConceptAssertion)
    ]
    return concept_closure(seeds, problem.rbox)
