"""Reading and writing knowledge bases in s-expression form.

A knowledge base file is a sequence of declarations::

    (transitive r)
    (subrole r s)
    (implies C D)
    (instance a C)
    (related a b R)
    (distinct a b)

Concepts are built from (and C D), (or C D), (not C), (some R C),
(all R C), (at-least n R C) and (at-most n R C); a role R is a plain
name or (inv r).  Comments run from a semicolon to the end of the line.
Names starting with $ are reserved for internal use and rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, ValidationError
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
    RESERVED_PREFIX,
    Role,
    RoleAssertion,
    RoleBox,
    Some,
    sexpr,
)


@dataclass(frozen=True)
class Form:
    """A parsed s-expression with its source position."""

    value: object  # str, int, or tuple[Form, ...]
    line: int
    col: int


_DELIMITERS = set("(); \t\r\n")


def _tokenize(text: str):
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield (ch, line, col)
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and text[i] not in _DELIMITERS:
                i += 1
                col += 1
            yield (text[start:i], line, start_col)


def _read_all(text: str) -> list[Form]:
    forms: list[Form] = []
    stack: list[tuple[list[Form], int, int]] = []
    current = forms
    for token, line, col in _tokenize(text):
        if token == "(":
            stack.append((current, line, col))
            current = []
        elif token == ")":
            if not stack:
                raise ParseError("unmatched closing parenthesis", line, col)
            finished = current
            current, open_line, open_col = stack.pop()
            current.append(Form(tuple(finished), open_line, open_col))
        else:
            value: object = token
            if re.fullmatch(r"-?\d+", token):
                value = int(token)
            current.append(Form(value, line, col))
    if stack:
        _, line, col = stack[-1]
        raise ParseError("unclosed parenthesis", line, col)
    return forms


def _expect_list(form: Form, what: str) -> tuple[Form, ...]:
    if not isinstance(form.value, tuple):
        raise ParseError(f"expected {what}, got {form.value!r}", form.line, form.col)
    return form.value


def _expect_name(form: Form, what: str) -> str:
    if not isinstance(form.value, str):
        raise ParseError(f"expected {what}, got {form.value!r}", form.line, form.col)
    if form.value.startswith(RESERVED_PREFIX):
        raise ValidationError(
            f"names starting with {RESERVED_PREFIX} are reserved: {form.value}",
            form.line,
            form.col,
        )
    return form.value


def _expect_count(form: Form) -> int:
    if not isinstance(form.value, int):
        raise ParseError(
            f"expected a number, got {form.value!r}", form.line, form.col
        )
    if form.value < 0:
        raise ValidationError(
            f"cardinalities must be non-negative, got {form.value}",
            form.line,
            form.col,
        )
    return form.value


def _arity(items: tuple[Form, ...], form: Form, head: str, count: int) -> None:
    if len(items) != count + 1:
        raise ParseError(
            f"{head} takes {count} argument{'s' if count != 1 else ''}, "
            f"got {len(items) - 1}",
            form.line,
            form.col,
        )


def parse_role(form: Form) -> Role:
    if isinstance(form.value, str):
        return Role(_expect_name(form, "a role name"))
    items = _expect_list(form, "a role")
    if not items or items[0].value != "inv":
        raise ParseError("expected a role name or (inv name)", form.line, form.col)
    _arity(items, form, "inv", 1)
    return Role(_expect_name(items[1], "a role name"), inverted=True)


def parse_concept(form: Form) -> Concept:
    if isinstance(form.value, str):
        return Atom(_expect_name(form, "a concept name"))
    items = _expect_list(form, "a concept")
    if not items or not isinstance(items[0].value, str):
        raise ParseError("expected a concept", form.line, form.col)
    head = items[0].value
    if head == "not":
        _arity(items, form, "not", 1)
        return Not(parse_concept(items[1]))
    if head in ("and", "or"):
        _arity(items, form, head, 2)
        ctor = And if head == "and" else Or
        return ctor(parse_concept(items[1]), parse_concept(items[2]))
    if head in ("some", "all"):
        _arity(items, form, head, 2)
        ctor = Some if head == "some" else All
        return ctor(parse_role(items[1]), parse_concept(items[2]))
    if head in ("at-least", "at-most"):
        _arity(items, form, head, 3)
        ctor = AtLeast if head == "at-least" else AtMost
        return ctor(
            _expect_count(items[1]), parse_role(items[2]), parse_concept(items[3])
        )
    raise ParseError(f"unknown concept operator {head}", form.line, form.col)


def parse_kb(text: str) -> KnowledgeBase:
    tbox: list[Gci] = []
    abox: list = []
    inclusions: set[tuple[Role, Role]] = set()
    transitive: set[str] = set()
    for form in _read_all(text):
        items = _expect_list(form, "a declaration")
        if not items or not isinstance(items[0].value, str):
            raise ParseError("expected a declaration", form.line, form.col)
        head = items[0].value
        if head == "transitive":
            _arity(items, form, "transitive", 1)
            transitive.add(_expect_name(items[1], "a role name"))
        elif head == "subrole":
            _arity(items, form, "subrole", 2)
            inclusions.add((parse_role(items[1]), parse_role(items[2])))
        elif head == "implies":
            _arity(items, form, "implies", 2)
            tbox.append(Gci(parse_concept(items[1]), parse_concept(items[2])))
        elif head == "instance":
            _arity(items, form, "instance", 2)
            abox.append(
                ConceptAssertion(
                    _expect_name(items[1], "an individual name"),
                    parse_concept(items[2]),
                )
            )
        elif head == "related":
            _arity(items, form, "related", 3)
            abox.append(
                RoleAssertion(
                    _expect_name(items[1], "an individual name"),
                    _expect_name(items[2], "an individual name"),
                    parse_role(items[3]),
                )
            )
        elif head == "distinct":
            _arity(items, form, "distinct", 2)
            abox.append(
                Inequality(
                    _expect_name(items[1], "an individual name"),
                    _expect_name(items[2], "an individual name"),
                )
            )
        else:
            raise ParseError(f"unknown declaration {head}", form.line, form.col)
    rbox = RoleBox(frozenset(inclusions), frozenset(transitive))
    return KnowledgeBase.assemble(tuple(tbox), rbox, tuple(abox))


def parse_concept_text(text: str) -> Concept:
    forms = _read_all(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one concept", 1, 1)
    return parse_concept(forms[0])


def kb_to_text(kb: KnowledgeBase) -> str:
    """Render a knowledge base; parsing the result reproduces it."""
    lines: list[str] = []
    for name in sorted(kb.rbox.transitive_names):
        lines.append(f"(transitive {name})")
    for sub, sup in sorted(
        kb.rbox.inclusions,
        key=lambda p: (p[0].name, p[0].inverted, p[1].name, p[1].inverted),
    ):
        lines.append(f"(subrole {sub} {sup})")
    for gci in kb.tbox:
        lines.append(f"(implies {sexpr(gci.sub)} {sexpr(gci.sup)})")
    for assertion in kb.abox:
        if isinstance(assertion, ConceptAssertion):
            lines.append(
                f"(instance {assertion.individual} {sexpr(assertion.concept)})"
            )
        elif isinstance(assertion, RoleAssertion):
            lines.append(
                f"(related {assertion.subject} {assertion.target} {assertion.role})"
            )
        elif isinstance(assertion, Inequality):
            lines.append(f"(distinct {assertion.left} {assertion.right})")
    return "\n".join(lines) + ("\n" if lines else "")
