"""Expansion rules and the backtracking search over completion forests.

Rule selection is deterministic: rules are tried in a fixed priority
order (merges first, generating rules last), then by node id, then by a
structural order on concepts.  Branching rules (disjunction, choose, and
the merge-pair selection of the two at-most rules) push a choice point
holding a rewind handle into the forest's mutation log; the search is
chronological depth-first over those choice points, restoring state
exactly on backtrack.  A seed, when given, shuffles the order in which a
branch's alternatives are tried; it never changes which rule fires.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from heapq import heappop

from . import forest as _forest
from .errors import EngineLimitError
from .forest import Forest, INDIRECT, RULE_ORDER, UNBLOCKED, initial_forest
from .reduction import ReducedProblem
from .syntax import (
    All,
    And,
    AtLeast,
    AtMost,
    Concept,
    Or,
    Some,
    neg_nnf,
    problem_closure,
    role_key,
    sexpr,
)

DEFAULT_MAX_NODES = 50_000

_LAST_RULE = len(RULE_ORDER) - 1


@dataclass(frozen=True)
class Limits:
    """Structural bounds asserted while the forest grows.

    Exceeding one raises EngineLimitError; it is never turned into a
    verdict.  m counts the closure, n the signature roles with their
    inverses, n_max the largest at-least cardinality (at least 1 so the
    exists rule keeps room to fire).  max_nodes caps the number of nodes
    the forest holds at any one time.
    """

    m: int
    n: int
    n_max: int
    max_path_length: int
    max_out_degree: int
    max_nodes: int


def limits_for(
    problem: ReducedProblem,
    closure: frozenset[Concept],
    max_nodes: int = DEFAULT_MAX_NODES,
) -> Limits:
    m = len(closure)
    n = 2 * len(problem.rbox.signature)
    n_max = max(
        (c.count for c in closure if isinstance(c, AtLeast)), default=1
    )
    n_max = max(n_max, 1)
    return Limits(
        m=m,
        n=n,
        n_max=n_max,
        max_path_length=2 ** (2 * m * n),
        max_out_degree=m * n_max * n,
        max_nodes=max_nodes,
    )


@dataclass(frozen=True)
class RuleApplication:
    """One applicable rule instance.

    alternatives holds every way the instance may fire; deterministic
    rules carry exactly one entry, branching rules several.
    """

    rule: str
    node: int
    concept: Concept
    alternatives: tuple[tuple, ...]


@dataclass(frozen=True)
class TraceRecord:
    step: int
    rule: str
    node: int
    concept: Concept
    depth: int

    def format(self) -> str:
        return (
            f"step={self.step} rule={self.rule} node={self.node} "
            f"concept={sexpr(self.concept)} depth={self.depth}"
        )


@dataclass
class SolveResult:
    consistent: bool
    forest: Forest
    steps: int
    nodes_created: int
    backtracks: int
    max_depth: int
    max_out_degree: int
    limits: Limits
    trace: list[TraceRecord] | None = None


# ---------------------------------------------------------------------------
# rule selection


class _StatusView:
    """Mapping facade over Forest.status_of, so finders compute blocking
    statuses only for the nodes they actually visit."""

    __slots__ = ("f",)

    def __init__(self, f: Forest):
        self.f = f

    def __getitem__(self, x: int):
        return self.f.status_of(x)


def find_rule(f: Forest, closure: frozenset[Concept]) -> RuleApplication | None:
    """Highest-priority applicable rule instance, or None when the forest
    is complete.

    The forest's agenda holds every instance a mutation may have switched
    on, keyed by (rule priority, node).  Entries are revalidated when they
    reach the front: stale ones are discarded (a wild entry decays to the
    next rule first), and the first live one is the same instance a full
    priority scan would select.  A hit stays queued so the instance is
    re-examined after it fires."""
    heap = f._agenda
    pending = f._pending
    nodes = f.nodes
    statuses = _StatusView(f)
    app = None
    while heap:
        key = heap[0]
        k, x, wild = key
        if x in nodes:
            app = _RULE_AT[k](f, closure, statuses, x)
            if app is not None:
                break
        heappop(heap)
        pending.discard(key)
        if wild and k < _LAST_RULE:
            f._push(k + 1, x, True)
    if _forest.CROSSCHECK:
        _crosscheck_find(f, closure, app)
    return app


def _crosscheck_find(
    f: Forest, closure: frozenset[Concept], app: RuleApplication | None
) -> None:
    fresh = f._blocking_fresh()
    cached = {x: f.status_of(x) for x in f.node_ids()}
    assert cached == fresh, {
        x: (cached[x], fresh[x]) for x in fresh if cached[x] != fresh[x]
    }
    naive = None
    ids = f.node_ids()
    for rule in RULE_ORDER:
        naive = _FINDERS[rule](f, closure, fresh, ids)
        if naive is not None:
            break
    assert naive == app, (naive, app)


def _members(f, x, role, c):
    return [y for y in f.s_neighbours(x, role) if c in f.nodes[y].label]


def _le_root_at(f, closure, statuses, x):
    # No blocking guard: only root nodes qualify and roots never block.
    for c in f.label_of_kind(x, AtMost):
        members = _members(f, x, c.role, c.operand)
        if len(members) <= c.count:
            continue
        pairs = [
            ("merge_root", y, z)
            for y in members
            for z in members
            if y != z
            and f.nodes[y].is_root
            and f.nodes[z].is_root
            and not f.has_neq(y, z)
        ]
        if pairs:
            return RuleApplication("le_root", x, c, tuple(pairs))
    return None


def _le_at(f, closure, statuses, x):
    if statuses[x].status == INDIRECT:
        return None
    for c in f.label_of_kind(x, AtMost):
        members = _members(f, x, c.role, c.operand)
        if len(members) <= c.count:
            continue
        pairs = [
            ("merge_le", y, z)
            for y in members
            for z in members
            if y != z
            and not f.nodes[y].is_root
            and not f.has_neq(y, z)
            and not f.is_ancestor(y, z)
        ]
        if pairs:
            return RuleApplication("le", x, c, tuple(pairs))
    return None


def _and_at(f, closure, statuses, x):
    if statuses[x].status == INDIRECT:
        return None
    label = f.nodes[x].label
    for c in f.label_of_kind(x, And):
        if c.left not in label or c.right not in label:
            return RuleApplication("and", x, c, (("and",),))
    return None


def _all_at(f, closure, statuses, x):
    if statuses[x].status == INDIRECT:
        return None
    for c in f.label_of_kind(x, All):
        for y in f.s_neighbours(x, c.role):
            if c.operand not in f.nodes[y].label:
                return RuleApplication("all", x, c, (("label", y, c.operand),))
    return None


def _all_trans_at(f, closure, statuses, x):
    if statuses[x].status == INDIRECT:
        return None
    rbox = f.rbox
    for c in f.label_of_kind(x, All):
        for r in rbox.transitive_subroles(c.role):
            pushed = All(r, c.operand)
            for y in f.s_neighbours(x, r):
                if pushed not in f.nodes[y].label:
                    return RuleApplication(
                        "all_trans", x, c, (("label", y, pushed),)
                    )
    return None


def _choose_at(f, closure, statuses, x):
    if statuses[x].status == INDIRECT:
        return None
    for c in f.label_of_kind(x, AtLeast) + f.label_of_kind(x, AtMost):
        negated = neg_nnf(c.operand)
        for y in f.s_neighbours(x, c.role):
            label = f.nodes[y].label
            if c.operand not in label and negated not in label:
                return RuleApplication(
                    "choose",
                    x,
                    c,
                    (("label", y, c.operand), ("label", y, negated)),
                )
    return None


def _or_at(f, closure, statuses, x):
    if statuses[x].status == INDIRECT:
        return None
    label = f.nodes[x].label
    for c in f.label_of_kind(x, Or):
        if c.left in label or c.right in label:
            continue
        if c.left == c.right:
            alts = (("label", x, c.left),)
        else:
            alts = (("label", x, c.left), ("label", x, c.right))
        return RuleApplication("or", x, c, alts)
    return None


def _ge_at(f, closure, statuses, x):
    if statuses[x].status != UNBLOCKED:
        return None
    for c in f.label_of_kind(x, AtLeast):
        members = _members(f, x, c.role, c.operand)
        if not f.has_pairwise_distinct(members, c.count):
            return RuleApplication("ge", x, c, (("ge",),))
    return None


def _some_at(f, closure, statuses, x):
    if statuses[x].status != UNBLOCKED:
        return None
    for c in f.label_of_kind(x, Some):
        if not _members(f, x, c.role, c.operand):
            return RuleApplication("some", x, c, (("some",),))
    return None


#: Per-node rule validators, indexed like RULE_ORDER.
_RULE_AT = (
    _le_root_at,
    _le_at,
    _and_at,
    _all_at,
    _all_trans_at,
    _choose_at,
    _or_at,
    _ge_at,
    _some_at,
)


def _scanner(body):
    def scan_rule(f, closure, statuses, scan):
        for x in scan:
            app = body(f, closure, statuses, x)
            if app is not None:
                return app
        return None

    return scan_rule


#: Full-scan variants of the rules, used by the cross-check harness.
_FINDERS = {name: _scanner(body) for name, body in zip(RULE_ORDER, _RULE_AT)}


# ---------------------------------------------------------------------------
# rule application


def _check_creation(f: Forest, parent: int, created: int, limits: Limits, stats: dict):
    depth = f.nodes[parent].depth + 1
    stats["max_depth"] = max(stats["max_depth"], depth)
    if depth > limits.max_path_length:
        raise EngineLimitError(
            f"path length {depth} exceeds bound {limits.max_path_length}"
        )
    degree = len(f.tree_children(parent))
    stats["max_out_degree"] = max(stats["max_out_degree"], degree)
    if degree > limits.max_out_degree:
        raise EngineLimitError(
            f"out-degree {degree} exceeds bound {limits.max_out_degree}"
        )
    stats["nodes_created"] += created
    if len(f.nodes) > limits.max_nodes:
        raise EngineLimitError(
            f"node budget {limits.max_nodes} exceeded"
        )


def _merge_le(f: Forest, x: int, y: int, z: int) -> None:
    """Identify tree node y with neighbour z of the constrained node x:
    z absorbs y's label and inequalities, y's connecting edge is emptied
    (cutting its subtree off), and the roles move to the surviving edge,
    inverted when that edge points into x."""
    for c in f.sorted_label(y):
        f.add_label(z, c)
    exy = f.edges[(x, y)]
    if f.edges.get((z, x)):
        f.add_edge_roles(z, x, sorted((r.inverse() for r in exy), key=role_key))
    else:
        f.add_edge_roles(x, z, sorted(exy, key=role_key))
    f.clear_edge_label(x, y)
    for u in sorted(f.neq_partners(y)):
        f.set_neq(u, z)


def _merge_root(f: Forest, y: int, z: int) -> None:
    """Identify root y with root z: z absorbs y's label, edges and
    inequalities; y stays behind, empty, resolvable through the merge
    map."""
    for c in f.sorted_label(y):
        f.add_label(z, c)
    for w in sorted(f.succ[y]):
        lab = f.drop_edge(y, w)
        target = z if w == y else w
        f.add_edge_roles(z, target, sorted(lab, key=role_key))
        wnode = f.nodes[target]
        if target != z and not wnode.is_root and wnode.parent == y:
            f.set_parent(target, z)
    for w in sorted(f.pred[y]):
        if (w, y) not in f.edges:
            continue
        lab = f.drop_edge(w, y)
        f.add_edge_roles(w, z, sorted(lab, key=role_key))
    f.clear_label(y)
    for u in sorted(f.neq_partners(y)):
        f.set_neq(u, z)
    f.note_merge(y, z)


def apply_alternative(
    f: Forest,
    app: RuleApplication,
    alt: tuple,
    limits: Limits,
    stats: dict,
    closure: frozenset[Concept],
) -> None:
    kind = alt[0]
    if kind == "label":
        _, node, concept = alt
        assert concept in closure, f"label escaped closure: {sexpr(concept)}"
        f.add_label(node, concept)
    elif kind == "and":
        c = app.concept
        assert c.left in closure and c.right in closure
        f.add_label(app.node, c.left)
        f.add_label(app.node, c.right)
    elif kind == "some":
        c = app.concept
        y = f.new_node(is_root=False, parent=app.node)
        f.add_edge_roles(app.node, y, (c.role,))
        f.add_label(y, c.operand)
        _check_creation(f, app.node, 1, limits, stats)
    elif kind == "ge":
        c = app.concept
        created = []
        for _ in range(c.count):
            y = f.new_node(is_root=False, parent=app.node)
            f.add_edge_roles(app.node, y, (c.role,))
            f.add_label(y, c.operand)
            created.append(y)
        for i, a in enumerate(created):
            for b in created[i + 1 :]:
                f.set_neq(a, b)
        _check_creation(f, app.node, c.count, limits, stats)
    elif kind == "merge_le":
        _merge_le(f, app.node, alt[1], alt[2])
    elif kind == "merge_root":
        _merge_root(f, alt[1], alt[2])
    else:
        raise ValueError(f"unknown alternative {alt!r}")


# ---------------------------------------------------------------------------
# search


def solve(
    problem: ReducedProblem,
    *,
    limits: Limits | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
    seed: int | None = None,
    collect_trace: bool = False,
) -> SolveResult:
    """Decide consistency of a reduced problem.

    Returns a complete, clash-free forest on success; on failure the last
    explored forest is kept for diagnostics.  Budget exhaustion raises
    EngineLimitError instead of answering.
    """
    closure = problem_closure(problem)
    if limits is None:
        limits = limits_for(problem, closure, max_nodes)
    rng = random.Random(seed) if seed is not None else None
    f = initial_forest(problem)
    stats = {
        "nodes_created": len(f.nodes),
        "max_depth": 0,
        "max_out_degree": 0,
        "backtracks": 0,
    }
    if len(f.nodes) > limits.max_nodes:
        raise EngineLimitError(
            f"node budget {limits.max_nodes} exceeded by the initial forest"
        )
    f.start_trail()
    trace: list[TraceRecord] | None = [] if collect_trace else None
    # Each entry: [rewind mark, application, alternatives, next index].
    stack: list[list] = []
    step = 0

    def record(app: RuleApplication) -> None:
        if trace is not None:
            trace.append(TraceRecord(step, app.rule, app.node, app.concept, len(stack)))

    def result(consistent: bool) -> SolveResult:
        return SolveResult(
            consistent=consistent,
            forest=f,
            steps=step,
            nodes_created=stats["nodes_created"],
            backtracks=stats["backtracks"],
            max_depth=stats["max_depth"],
            max_out_degree=stats["max_out_degree"],
            limits=limits,
            trace=trace,
        )

    while True:
        if f.find_clash() is None:
            app = find_rule(f, closure)
            if app is None:
                return result(True)
            alts = app.alternatives
            if rng is not None and len(alts) > 1:
                shuffled = list(alts)
                rng.shuffle(shuffled)
                alts = tuple(shuffled)
            if len(alts) > 1:
                stack.append([f.trail_mark(), app, alts, 1])
            step += 1
            apply_alternative(f, app, alts[0], limits, stats, closure)
            record(app)
        else:
            while stack:
                mark, app, alts, idx = stack[-1]
                if idx < len(alts):
                    stack[-1][3] = idx + 1
                    f.undo_to(mark)
                    stats["backtracks"] += 1
                    step += 1
                    apply_alternative(f, app, alts[idx], limits, stats, closure)
                    record(app)
                    break
                stack.pop()
            else:
                return result(False)
