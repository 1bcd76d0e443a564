"""Completion forests: labelled nodes and edges, inequalities, merges.

A forest is a set of root nodes, arbitrarily interconnected by directed
labelled edges, with a labelled tree hanging below each root.  Edge
labels hold roles; a neighbour relation derived through the role order
drives all rule guards.

Structures are mutable.  All mutation goes through logging methods so
the search can rewind to an earlier state: `trail_mark` hands out a
snapshot handle and `undo_to` restores the forest exactly.  Label reads
used by rule selection are memoized per node under a version counter
that every mutation (including undo) advances, so stale views are
impossible.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heappush
from itertools import combinations

from .errors import SignatureError
from .reduction import ReducedProblem
from .syntax import (
    All,
    And,
    AtLeast,
    AtMost,
    Concept,
    ConceptAssertion,
    Inequality,
    Not,
    Or,
    Role,
    RoleAssertion,
    RoleBox,
    Some,
    concept_key,
    sexpr,
)

UNBLOCKED = "unblocked"
DIRECT = "direct"
INDIRECT = "indirect"

#: Priority order of the expansion rules.  The forest keeps an agenda of
#: pending (rule, node) instances keyed by this order; mutators push the
#: instances they may have switched on, and rule selection pops and
#: revalidates them, which reproduces a full priority scan exactly.
RULE_ORDER = (
    "le_root",
    "le",
    "and",
    "all",
    "all_trans",
    "choose",
    "or",
    "ge",
    "some",
)

_LE_ROOT_IDX = 0
_LE_IDX = 1
_LAST_RULE_IDX = len(RULE_ORDER) - 1

#: Debug switch: when set, every incremental query (clash scan, blocking,
#: rule selection) is recomputed from scratch alongside and asserted equal.
CROSSCHECK = False

#: Concept constructors bucketed by `label_of_kind`; atoms are never
#: iterated by kind, only membership-tested.
_BUCKET_KINDS = (Not, And, Or, Some, All, AtLeast, AtMost)


@dataclass
class Node:
    id: int
    is_root: bool
    parent: int | None
    depth: int
    label: set[Concept]

    def copy(self) -> Node:
        return Node(self.id, self.is_root, self.parent, self.depth, set(self.label))


@dataclass(frozen=True)
class BlockInfo:
    status: str
    blocker: int | None = None


_ROOT_STATUS = BlockInfo(UNBLOCKED)
_UNBLOCKED_STATUS = BlockInfo(UNBLOCKED)
_INDIRECT_STATUS = BlockInfo(INDIRECT)


@dataclass(frozen=True)
class Clash:
    kind: str  # "contradiction" | "atoms" | "at-most"
    node: int
    detail: str


class Forest:
    def __init__(self, rbox: RoleBox):
        self.rbox = rbox
        self.nodes: dict[int, Node] = {}
        self.edges: dict[tuple[int, int], set[Role]] = {}
        self.succ: dict[int, set[int]] = {}
        self.pred: dict[int, set[int]] = {}
        self.neq: set[frozenset[int]] = set()
        self.merged: dict[int, int] = {}  # emptied root -> survivor
        self.individual_root: dict[str, int] = {}
        self.unsat_marker: str | None = None
        self._next = 0
        self._trail: list[tuple] | None = None
        # Label views are memoized against this per-node version, bumped
        # on every label mutation in either direction.
        self._ver = 0
        self._label_ver: dict[int, int] = {}
        self._label_order: dict[int, tuple[int, tuple]] = {}
        self._label_kinds: dict[int, tuple[int, dict]] = {}
        # Neighbour queries are memoized against this edge-set version,
        # bumped on every edge mutation in either direction.
        self._ever = 0
        self._neigh: dict[tuple[int, Role], tuple[int, list[int]]] = {}
        # Blocking statuses are cached per node; a mutation invalidates the
        # subtree whose statuses depend on it (a status is a function of
        # the labels and edge labels on the node's root path alone).
        self._bstat: dict[int, BlockInfo] = {}
        # Nodes whose clash condition may have changed since the last
        # clash-free scan; neighbours are re-derived at scan time.
        self._clash_dirty: set[int] = set()
        # Agenda of possibly-applicable rule instances, a min-heap of
        # (rule index, node, wild) consumed by the engine.  A wild entry
        # stands for every rule from its index up at that node and decays
        # one index at a time as rules are validated inapplicable.  The
        # heap is conservative (entries are revalidated when popped) and
        # is never rewound: undo pushes fresh entries for what it touches.
        self._agenda: list[tuple[int, int, bool]] = []
        self._pending: set[tuple[int, int, bool]] = set()
        # Nodes whose label currently holds an at-most restriction; the
        # two counting rules can only ever apply at these.
        self._atmost_holders: set[int] = set()

    def copy(self) -> Forest:
        f = Forest(self.rbox)
        f.nodes = {i: n.copy() for i, n in self.nodes.items()}
        f.edges = {k: set(v) for k, v in self.edges.items()}
        f.succ = {k: set(v) for k, v in self.succ.items()}
        f.pred = {k: set(v) for k, v in self.pred.items()}
        f.neq = set(self.neq)
        f.merged = dict(self.merged)
        f.individual_root = dict(self.individual_root)
        f.unsat_marker = self.unsat_marker
        f._next = self._next
        f._ver = self._ver
        f._label_ver = dict(self._label_ver)
        f._label_order = dict(self._label_order)
        f._label_kinds = dict(self._label_kinds)
        f._ever = self._ever
        f._neigh = dict(self._neigh)
        f._bstat = dict(self._bstat)
        f._clash_dirty = set(self._clash_dirty)
        f._atmost_holders = set(self._atmost_holders)
        for x in f.nodes:
            f._push(0, x, True)
        return f

    # -- rewind log -----------------------------------------------------------

    def start_trail(self) -> None:
        self._trail = []

    def trail_mark(self) -> int:
        assert self._trail is not None, "trail not started"
        return len(self._trail)

    def undo_to(self, mark: int) -> None:
        """Rewind every mutation logged after the mark, restoring the
        forest state exactly.  The agenda is not rewound; each reversal
        pushes entries for whatever it may have switched back on, so the
        heap stays a superset of the applicable instances."""
        trail = self._trail
        while len(trail) > mark:
            op = trail.pop()
            kind = op[0]
            if kind == "label":
                _, x, c = op
                label = self.nodes[x].label
                label.discard(c)
                if type(c) is AtMost and not any(
                    type(d) is AtMost for d in label
                ):
                    self._atmost_holders.discard(x)
                self._touch(x)
                self._clash_dirty.add(x)
                self._binval(x)
                self._event_subtree(x)
                self._push_wild_at_neighbours(x)
            elif kind == "role":
                _, x, y, r = op
                lab = self.edges[(x, y)]
                lab.discard(r)
                self._ever += 1
                self._clash_dirty.add(x)
                self._clash_dirty.add(y)
                self._binval(y)
                self._push(0, x, True)
                self._event_subtree(y)
                if not lab:
                    self._push_le_at_atmost_holders()
            elif kind == "edge":
                # Roles were logged after the edge, so by now the label
                # is empty and no path can run through it.
                _, x, y = op
                del self.edges[(x, y)]
                self.succ[x].discard(y)
                self.pred[y].discard(x)
                self._ever += 1
                self._clash_dirty.add(x)
                self._clash_dirty.add(y)
                self._binval(y)
                self._push(0, x, True)
                self._event_subtree(y)
            elif kind == "unedge":
                _, x, y, roles = op
                self.edges[(x, y)] = set(roles)
                self.succ[x].add(y)
                self.pred[y].add(x)
                self._ever += 1
                self._clash_dirty.add(x)
                self._clash_dirty.add(y)
                self._binval(y)
                self._push(0, x, True)
                self._event_subtree(y)
            elif kind == "unroles":
                _, x, y, roles = op
                self.edges[(x, y)] |= roles
                self._ever += 1
                self._clash_dirty.add(x)
                self._clash_dirty.add(y)
                self._binval(y)
                self._push(0, x, True)
                self._event_subtree(y)
            elif kind == "node":
                nid = op[1]
                del self.nodes[nid]
                del self.succ[nid]
                del self.pred[nid]
                self._label_ver.pop(nid, None)
                self._label_order.pop(nid, None)
                self._label_kinds.pop(nid, None)
                self._bstat.pop(nid, None)
                self._clash_dirty.discard(nid)
                self._atmost_holders.discard(nid)
                self._next = nid
            elif kind == "neq":
                pair = op[1]
                self.neq.discard(pair)
                self._clash_dirty.update(pair)
                for a in pair:
                    self._push(0, a, True)
                    self._push_wild_at_neighbours(a)
            elif kind == "unclear":
                _, x, old = op
                self.nodes[x].label |= old
                if any(type(d) is AtMost for d in old):
                    self._atmost_holders.add(x)
                self._touch(x)
                self._clash_dirty.add(x)
                self._binval(x)
                self._event_subtree(x)
                self._push_le_at_neighbours(x)
            elif kind == "parent":
                _, y, old = op
                self.nodes[y].parent = old
                self._binval(y)
                self._event_subtree(y)
            elif kind == "merged":
                del self.merged[op[1]]
            else:
                raise AssertionError(f"unknown trail op {op!r}")

    def _touch(self, x: int) -> None:
        self._ver += 1
        self._label_ver[x] = self._ver

    # -- incremental bookkeeping ----------------------------------------------
    #
    # Three structures let rule selection skip unaffected work: cached
    # blocking statuses (invalidated per subtree), the clash dirty set,
    # and the rule agenda.  Every mutator below keeps them exactly
    # consistent with a full recomputation; the cross-check mode asserts
    # as much at every step.

    def _push(self, rule_idx: int, x: int, wild: bool) -> None:
        key = (rule_idx, x, wild)
        if key not in self._pending:
            self._pending.add(key)
            heappush(self._agenda, key)

    def _event_subtree(self, y: int) -> None:
        """A change at y may switch any rule on at y or, through blocking
        status (a function of the labels and edge labels on the root
        path), anywhere in y's subtree: push wild entries for all of it."""
        nodes = self.nodes
        succ = self.succ
        push = self._push
        stack = [y]
        while stack:
            v = stack.pop()
            push(0, v, True)
            for c in succ[v]:
                cn = nodes.get(c)
                if cn is not None and not cn.is_root and cn.parent == v:
                    stack.append(c)

    def _push_le_at_neighbours(self, x: int) -> None:
        """A label added at x can raise a neighbour's count of qualifying
        members, switching on the two counting rules there; no other rule
        gains applicability from a neighbour's label growing."""
        push = self._push
        for p in self.succ[x]:
            push(_LE_ROOT_IDX, p, False)
            push(_LE_IDX, p, False)
        for p in self.pred[x]:
            push(_LE_ROOT_IDX, p, False)
            push(_LE_IDX, p, False)

    def _push_wild_at_neighbours(self, x: int) -> None:
        """Removals at x (labels or connecting roles) can switch any rule
        on at a neighbour: a universal restriction regains an unserved
        neighbour, an existential loses its witness, a counting rule loses
        a member keeping it satisfied."""
        push = self._push
        for p in self.succ[x]:
            push(0, p, True)
        for p in self.pred[x]:
            push(0, p, True)

    def _push_le_at_atmost_holders(self) -> None:
        """Emptying an edge anywhere can break a path that made a merge
        candidate pair ancestor-related, re-enabling the tree counting
        rule at any node holding an at-most restriction."""
        push = self._push
        for x in self._atmost_holders:
            push(_LE_ROOT_IDX, x, False)
            push(_LE_IDX, x, False)

    def _binval(self, y: int) -> None:
        """Drop cached blocking statuses for y and its tree descendants.
        A cached node's ancestors are always cached, so an uncached node
        prunes its whole subtree from the walk."""
        bstat = self._bstat
        if not bstat:
            return
        nodes = self.nodes
        succ = self.succ
        stack = [y]
        while stack:
            v = stack.pop()
            if bstat.pop(v, None) is None:
                continue
            for c in succ[v]:
                cn = nodes[c]
                if not cn.is_root and cn.parent == v:
                    stack.append(c)

    # -- structure ----------------------------------------------------------

    def new_node(self, *, is_root: bool, parent: int | None = None) -> int:
        nid = self._next
        self._next += 1
        depth = 0 if parent is None else self.nodes[parent].depth + 1
        self.nodes[nid] = Node(nid, is_root, parent, depth, set())
        self.succ[nid] = set()
        self.pred[nid] = set()
        if self._trail is not None:
            self._trail.append(("node", nid))
        return nid

    def add_label(self, x: int, c: Concept) -> bool:
        label = self.nodes[x].label
        if c in label:
            return False
        label.add(c)
        if type(c) is AtMost:
            self._atmost_holders.add(x)
        self._touch(x)
        self._clash_dirty.add(x)
        self._binval(x)
        self._event_subtree(x)
        self._push_le_at_neighbours(x)
        if self._trail is not None:
            self._trail.append(("label", x, c))
        return True

    def clear_label(self, x: int) -> None:
        label = self.nodes[x].label
        if not label:
            return
        if self._trail is not None:
            self._trail.append(("unclear", x, frozenset(label)))
        label.clear()
        self._atmost_holders.discard(x)
        self._touch(x)
        self._clash_dirty.add(x)
        self._binval(x)
        self._event_subtree(x)
        self._push_wild_at_neighbours(x)

    def _edge_touched(self, x: int, y: int) -> None:
        self._clash_dirty.add(x)
        self._clash_dirty.add(y)
        self._binval(y)
        self._push(0, x, True)
        self._event_subtree(y)

    def ensure_edge(self, x: int, y: int) -> set[Role]:
        lab = self.edges.get((x, y))
        if lab is None:
            lab = set()
            self.edges[(x, y)] = lab
            self.succ[x].add(y)
            self.pred[y].add(x)
            self._ever += 1
            self._edge_touched(x, y)
            if self._trail is not None:
                self._trail.append(("edge", x, y))
        return lab

    def add_edge_roles(self, x: int, y: int, roles) -> None:
        lab = self.ensure_edge(x, y)
        trail = self._trail
        added = False
        for r in roles:
            if r not in lab:
                lab.add(r)
                added = True
                self._ever += 1
                if trail is not None:
                    trail.append(("role", x, y, r))
        if added:
            self._edge_touched(x, y)

    def drop_edge(self, x: int, y: int) -> set[Role]:
        lab = self.edges.pop((x, y))
        self.succ[x].discard(y)
        self.pred[y].discard(x)
        self._ever += 1
        self._edge_touched(x, y)
        if lab:
            self._push_le_at_atmost_holders()
        if self._trail is not None:
            self._trail.append(("unedge", x, y, frozenset(lab)))
        return lab

    def clear_edge_label(self, x: int, y: int) -> None:
        lab = self.edges[(x, y)]
        if not lab:
            return
        self._ever += 1
        self._edge_touched(x, y)
        self._push_le_at_atmost_holders()
        if self._trail is not None:
            self._trail.append(("unroles", x, y, frozenset(lab)))
        lab.clear()

    def set_parent(self, y: int, parent: int) -> None:
        node = self.nodes[y]
        if self._trail is not None:
            self._trail.append(("parent", y, node.parent))
        node.parent = parent
        self._binval(y)
        self._event_subtree(y)

    def note_merge(self, y: int, z: int) -> None:
        self.merged[y] = z
        if self._trail is not None:
            self._trail.append(("merged", y))

    def edge_label(self, x: int, y: int) -> set[Role]:
        return self.edges.get((x, y), set())

    def tree_children(self, x: int) -> list[int]:
        return sorted(
            y for y in self.succ[x] if not self.nodes[y].is_root
        )

    def set_neq(self, a: int, b: int) -> None:
        if a == b:
            return
        pair = frozenset((a, b))
        if pair in self.neq:
            return
        self.neq.add(pair)
        # A new inequality can only disable rules (it removes counting
        # merge pairs and satisfies at-least distinctness), so nothing is
        # pushed onto the agenda.
        self._clash_dirty.add(a)
        self._clash_dirty.add(b)
        if self._trail is not None:
            self._trail.append(("neq", pair))

    def has_neq(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.neq

    def neq_partners(self, a: int) -> set[int]:
        out = set()
        for pair in self.neq:
            if a in pair:
                out |= pair - {a}
        return out

    def resolve_root(self, individual: str) -> int:
        nid = self.individual_root[individual]
        while nid in self.merged:
            nid = self.merged[nid]
        return nid

    # -- label views ----------------------------------------------------------

    def sorted_label(self, x: int) -> tuple:
        ver = self._label_ver.get(x, 0)
        entry = self._label_order.get(x)
        if entry is not None and entry[0] == ver:
            return entry[1]
        ordered = tuple(sorted(self.nodes[x].label, key=concept_key))
        self._label_order[x] = (ver, ordered)
        return ordered

    def label_of_kind(self, x: int, kind: type) -> tuple:
        """The node's label members of one constructor, in concept order."""
        ver = self._label_ver.get(x, 0)
        entry = self._label_kinds.get(x)
        if entry is None or entry[0] != ver:
            buckets: dict[type, list] = {t: [] for t in _BUCKET_KINDS}
            for c in self.sorted_label(x):
                bucket = buckets.get(type(c))
                if bucket is not None:
                    bucket.append(c)
            entry = (ver, {t: tuple(v) for t, v in buckets.items()})
            self._label_kinds[x] = entry
        return entry[1][kind]

    def node_ids(self) -> list[int]:
        # Ids are handed out in ascending order and undo removes the
        # newest first, so insertion order is already sorted.
        return list(self.nodes)

    def live_ids(self) -> list[int]:
        return [i for i in self.nodes if i not in self.merged]

    # -- neighbour relation --------------------------------------------------

    def s_neighbours(self, x: int, s: Role) -> list[int]:
        """Nodes reachable from x over an edge whose label contains a role
        below s, in either direction (the reverse direction reads the
        inverse).  Callers must not mutate the returned list."""
        entry = self._neigh.get((x, s))
        if entry is not None and entry[0] == self._ever:
            return entry[1]
        table = self.rbox._subroles
        try:
            below = table[s]
        except KeyError:
            raise SignatureError(f"unknown role: {s}") from None
        out: set[int] = set()
        for y in self.succ[x]:
            if not below.isdisjoint(self.edges[(x, y)]):
                out.add(y)
        below_inv = table[s.inverse()]
        for y in self.pred[x]:
            if not below_inv.isdisjoint(self.edges[(y, x)]):
                out.add(y)
        result = sorted(out)
        self._neigh[(x, s)] = (self._ever, result)
        return result

    def neighbours_with(self, x: int, s: Role, c: Concept) -> list[int]:
        return [y for y in self.s_neighbours(x, s) if c in self.nodes[y].label]

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when b is reachable from a over non-empty edges."""
        seen = {a}
        queue = [a]
        while queue:
            cur = queue.pop()
            for nxt in self.succ[cur]:
                if not self.edges[(cur, nxt)]:
                    continue
                if nxt == b:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    def has_pairwise_distinct(self, candidates: list[int], n: int) -> bool:
        """True when n of the candidates are pairwise asserted unequal.
        Vacuously true for n = 0."""
        if n == 0:
            return True
        if len(candidates) < n:
            return False
        for combo in combinations(candidates, n):
            if all(self.has_neq(a, b) for a, b in combinations(combo, 2)):
                return True
        return False

    # -- blocking -------------------------------------------------------------

    def blocking(self) -> dict[int, BlockInfo]:
        """Status of every node.

        A tree node is directly blocked when an ancestor tree node shows
        the same node label, the same parent label and the same incoming
        edge label (witnessing that expansion below it would only repeat);
        it is indirectly blocked when an ancestor is blocked or its
        incoming edge was emptied by a merge.  Root nodes are never
        blocked.
        """
        return {x: self.status_of(x) for x in self.node_ids()}

    def status_of(self, x: int) -> BlockInfo:
        """Blocking status of one node, cached until a mutation touches
        its root path."""
        bstat = self._bstat
        st = bstat.get(x)
        if st is not None:
            return st
        # Climb to the nearest settled ancestor, then fill back down; a
        # node's status depends only on its parent's status and the
        # labels along its root path.
        chain = []
        cur = x
        while st is None:
            node = self.nodes[cur]
            if node.is_root:
                st = bstat[cur] = _ROOT_STATUS
                break
            chain.append(cur)
            cur = node.parent
            st = bstat.get(cur)
        for y in reversed(chain):
            node = self.nodes[y]
            parent = node.parent
            incoming = self.edges.get((parent, y))
            if not incoming:
                st = _INDIRECT_STATUS
            elif st.status != UNBLOCKED:
                st = _INDIRECT_STATUS
            else:
                blocker = self._find_blocker(y, parent, incoming)
                st = _UNBLOCKED_STATUS if blocker is None else BlockInfo(DIRECT, blocker)
            bstat[y] = st
        return st

    def _blocking_fresh(self) -> dict[int, BlockInfo]:
        """Recompute every status from scratch, bypassing the cache.
        Node ids grow downwards, so one ascending pass settles parents
        before children.  The cross-check harness compares this against
        the cached view."""
        status: dict[int, BlockInfo] = {}
        for x in self.node_ids():
            node = self.nodes[x]
            if node.is_root:
                status[x] = BlockInfo(UNBLOCKED)
                continue
            parent = node.parent
            assert parent is not None
            incoming = self.edge_label(parent, x)
            if not incoming:
                status[x] = BlockInfo(INDIRECT)
                continue
            if status[parent].status != UNBLOCKED:
                status[x] = BlockInfo(INDIRECT)
                continue
            blocker = self._find_blocker(x, parent, incoming)
            if blocker is not None:
                status[x] = BlockInfo(DIRECT, blocker)
            else:
                status[x] = BlockInfo(UNBLOCKED)
        return status

    def _find_blocker(self, x: int, parent: int, incoming: set[Role]) -> int | None:
        label_x = self.nodes[x].label
        label_p = self.nodes[parent].label
        y = parent
        while True:
            ynode = self.nodes[y]
            if ynode.is_root:
                return None
            yparent = ynode.parent
            assert yparent is not None
            eyy = self.edge_label(yparent, y)
            if (
                eyy
                and ynode.label == label_x
                and self.nodes[yparent].label == label_p
                and eyy == incoming
            ):
                return y
            y = yparent

    # -- clash detection ------------------------------------------------------

    def find_clash(self) -> Clash | None:
        """First clash in node order, or None.

        Only nodes marked dirty since the last clash-free scan can have
        gained a clash, together with their neighbours (whose at-most
        counts read the dirty nodes' labels and edges); everything else
        was checked clean before and is untouched since.
        """
        res = self._clash_scan()
        if CROSSCHECK:
            fresh = self._clash_fresh()
            assert res == fresh, (res, fresh)
        return res

    def _clash_scan(self) -> Clash | None:
        if self.unsat_marker is not None:
            return Clash("contradiction", -1, self.unsat_marker)
        dirty = self._clash_dirty
        scan: set[int] = set()
        for d in dirty:
            if d not in self.nodes:
                continue
            scan.add(d)
            scan.update(self.succ[d])
            scan.update(self.pred[d])
        for x in sorted(scan):
            label = self.nodes[x].label
            for c in self.label_of_kind(x, Not):
                if c.operand in label:
                    return Clash("atoms", x, sexpr(c.operand))
            for c in self.label_of_kind(x, AtMost):
                members = self.neighbours_with(x, c.role, c.operand)
                if len(members) > c.count and self.has_pairwise_distinct(
                    members, c.count + 1
                ):
                    return Clash("at-most", x, sexpr(c))
        dirty.clear()
        return None

    def _clash_fresh(self) -> Clash | None:
        """Scan every node, bypassing the dirty set; cross-check twin of
        find_clash."""
        if self.unsat_marker is not None:
            return Clash("contradiction", -1, self.unsat_marker)
        for x in self.node_ids():
            label = self.nodes[x].label
            for c in self.label_of_kind(x, Not):
                if c.operand in label:
                    return Clash("atoms", x, sexpr(c.operand))
            for c in self.label_of_kind(x, AtMost):
                members = self.neighbours_with(x, c.role, c.operand)
                if len(members) > c.count and self.has_pairwise_distinct(
                    members, c.count + 1
                ):
                    return Clash("at-most", x, sexpr(c))
        return None


def initial_forest(problem: ReducedProblem) -> Forest:
    """One root per named individual, labelled and wired by the ABox."""
    f = Forest(problem.rbox)
    for name in problem.individuals:
        f.individual_root[name] = f.new_node(is_root=True)
    for a in problem.abox:
        if isinstance(a, ConceptAssertion):
            f.add_label(f.individual_root[a.individual], a.concept)
        elif isinstance(a, RoleAssertion):
            x = f.individual_root[a.subject]
            y = f.individual_root[a.target]
            f.add_edge_roles(x, y, (a.role,))
        elif isinstance(a, Inequality):
            x = f.individual_root[a.left]
            y = f.individual_root[a.right]
            if x == y:
                f.unsat_marker = f"{a.left} asserted distinct from itself"
            else:
                f.set_neq(x, y)
    return f


def to_dot(f: Forest) -> str:
    """DOT rendering: roots as boxes, tree nodes as ellipses, inequalities
    dashed, merges dotted."""
    lines = ["digraph forest {", "  rankdir=TB;"]
    names_of: dict[int, list[str]] = {}
    for name, nid in sorted(f.individual_root.items()):
        names_of.setdefault(nid, []).append(name)
    blocking = f.blocking()
    for x in f.node_ids():
        node = f.nodes[x]
        label = ", ".join(sexpr(c) for c in sorted(node.label, key=concept_key))
        title = "/".join(names_of.get(x, [])) or f"n{x}"
        shape = "box" if node.is_root else "ellipse"
        extras = ""
        if x in f.merged:
            extras = ", style=dashed, color=gray"
        elif blocking[x].status != UNBLOCKED:
            extras = ", style=filled, fillcolor=lightgray"
        lines.append(f'  n{x} [shape={shape}, label="{title}\\n{{{label}}}"{extras}];')
    for (x, y), roles in sorted(f.edges.items()):
        text = ", ".join(str(r) for r in sorted(roles, key=lambda r: (r.name, r.inverted)))
        lines.append(f'  n{x} -> n{y} [label="{text}"];')
    for pair in sorted(f.neq, key=sorted):
        a, b = sorted(pair)
        lines.append(f'  n{a} -> n{b} [style=dashed, dir=none, label="!="];')
    for gone, survivor in sorted(f.merged.items()):
        lines.append(f'  n{gone} -> n{survivor} [style=dotted, dir=none, label="=="];')
    lines.append("}")
    return "\n".join(lines) + "\n"
