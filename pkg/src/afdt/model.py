"""Domain types and structure-function evaluation for attack-fault-defense trees.

A model is a rooted DAG of typed nodes.  Leaves are basic attack steps (BAS),
basic component failures (BCF), or basic defense steps (BDS).  Gates combine
activation bottom-up: AND, OR, VOT(k/n) (at least k of n inputs), and INH,
the inhibition gate that stops its event from propagating while its defense
condition holds and is not disabled:

    INH = event AND NOT (defense AND NOT disabler)

A missing disabler slot behaves as constant false, so a deployed defense with
no disabler blocks unconditionally, and an undeployed defense passes the
event through unchanged.

Models obey a stratification rule that keeps the structure function monotone
in the risk leaves (BAS/BCF) and anti-monotone in the defenses: BDS leaves
live only inside INH defense slots, defense slots combine only BDS leaves
with AND/OR, and disabler slots combine only BAS/BCF leaves with AND/OR.
``validate`` reports every breach of these rules as data; nothing raises.

Models are treated as immutable once validated.  All functions here are pure
and safe to call concurrently on a shared model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Collection, Iterable, Iterator, Mapping

from .errors import InvalidModelError, UnknownLeafError

# Bare identifier charset; ids arising from quoted DSL forms may also contain
# spaces.
BARE_ID_RE = re.compile(r"[A-Za-z0-9_.-]+")
ID_RE = re.compile(r"[A-Za-z0-9_. -]+")


class LeafKind(Enum):
    BAS = "bas"
    BCF = "bcf"
    BDS = "bds"


class GateKind(Enum):
    AND = "and"
    OR = "or"
    VOT = "vot"
    INH = "inh"


#: Kinds whose active state is decided directly by the assignment.
LEAF_KINDS = frozenset(LeafKind)
#: Kinds allowed to combine BDS leaves inside a defense slot.
SLOT_GATE_KINDS = frozenset({GateKind.AND, GateKind.OR})


@dataclass(frozen=True)
class Node:
    """One model node: a leaf or a gate.

    ``children`` is only meaningful for AND/OR/VOT gates and preserves source
    order.  INH gates use the ``event``/``defense``/``disabler`` slots instead.
    ``label`` is an optional display name used by renderers; distinct nodes
    may share a label (the id stays unique).
    """

    id: str
    kind: LeafKind | GateKind
    children: tuple[str, ...] = ()
    k: int | None = None
    event: str | None = None
    defense: str | None = None
    disabler: str | None = None
    label: str | None = None

    @property
    def display(self) -> str:
        return self.label if self.label is not None else self.id

    @property
    def is_leaf(self) -> bool:
        return isinstance(self.kind, LeafKind)

    @property
    def is_gate(self) -> bool:
        return isinstance(self.kind, GateKind)

    def successors(self) -> tuple[str, ...]:
        """All referenced node ids, in slot order for INH gates."""
        if self.kind is GateKind.INH:
            slots = [self.event, self.defense, self.disabler]
            return tuple(s for s in slots if s is not None) + self.children
        return self.children


def bas(id: str, label: str | None = None) -> Node:
    return Node(id, LeafKind.BAS, label=label)


def bcf(id: str, label: str | None = None) -> Node:
    return Node(id, LeafKind.BCF, label=label)


def bds(id: str, label: str | None = None) -> Node:
    return Node(id, LeafKind.BDS, label=label)


def and_(id: str, children: Iterable[str]) -> Node:
    return Node(id, GateKind.AND, children=tuple(children))


def or_(id: str, children: Iterable[str]) -> Node:
    return Node(id, GateKind.OR, children=tuple(children))


def vot(id: str, k: int, children: Iterable[str]) -> Node:
    return Node(id, GateKind.VOT, children=tuple(children), k=k)


def inh(id: str, event: str, defense: str, disabler: str | None = None) -> Node:
    return Node(id, GateKind.INH, event=event, defense=defense, disabler=disabler)


@dataclass
class Model:
    """A rooted DAG of nodes with a designated top-level event.

    ``duplicate_ids`` records ids that collided while the node map was built
    (e.g. from a JSON document listing the same id twice); ``validate``
    reports them as DUPLICATE_ID.
    """

    nodes: dict[str, Node]
    tle: str
    name: str | None = None
    description: str | None = None
    duplicate_ids: tuple[str, ...] = ()

    @classmethod
    def from_nodes(
        cls,
        nodes: Iterable[Node],
        tle: str,
        name: str | None = None,
        description: str | None = None,
    ) -> "Model":
        node_map: dict[str, Node] = {}
        duplicates: list[str] = []
        for node in nodes:
            if node.id in node_map:
                duplicates.append(node.id)
            node_map[node.id] = node
        return cls(node_map, tle, name, description, tuple(duplicates))

    def node(self, id: str) -> Node:
        try:
            return self.nodes[id]
        except KeyError:
            raise InvalidModelError(f"model references unknown node {id!r}") from None

    def leaf_ids(self) -> frozenset[str]:
        return frozenset(n.id for n in self.nodes.values() if n.is_leaf)

    def display(self, id: str) -> str:
        node = self.nodes.get(id)
        return node.display if node is not None else id

    def structurally_equal(self, other: "Model") -> bool:
        """Equality on the graph itself, ignoring name/description metadata."""
        return self.tle == other.tle and self.nodes == other.nodes


@dataclass(frozen=True)
class LeafPartition:
    bas: frozenset[str]
    bcf: frozenset[str]
    bds: frozenset[str]

    @property
    def risk(self) -> frozenset[str]:
        return self.bas | self.bcf


# Violation codes.
CYCLE = "CYCLE"
DUPLICATE_ID = "DUPLICATE_ID"
BAD_ARITY = "BAD_ARITY"
BDS_OUTSIDE_DEFENSE = "BDS_OUTSIDE_DEFENSE"
BAS_IN_DEFENSE_SLOT = "BAS_IN_DEFENSE_SLOT"
UNREACHABLE = "UNREACHABLE"
MISSING_TLE = "MISSING_TLE"
DANGLING_REF = "DANGLING_REF"


@dataclass(frozen=True)
class Violation:
    code: str
    node: str | None
    message: str

    def as_dict(self) -> dict[str, str | None]:
        return {"code": self.code, "node": self.node, "message": self.message}


# Traversal contexts for the stratification check.
_RISK = "risk"
_DEFENSE = "defense"
_DISABLER = "disabler"


def validate(model: Model) -> list[Violation]:
    """Check every structural invariant; an empty list means the model is legal.

    Violations are data, not failures: all breaches are collected in one
    pass and returned sorted by (code, node) so output is deterministic.
    """
    violations: list[Violation] = []

    for dup in sorted(set(model.duplicate_ids)):
        violations.append(Violation(DUPLICATE_ID, dup, "node id defined more than once"))
    for key, node in model.nodes.items():
        if node.id != key:
            violations.append(
                Violation(DUPLICATE_ID, key, f"node map key {key!r} holds node with id {node.id!r}")
            )

    violations.extend(_local_violations(model))
    violations.extend(_graph_violations(model))

    violations.sort(key=lambda v: (v.code, v.node or "", v.message))
    return violations


def _local_violations(model: Model) -> Iterator[Violation]:
    """Per-node arity/slot checks plus dangling references."""
    for node in model.nodes.values():
        if node.is_leaf:
            if node.children or node.event or node.defense or node.disabler:
                yield Violation(BAD_ARITY, node.id, "leaf must not reference other nodes")
            continue
        kind = node.kind
        if kind in (GateKind.AND, GateKind.OR):
            if not node.children:
                yield Violation(BAD_ARITY, node.id, f"{kind.value} gate needs at least one input")
        elif kind is GateKind.VOT:
            if node.k is None or node.k < 1:
                yield Violation(BAD_ARITY, node.id, "vot threshold k must be a positive integer")
            elif len(node.children) < node.k:
                yield Violation(
                    BAD_ARITY,
                    node.id,
                    f"vot k={node.k} exceeds its {len(node.children)} input(s)",
                )
        elif kind is GateKind.INH:
            if node.children:
                yield Violation(BAD_ARITY, node.id, "inh gate takes slots, not child lists")
            if node.event is None or node.defense is None:
                yield Violation(BAD_ARITY, node.id, "inh gate needs event and defense slots")
        if kind is not GateKind.VOT and node.k is not None:
            yield Violation(BAD_ARITY, node.id, "threshold k is only meaningful on vot gates")
        for ref in node.successors():
            if ref not in model.nodes:
                yield Violation(DANGLING_REF, node.id, f"references unknown node {ref!r}")


def _reachable_and_cyclic(model: Model) -> tuple[set[str], set[str]]:
    """Nodes reachable from the TLE, and those among them lying on a cycle.

    Iterative Tarjan over the reference relation: every member of a
    multi-node strongly connected component (or a self-loop) is on a cycle,
    so diagnostics name the whole loop rather than one back edge.
    """
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    scc_stack: list[str] = []
    cyclic: set[str] = set()
    counter = 0
    work: list[tuple[str, int]] = [(model.tle, 0)]
    while work:
        nid, i = work.pop()
        node = model.nodes.get(nid)
        refs = [r for r in (node.successors() if node else ()) if r in model.nodes]
        if i == 0:
            index[nid] = lowlink[nid] = counter
            counter += 1
            scc_stack.append(nid)
            on_stack.add(nid)
        else:
            lowlink[nid] = min(lowlink[nid], lowlink[refs[i - 1]])
        descended = False
        for j in range(i, len(refs)):
            ref = refs[j]
            if ref not in index:
                work.append((nid, j + 1))
                work.append((ref, 0))
                descended = True
                break
            if ref in on_stack:
                lowlink[nid] = min(lowlink[nid], index[ref])
        if descended:
            continue
        if lowlink[nid] == index[nid]:
            component = []
            while True:
                member = scc_stack.pop()
                on_stack.discard(member)
                component.append(member)
                if member == nid:
                    break
            if len(component) > 1 or nid in refs:
                cyclic.update(component)
    return set(index), cyclic


def _graph_violations(model: Model) -> Iterator[Violation]:
    """Reachability, acyclicity, and the stratification rule."""
    if not model.tle or model.tle not in model.nodes:
        yield Violation(MISSING_TLE, model.tle or None, "top-level event is missing from the model")
        return

    reachable, cyclic = _reachable_and_cyclic(model)
    for nid in sorted(cyclic):
        yield Violation(CYCLE, nid, "node lies on a cycle in the child relation")

    for nid in sorted(set(model.nodes) - reachable):
        yield Violation(UNREACHABLE, nid, "node is not reachable from the top-level event")

    if cyclic:
        return  # context walk below assumes an acyclic reachable region

    # Stratification: walk (node, context) pairs from the TLE.
    seen: set[tuple[str, str]] = set()
    todo: list[tuple[str, str]] = [(model.tle, _RISK)]
    while todo:
        nid, ctx = todo.pop()
        if (nid, ctx) in seen:
            continue
        seen.add((nid, ctx))
        node = model.nodes.get(nid)
        if node is None:
            continue
        breach = _context_breach(node, ctx)
        if breach is not None:
            yield breach
            continue
        if node.is_leaf:
            continue
        if node.kind is GateKind.INH:
            if node.event:
                todo.append((node.event, _RISK))
            if node.defense:
                todo.append((node.defense, _DEFENSE))
            if node.disabler:
                todo.append((node.disabler, _DISABLER))
        else:
            todo.extend((c, ctx) for c in node.children if c in model.nodes)


def _context_breach(node: Node, ctx: str) -> Violation | None:
    if ctx == _RISK:
        if node.kind is LeafKind.BDS:
            return Violation(
                BDS_OUTSIDE_DEFENSE, node.id, "defense step used outside an inh defense slot"
            )
        return None
    slot = "defense" if ctx == _DEFENSE else "disabler"
    if node.kind in SLOT_GATE_KINDS:
        return None
    if ctx == _DEFENSE:
        if node.kind is not LeafKind.BDS:
            return Violation(
                BAS_IN_DEFENSE_SLOT,
                node.id,
                f"only defense steps combined by and/or may appear in an inh {slot} slot",
            )
    else:
        if node.kind not in (LeafKind.BAS, LeafKind.BCF):
            code = BDS_OUTSIDE_DEFENSE if node.kind is LeafKind.BDS else BAS_IN_DEFENSE_SLOT
            return Violation(
                code,
                node.id,
                f"only attack/failure leaves combined by and/or may appear in an inh {slot} slot",
            )
    return None


def evaluate(model: Model, active: Collection[str]) -> bool:
    """Activation of the top-level event under a full leaf assignment.

    ``active`` holds the leaf ids that are on: occurred BAS/BCF plus deployed
    BDS.  Each node of the DAG is computed once, so shared subtrees cost
    nothing extra.  Assumes a validated model; structural surprises raise
    InvalidModelError rather than returning garbage.
    """
    active_set = frozenset(active)
    unknown = active_set - model.leaf_ids()
    if unknown:
        raise UnknownLeafError(
            "assignment names non-leaf or unknown id(s): " + ", ".join(sorted(unknown))
        )
    memo: dict[str, bool] = {}
    _eval_into(model, model.tle, active_set, memo)
    return memo[model.tle]


def _eval_into(model: Model, root: str, active: frozenset[str], memo: dict[str, bool]) -> None:
    """Iterative post-order evaluation of ``root`` into ``memo``."""
    if root not in model.nodes:
        raise InvalidModelError(f"evaluation reached unknown node {root!r}")
    expanding: set[str] = set()
    stack: list[tuple[str, bool]] = [(root, False)]
    while stack:
        nid, expanded = stack.pop()
        if nid in memo:
            continue
        node = model.nodes.get(nid)
        if node is None:
            raise InvalidModelError(f"evaluation reached unknown node {nid!r}")
        if expanded:
            expanding.discard(nid)
            memo[nid] = _node_value(node, memo)
            continue
        if node.is_leaf:
            memo[nid] = nid in active
            continue
        if nid in expanding:
            raise InvalidModelError(f"evaluation hit a cycle at node {nid!r}")
        expanding.add(nid)
        stack.append((nid, True))
        stack.extend((ref, False) for ref in node.successors() if ref not in memo)


def _node_value(node: Node, memo: Mapping[str, bool]) -> bool:
    kind = node.kind
    if kind is GateKind.AND:
        if not node.children:
            raise InvalidModelError(f"and gate {node.id!r} has no inputs")
        return all(memo[c] for c in node.children)
    if kind is GateKind.OR:
        if not node.children:
            raise InvalidModelError(f"or gate {node.id!r} has no inputs")
        return any(memo[c] for c in node.children)
    if kind is GateKind.VOT:
        if node.k is None or node.k < 1 or len(node.children) < node.k:
            raise InvalidModelError(f"vot gate {node.id!r} has a bad threshold")
        return sum(1 for c in node.children if memo[c]) >= node.k
    if kind is GateKind.INH:
        if node.event is None or node.defense is None:
            raise InvalidModelError(f"inh gate {node.id!r} is missing a slot")
        disabled = memo[node.disabler] if node.disabler is not None else False
        return memo[node.event] and not (memo[node.defense] and not disabled)
    raise InvalidModelError(f"node {node.id!r} has unsupported kind {kind!r}")


def leaves(model: Model) -> LeafPartition:
    """Disjoint partition of the model's leaf ids by kind."""
    sets: dict[LeafKind, set[str]] = {k: set() for k in LeafKind}
    for node in model.nodes.values():
        if node.is_leaf:
            sets[node.kind].add(node.id)
    return LeafPartition(
        bas=frozenset(sets[LeafKind.BAS]),
        bcf=frozenset(sets[LeafKind.BCF]),
        bds=frozenset(sets[LeafKind.BDS]),
    )


def topological_order(model: Model) -> list[str]:
    """Reachable node ids, successors before the nodes that use them."""
    order: list[str] = []
    seen: set[str] = set()
    stack: list[tuple[str, bool]] = [(model.tle, False)]
    expanding: set[str] = set()
    while stack:
        nid, expanded = stack.pop()
        if expanded:
            expanding.discard(nid)
            order.append(nid)
            continue
        if nid in seen or nid not in model.nodes:
            continue
        seen.add(nid)
        expanding.add(nid)
        stack.append((nid, True))
        for ref in model.nodes[nid].successors():
            if ref in expanding:
                raise InvalidModelError(f"cycle detected at node {ref!r}")
            if ref not in seen:
                stack.append((ref, False))
    return order
