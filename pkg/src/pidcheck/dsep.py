"""d-connectivity and directed-path queries over diagram views, plus the two
published baselines used for differential testing: the Decision Bayes-ball
requisite set and the moral-graph elimination neighborhood.  Both baselines
over-approximate the exact required set and are never used for verdicts.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import Diagram, GraphView, moral_view
from .ordering import OrderSchema, induce_partial_order


class NotTotalOrder(ValueError):
    """The diagram does not force a total order on its decisions."""


@dataclass(frozen=True)
class SeparationQuery:
    view: GraphView
    source: str
    targets: frozenset[str]
    conditioning: frozenset[str]

    def __post_init__(self):
        if self.source in self.conditioning:
            raise ValueError("source must not be conditioned")


@dataclass(frozen=True)
class ReachResult:
    connected: bool
    reachable: frozenset[str]  # nodes on some active trail from the source
    arrived: frozenset[str]    # every node a ball arrived at, observed or not


def _ancestors_of(view: GraphView, seeds: frozenset[str]) -> set[str]:
    out = set(seeds)
    stack = list(seeds)
    parents: dict[str, list[str]] = {v: [] for v in view.node_ids}
    for t, h in view.arc_list:
        parents[h].append(t)
    while stack:
        v = stack.pop()
        for p in parents[v]:
            if p not in out:
                out.add(p)
                stack.append(p)
    return out


def active_reach(view: GraphView, sources: frozenset[str], conditioning: frozenset[str]) -> ReachResult:
    """Ball-passing BFS returning every node actively reachable from the
    sources given the conditioning set (colliders open iff they or a
    descendant are conditioned), plus the set of all arrival points.

    An arrival at an observed node does not extend any trail, but it does
    witness an active trail ENDING there, which is exactly what requisite
    queries need.
    """
    parents: dict[str, list[str]] = {v: [] for v in view.node_ids}
    children: dict[str, list[str]] = {v: [] for v in view.node_ids}
    for t, h in view.arc_list:
        parents[h].append(t)
        children[t].append(h)
    anc_z = _ancestors_of(view, conditioning)

    UP, DOWN = 0, 1  # up: arrived from a child; down: arrived from a parent
    queue: deque[tuple[str, int]] = deque()
    visited: set[tuple[str, int]] = set()
    arrived: set[str] = set()
    reachable: set[str] = set()

    for s in sources:
        queue.append((s, UP))
    while queue:
        v, direction = queue.popleft()
        if (v, direction) in visited:
            continue
        visited.add((v, direction))
        arrived.add(v)
        observed = v in conditioning
        if not observed:
            reachable.add(v)
        if direction == UP:
            if not observed:
                for p in parents[v]:
                    queue.append((p, UP))
                for c in children[v]:
                    queue.append((c, DOWN))
        else:
            if not observed:
                for c in children[v]:
                    queue.append((c, DOWN))
            if v in anc_z:  # collider with itself or a descendant observed
                for p in parents[v]:
                    queue.append((p, UP))
    return ReachResult(connected=False, reachable=frozenset(reachable), arrived=frozenset(arrived))


def d_connected(q: SeparationQuery) -> ReachResult:
    """True iff an active trail links the source to some target given the
    conditioning set.  A conditioned target is never connected: an observed
    node carries no information beyond its (known) state.  An empty target
    set is never connected; a source that is its own target always is.
    """
    if q.source in q.targets:
        return ReachResult(True, frozenset({q.source}), frozenset({q.source}))
    if not q.targets:
        return ReachResult(False, frozenset(), frozenset())
    res = active_reach(q.view, frozenset({q.source}), q.conditioning)
    hit = bool(res.reachable & q.targets)
    return ReachResult(hit, res.reachable, res.arrived)


def directed_path_exists(view: GraphView, frm: str, to: str) -> bool:
    """Directed reachability in the view; a node reaches itself (empty path)."""
    if frm == to:
        return True
    children: dict[str, list[str]] = {v: [] for v in view.node_ids}
    for t, h in view.arc_list:
        children[t].append(h)
    stack = [frm]
    seen = {frm}
    while stack:
        v = stack.pop()
        for c in children[v]:
            if c == to:
                return True
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return False


def full_view(d: Diagram) -> GraphView:
    """All arcs, informational included; decisions act as plain nodes."""
    return GraphView(
        node_ids=d.ids,
        kinds={n.id: n.kind for n in d.nodes},
        arc_list=d.arcs(),
        directed=True,
    )


def bayes_ball_requisite(d: Diagram, dec: str) -> frozenset[str]:
    """Decision Bayes-ball baseline: observed past nodes that receive the
    ball when it is passed from the value descendants of ``dec``, with the
    whole past (and the decision itself) observed.

    Runs on the full diagram, informational arcs included and later
    decisions treated as chance nodes, which is what makes it an
    over-approximation of the exact required set.  Only defined on classic
    diagrams (total decision order).
    """
    po = induce_partial_order(d)
    decisions = d.decision_ids
    for i, a in enumerate(decisions):
        for b in decisions[i + 1:]:
            if po.incompatible(a, b):
                raise NotTotalOrder(f"not a total order: {a!r} and {b!r} are incompatible")
    pred = frozenset(x for x in d.carrier_ids if po.precedes(x, dec))
    view = full_view(d)
    sources = frozenset(v for v in d.value_ids if v in d.descendants(dec))
    if not sources:
        return frozenset()
    res = active_reach(view, sources, pred | {dec})
    return frozenset(pred & res.arrived)


def elimination_neighbors(d: Diagram, dec: str, schema: OrderSchema) -> frozenset[str]:
    """Moral-graph baseline: past variables connected to the decision in the
    moral graph through a path whose intermediate nodes all lie outside the
    decision's past.  Such nodes become neighbors of the decision by the
    time it is eliminated in reverse temporal order."""
    pred = schema.pred(dec)
    moral = moral_view(d)
    out: set[str] = set()
    seen = {dec}
    stack = [dec]
    while stack:
        v = stack.pop()
        for w in moral.neighbors_of(v):
            if w in seen:
                continue
            seen.add(w)
            if w in pred:
                out.add(w)  # endpoint reached; do not pass through the past
            else:
                stack.append(w)
    return frozenset(out)
