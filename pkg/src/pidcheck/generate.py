"""Seeded random diagram generators for the property and differential
suites.  Everything is a deterministic function of the supplied rng."""
from __future__ import annotations

import numpy as np

from .model import Diagram, Kind, Node, validate_nodes
from .ordering import InconsistentOrder, enumerate_schemas, induce_partial_order

BIN = ("s1", "s2")
ACT = ("d1", "d2")


def random_pid(
    rng: np.random.Generator,
    max_carrier: int = 8,
    min_decisions: int = 1,
    max_decisions: int = 3,
    n_values: int = 1,
    p_arc: float = 0.4,
) -> Diagram:
    """Random partial influence diagram with binary states and a consistent
    induced order.  Arcs only run forward along a hidden shuffle, so the
    graph is acyclic by construction; inconsistent induced orders (possible
    for valid diagrams) are resampled."""
    while True:
        n_dec = int(rng.integers(min_decisions, max_decisions + 1))
        n_dec = min(n_dec, max_carrier - 1)
        n_chance = int(rng.integers(1, max(2, max_carrier - n_dec + 1)))
        n_chance = max(1, min(n_chance, max_carrier - n_dec))
        labels = [f"X{i}" for i in range(n_chance)] + [f"D{i}" for i in range(n_dec)]
        kinds = [Kind.CHANCE] * n_chance + [Kind.DECISION] * n_dec
        order = rng.permutation(len(labels))
        seq = [(labels[i], kinds[i]) for i in order]
        nodes: list[Node] = []
        for pos, (label, kind) in enumerate(seq):
            parents = [
                seq[j][0] for j in range(pos) if rng.random() < p_arc
            ]
            states = BIN if kind is Kind.CHANCE else ACT
            nodes.append(Node(label, kind, states, tuple(parents)))
        carrier_labels = [label for label, _ in seq]
        for v in range(n_values):
            k = int(rng.integers(1, min(3, len(carrier_labels)) + 1))
            picks = list(rng.choice(len(carrier_labels), size=k, replace=False))
            nodes.append(
                Node(f"U{v}", Kind.VALUE, None, tuple(carrier_labels[i] for i in picks))
            )
        d = validate_nodes(nodes)
        try:
            induce_partial_order(d)
        except InconsistentOrder:
            continue
        return d


def random_classic_id(
    rng: np.random.Generator,
    max_decisions: int = 4,
    max_chance: int = 4,
    n_values: int = 2,
) -> Diagram:
    """Random classic influence diagram: decisions chained by informational
    arcs, every chance node either observed before one decision or never,
    binary states throughout.  The induced order admits exactly one schema.
    """
    n_dec = int(rng.integers(1, max_decisions + 1))
    n_chance = int(rng.integers(1, max_chance + 1))
    decisions = [f"D{i}" for i in range(n_dec)]
    chance = [f"X{i}" for i in range(n_chance)]
    nodes: list[Node] = []
    slots = {c: int(rng.integers(0, n_dec + 1)) for c in chance}
    placed: list[str] = []
    for c in sorted(chance, key=lambda c: slots[c]):
        # Parents limited to chance in earlier-or-equal slots and decisions
        # before this node's slot, so all derived precedences stay chained.
        candidates = placed + decisions[: slots[c]]
        parents = [p for p in candidates if rng.random() < 0.4]
        nodes.append(Node(c, Kind.CHANCE, BIN, tuple(parents)))
        placed.append(c)
    for i, dec in enumerate(decisions):
        parents = [c for c in chance if slots[c] == i]
        if i > 0:
            parents.append(decisions[i - 1])
        nodes.append(Node(dec, Kind.DECISION, ACT, tuple(parents)))
    pool = chance + decisions
    for v in range(n_values):
        k = int(rng.integers(1, min(3, len(pool)) + 1))
        picks = list(rng.choice(len(pool), size=k, replace=False))
        nodes.append(Node(f"U{v}", Kind.VALUE, None, tuple(pool[i] for i in picks)))
    d = validate_nodes(nodes)
    schemas = list(enumerate_schemas(d))
    assert len(schemas) == 1, "classic construction must force a unique schema"
    return d
