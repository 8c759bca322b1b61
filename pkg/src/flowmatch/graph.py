"""Directed flow network with paired reverse arcs, and the shared solver state.

Every solver in this package works on the same two objects: an immutable
:class:`FlowNetwork` built once from an edge list, and a mutable
:class:`ResidualState` holding per-arc residual capacities plus per-node
excess, height (max-flow mode) and price (assignment mode).

Arcs are stored in a forward-star layout.  Each input arc occupies an even
index ``2k`` and its reverse partner sits adjacently at ``2k+1`` (capacity 0,
negated cost), so ``reverse_of(a) == a ^ 1`` and a push touches adjacent
entries of the residual array.  Adjacency lists keep arcs in input order,
which makes every sequential code path deterministic.

All quantities are exact integers.  Flow is never stored explicitly: the
flow on arc ``a`` is ``capacity(a) - residual(a)``.
"""

from __future__ import annotations

from dataclasses import dataclass


class NetworkError(ValueError):
    """Invalid network construction input."""


@dataclass(frozen=True, slots=True)
class SolveReport:
    """Outcome of one solver run.

    objective is the flow value (max-flow) or matching weight (assignment).
    rounds counts global-relabel passes for the sequential solver and
    coordinator rounds for the parallel solvers.  elapsed is wall seconds.
    """

    objective: int
    pushes: int = 0
    relabels: int = 0
    rounds: int = 0
    elapsed: float = 0.0


class FlowNetwork:
    """Immutable directed graph with unit-indexed arc pairs.

    Use :func:`build_network` to construct one; the constructor itself does
    no validation beyond sizing the adjacency table.
    """

    __slots__ = ("node_count", "source", "sink", "tail", "head",
                 "capacity", "cost", "out_arcs")

    def __init__(self, node_count: int, source: int | None, sink: int | None):
        self.node_count = node_count
        self.source = source
        self.sink = sink
        self.tail: list[int] = []
        self.head: list[int] = []
        self.capacity: list[int] = []
        self.cost: list[int] = []
        self.out_arcs: list[list[int]] = [[] for _ in range(node_count)]

    @property
    def arc_count(self) -> int:
        return len(self.tail)

    def reverse_of(self, a: int) -> int:
        """Index of the paired reverse arc (pairs are stored adjacently)."""
        return a ^ 1

    def add_arc_pair(self, tail: int, head: int, capacity: int, cost: int = 0) -> int:
        """Append one arc and its zero-capacity reverse; returns the forward index."""
        a = len(self.tail)
        self.tail.append(tail)
        self.head.append(head)
        self.capacity.append(capacity)
        self.cost.append(cost)
        self.tail.append(head)
        self.head.append(tail)
        self.capacity.append(0)
        self.cost.append(-cost)
        self.out_arcs[tail].append(a)
        self.out_arcs[head].append(a + 1)
        return a


def build_network(
    edge_list,
    node_count: int,
    source: int,
    sink: int,
) -> FlowNetwork:
    """Build a validated FlowNetwork from (tail, head, capacity[, cost]) tuples.

    Every input arc gets a paired reverse arc with capacity 0 and negated
    cost.  Arc indexing and adjacency order follow the input order exactly,
    so identical input yields an identical network.

    Raises NetworkError with a distinct message for an out-of-range node id,
    a negative capacity, or source == sink.
    """
    if node_count < 2:
        raise NetworkError(f"node_count must be at least 2, got {node_count}")
    if not (0 <= source < node_count):
        raise NetworkError(f"source id {source} out of range [0, {node_count})")
    if not (0 <= sink < node_count):
        raise NetworkError(f"sink id {sink} out of range [0, {node_count})")
    if source == sink:
        raise NetworkError(f"source and sink must differ, both are {source}")

    net = FlowNetwork(node_count, source, sink)
    for i, edge in enumerate(edge_list):
        if len(edge) == 3:
            tail, head, capacity = edge
            cost = 0
        else:
            tail, head, capacity, cost = edge
        if not (0 <= tail < node_count):
            raise NetworkError(f"arc {i}: tail id {tail} out of range [0, {node_count})")
        if not (0 <= head < node_count):
            raise NetworkError(f"arc {i}: head id {head} out of range [0, {node_count})")
        if capacity < 0:
            raise NetworkError(f"arc {i}: negative capacity {capacity}")
        net.add_arc_pair(tail, head, capacity, cost)
    return net


@dataclass(slots=True)
class ResidualState:
    """Mutable solver state shared by all phases.

    residual[a] is the remaining capacity of arc a; excess[x] the node
    imbalance (negative values mark pseudoflow deficits); height drives
    max-flow pushes, price drives assignment pushes.
    """

    residual: list[int]
    excess: list[int]
    height: list[int]
    price: list[int]

    @classmethod
    def fresh(cls, net: FlowNetwork) -> "ResidualState":
        """Zero-flow state: residuals equal capacities, everything else 0."""
        n = net.node_count
        return cls(
            residual=list(net.capacity),
            excess=[0] * n,
            height=[0] * n,
            price=[0] * n,
        )

    def flow_on(self, net: FlowNetwork, a: int) -> int:
        return net.capacity[a] - self.residual[a]


def reduced_cost(net: FlowNetwork, state: ResidualState, a: int) -> int:
    """cost(a) + price(tail) - price(head)."""
    return net.cost[a] + state.price[net.tail[a]] - state.price[net.head[a]]


def part_reduced_cost(net: FlowNetwork, state: ResidualState, a: int) -> int:
    """cost(a) - price(head); the tail price is added back by the caller."""
    return net.cost[a] - state.price[net.head[a]]


def is_epsilon_optimal(
    net: FlowNetwork,
    state: ResidualState,
    epsilon: int,
    fixed: list[bool] | None = None,
) -> bool:
    """True iff every residual arc has reduced cost >= -epsilon.

    Arcs flagged in ``fixed`` are logically removed from the residual graph
    (frozen flow) and skipped.
    """
    residual = state.residual
    for a in range(net.arc_count):
        if residual[a] <= 0:
            continue
        if fixed is not None and fixed[a]:
            continue
        if reduced_cost(net, state, a) < -epsilon:
            return False
    return True
