"""Brute-force reference solvers.

These are the trusted baselines every other solver is compared against, so
they deliberately share no code with the push-relabel/cost-scaling paths
beyond the input types: max-flow is recomputed with textbook shortest
augmenting paths, assignment by exhaustive permutation search.
"""

from __future__ import annotations

import itertools
from collections import deque

from .assign_scaling import AssignmentInstance
from .graph import FlowNetwork

ORACLE_SIZE_LIMIT = 9


def edmonds_karp(net: FlowNetwork) -> int:
    """Max-flow value by BFS shortest augmenting paths. O(V E^2), no heuristics.

    Keeps its own residual array; never touches ResidualState.
    """
    source = net.source
    sink = net.sink
    if source is None or sink is None:
        raise ValueError("network has no source/sink")
    residual = list(net.capacity)
    head = net.head
    total = 0

    while True:
        # BFS for the shortest residual s->t path, remembering entry arcs
        entry_arc = [-1] * net.node_count
        entry_arc[source] = -2
        queue = deque([source])
        while queue:
            x = queue.popleft()
            if x == sink:
                break
            for a in net.out_arcs[x]:
                y = head[a]
                if residual[a] > 0 and entry_arc[y] == -1:
                    entry_arc[y] = a
                    queue.append(y)
        if entry_arc[sink] == -1:
            return total

        # bottleneck along the recorded path
        delta = None
        y = sink
        while y != source:
            a = entry_arc[y]
            if delta is None or residual[a] < delta:
                delta = residual[a]
            y = net.tail[a]

        y = sink
        while y != source:
            a = entry_arc[y]
            residual[a] -= delta
            residual[a ^ 1] += delta
            y = net.tail[a]
        total += delta


def brute_force_assignment(
    inst: AssignmentInstance,
) -> tuple[int, list[int]] | None:
    """Exhaustive maximum-weight perfect matching.

    Returns (weight, matching) where matching[x] is the Y partner of x.
    Ties break toward the lexicographically smallest permutation.  Returns
    None when a sparse instance has no perfect matching.  Instances larger
    than 9 are rejected: 9! = 362880 permutations is the intended ceiling.
    """
    n = inst.n
    if n > ORACLE_SIZE_LIMIT:
        raise ValueError(f"oracle handles n <= {ORACLE_SIZE_LIMIT}, got {n}")

    rows: list[list[int | None]] = [[None] * n for _ in range(n)]
    for x, y, w in inst.edges:
        rows[x][y] = w

    best_weight: int | None = None
    best_perm: tuple[int, ...] | None = None
    if inst.complete:
        for perm in itertools.permutations(range(n)):
            weight = sum(row[y] for row, y in zip(rows, perm))
            if best_weight is None or weight > best_weight:
                best_weight = weight
                best_perm = perm
    else:
        for perm in itertools.permutations(range(n)):
            weight = 0
            feasible = True
            for x, y in enumerate(perm):
                w = rows[x][y]
                if w is None:
                    feasible = False
                    break
                weight += w
            if feasible and (best_weight is None or weight > best_weight):
                best_weight = weight
                best_perm = perm

    if best_weight is None:
        return None
    return best_weight, list(best_perm)
