"""Sequential push-relabel max-flow with global and gap relabeling.

The solver keeps a preflow and a height labeling.  Active nodes (positive
excess, not source or sink) push along arcs that step exactly one level down
(height of tail == height of head + 1) or raise their own height to one more
than their lowest residual neighbor.  When no active node remains, the excess
at the sink is the max-flow value.

Two height heuristics keep the labeling sharp: a backward breadth-first scan
from the sink recomputes exact residual distances (global relabel), and any
node the scan missed is lifted to at least node_count (gap relabel), which
writes off nodes that can only return flow to the source.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from enum import Enum

from .graph import FlowNetwork, ResidualState, SolveReport


class DischargeKind(Enum):
    PUSHED = "pushed"
    RELABELED = "relabeled"
    INACTIVE = "inactive"
    TRAPPED = "trapped"


@dataclass(frozen=True)
class DischargeResult:
    """Outcome of a single discharge step.

    PUSHED carries the arc index and the amount moved; RELABELED carries the
    new height; TRAPPED means the node has no residual arcs at all and was
    parked at height 2 * node_count; INACTIVE means there was no excess.
    """

    kind: DischargeKind
    arc: int = -1
    delta: int = 0
    new_height: int = 0


def init_preflow(net: FlowNetwork, state: ResidualState) -> None:
    """Saturate every source out-arc, zero the source excess, lift the source.

    Self-loops at the source are skipped: they would only create excess that
    the source zeroing erases again.
    """
    s = net.source
    for a in net.out_arcs[s]:
        if a % 2 == 1 or net.head[a] == s:
            continue
        flow = net.capacity[a]
        if flow <= 0:
            continue
        state.residual[a] -= flow
        state.residual[a ^ 1] += flow
        state.excess[net.head[a]] += flow
    state.excess[s] = 0
    state.height[s] = net.node_count


def discharge(
    net: FlowNetwork,
    state: ResidualState,
    x: int,
    current_arc: list[int] | None = None,
) -> DischargeResult:
    """Perform exactly one push or relabel at node x.

    Pushes go to the first eligible arc (residual capacity and a one-level
    height drop) in adjacency order, resuming from the node's current-arc
    pointer when one is supplied.  If nothing is eligible the node is lifted
    to one above its lowest residual neighbor.  A node with excess but no
    residual arcs at all is parked at height 2 * node_count (TRAPPED).
    """
    if state.excess[x] <= 0:
        return DischargeResult(DischargeKind.INACTIVE)

    arcs = net.out_arcs[x]
    residual = state.residual
    height = state.height
    head = net.head
    hx = height[x]

    start = current_arc[x] if current_arc is not None else 0
    for i in range(start, len(arcs)):
        a = arcs[i]
        if residual[a] > 0 and hx == height[head[a]] + 1:
            delta = min(state.excess[x], residual[a])
            residual[a] -= delta
            residual[a ^ 1] += delta
            state.excess[x] -= delta
            state.excess[head[a]] += delta
            if current_arc is not None:
                current_arc[x] = i
            return DischargeResult(DischargeKind.PUSHED, arc=a, delta=delta)

    lowest = None
    for a in arcs:
        if residual[a] > 0:
            hy = height[head[a]]
            if lowest is None or hy < lowest:
                lowest = hy
    if lowest is None:
        height[x] = 2 * net.node_count
        return DischargeResult(DischargeKind.TRAPPED, new_height=height[x])

    height[x] = lowest + 1
    if current_arc is not None:
        current_arc[x] = 0
    return DischargeResult(DischargeKind.RELABELED, new_height=height[x])


def global_relabel(net: FlowNetwork, state: ResidualState) -> list[bool]:
    """Set heights to exact residual distances from the sink (backward BFS).

    Returns the scanned flags; nodes the scan never reached keep their height
    and are left for gap_relabel.  The source is pre-marked scanned and never
    traversed (its height stays node_count).
    """
    height = state.height
    residual = state.residual
    scanned = [False] * net.node_count
    scanned[net.source] = True
    scanned[net.sink] = True
    height[net.sink] = 0
    queue = deque([net.sink])
    while queue:
        x = queue.popleft()
        level = height[x] + 1
        for a in net.out_arcs[x]:
            # the mate of an out-arc of x is an arc INTO x
            if residual[a ^ 1] <= 0:
                continue
            y = net.head[a]
            if scanned[y]:
                continue
            scanned[y] = True
            height[y] = level
            queue.append(y)
    return scanned


def gap_relabel(net: FlowNetwork, state: ResidualState, scanned: list[bool]) -> None:
    """Lift every unscanned node to at least node_count.

    Unscanned nodes cannot reach the sink, so any flow they hold can only
    return to the source; heights already above node_count are kept (a node
    climbing toward the source must never be pulled back down).
    """
    floor = net.node_count
    height = state.height
    for x in range(net.node_count):
        if not scanned[x] and x != net.source and height[x] < floor:
            height[x] = floor


def solve_maxflow_seq(
    net: FlowNetwork,
    heuristic_period: int | None = None,
    observer=None,
) -> SolveReport:
    """Run the sequential solver to completion and report the flow value.

    heuristic_period is the number of relabel operations between global
    relabel passes (default: node_count).  observer, when given, is called as
    observer(net, state, scanned) right after every global+gap relabel pass.
    """
    if net.source is None or net.sink is None:
        raise ValueError("network has no source/sink")
    period = net.node_count if heuristic_period is None else heuristic_period
    if period < 1:
        raise ValueError(f"heuristic_period must be positive, got {period}")

    started = time.perf_counter()
    state = ResidualState.fresh(net)
    init_preflow(net, state)

    current_arc = [0] * net.node_count
    in_queue = [False] * net.node_count
    queue: deque[int] = deque()
    for x in range(net.node_count):
        if state.excess[x] > 0 and x != net.source and x != net.sink:
            queue.append(x)
            in_queue[x] = True

    pushes = 0
    relabels = 0
    global_passes = 0
    relabels_since = 0

    def run_heuristics() -> None:
        nonlocal global_passes
        scanned = global_relabel(net, state)
        gap_relabel(net, state, scanned)
        for i in range(net.node_count):
            current_arc[i] = 0
        global_passes += 1
        if observer is not None:
            observer(net, state, scanned)

    while queue:
        x = queue.popleft()
        in_queue[x] = False
        while state.excess[x] > 0:
            result = discharge(net, state, x, current_arc)
            if result.kind is DischargeKind.PUSHED:
                pushes += 1
                y = net.head[result.arc]
                if (
                    state.excess[y] > 0
                    and y != net.source
                    and y != net.sink
                    and not in_queue[y]
                ):
                    queue.append(y)
                    in_queue[y] = True
            elif result.kind is DischargeKind.RELABELED:
                relabels += 1
                relabels_since += 1
                if relabels_since >= period:
                    relabels_since = 0
                    run_heuristics()
            else:  # TRAPPED: strand the excess and drop the node
                break

    elapsed = time.perf_counter() - started
    return SolveReport(
        objective=state.excess[net.sink],
        pushes=pushes,
        relabels=relabels,
        rounds=global_passes,
        elapsed=elapsed,
    )
