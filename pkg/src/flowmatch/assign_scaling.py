"""Cost-scaling assignment solver (sequential path).

Maximum-weight perfect matching is reduced to min-cost flow: one unit-capacity
arc pair per bipartite edge, cost = negated weight pre-scaled by (n+1), and
supply-style excesses (+1 on the X side, -1 on the Y side) instead of an
explicit source/sink.  The scaling loop then repeatedly halves (by `alpha`)
an integral epsilon and re-optimizes: each refine removes all unfrozen flow,
resets X prices, and pushes unit flow along admissible arcs (reduced cost
< 0) or relabels prices until no node has positive excess.

With costs scaled by (n+1), the refine executed at epsilon == 1 certifies an
exactly optimal matching, so everything stays in exact integers.

Two heuristics accelerate refines and are exercised on every refine:
arc fixing freezes arc pairs whose reduced cost exceeds 2*n*epsilon, and the
price-update pass lowers prices along a Dial-style bucket scan from all
negative-excess nodes.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from .graph import (
    FlowNetwork,
    ResidualState,
    SolveReport,
    reduced_cost,
)

DEFAULT_ALPHA = 10
DEFAULT_ASSIGN_CYCLE = 500000

# Refine is O(n^2 m); a generous multiple of that bound only ever trips when
# prices diverge, which is how infeasible instances manifest.
OPS_BUDGET_FACTOR = 40
OPS_BUDGET_FLOOR = 10000

_UNSET = -1


class InfeasibleInstanceError(Exception):
    """The instance admits no perfect matching."""


@dataclass(frozen=True)
class AssignmentInstance:
    """Bipartite max-weight matching instance with |X| = |Y| = n.

    edges holds (x, y, weight) with both sides 0-indexed.  complete is True
    when every (x, y) pair is present.  Use build() so the flag and the
    validation are consistent.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    complete: bool

    @classmethod
    def build(cls, n: int, edges) -> "AssignmentInstance":
        if n < 1:
            raise ValueError(f"n must be at least 1, got {n}")
        seen: set[tuple[int, int]] = set()
        normalized: list[tuple[int, int, int]] = []
        for x, y, w in edges:
            if not (0 <= x < n):
                raise ValueError(f"edge ({x},{y}): x out of range [0, {n})")
            if not (0 <= y < n):
                raise ValueError(f"edge ({x},{y}): y out of range [0, {n})")
            if (x, y) in seen:
                raise ValueError(f"duplicate edge ({x},{y})")
            seen.add((x, y))
            normalized.append((int(x), int(y), int(w)))
        return cls(n=n, edges=tuple(normalized), complete=len(seen) == n * n)

    @classmethod
    def from_matrix(cls, weights) -> "AssignmentInstance":
        n = len(weights)
        edges = [(x, y, weights[x][y]) for x in range(n) for y in range(n)]
        return cls.build(n, edges)


def reduce_to_mincost(inst: AssignmentInstance) -> tuple[FlowNetwork, list[int]]:
    """Unit-capacity min-cost network for the instance, plus initial excesses.

    X nodes are 0..n-1, Y nodes n..2n-1.  Forward arcs carry cost
    -(weight * (n+1)) so minimizing cost maximizes weight and the final
    epsilon = 1 refine is exact.  No source or sink: supplies are +1 per X
    node and -1 per Y node.
    """
    n = inst.n
    scale = n + 1
    net = FlowNetwork(2 * n, None, None)
    for x, y, w in inst.edges:
        net.add_arc_pair(x, n + y, 1, -(w * scale))
    supplies = [1] * n + [-1] * n
    return net, supplies


@dataclass
class ScalingState:
    """Everything one cost-scaling solve mutates."""

    net: FlowNetwork
    instance: AssignmentInstance
    state: ResidualState
    supplies: list[int]
    epsilon: int
    alpha: int
    scaled_cost_bound: int  # largest |scaled cost| over all arcs
    fixed: list[bool] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.fixed:
            self.fixed = [False] * self.net.arc_count


@dataclass
class OpCounters:
    pushes: int = 0
    relabels: int = 0
    rounds: int = 0


def make_scaling_state(inst: AssignmentInstance, alpha: int = DEFAULT_ALPHA) -> ScalingState:
    if alpha < 2:
        raise ValueError(f"alpha must be at least 2, got {alpha}")
    net, supplies = reduce_to_mincost(inst)
    state = ResidualState.fresh(net)
    state.excess = list(supplies)
    bound = max((abs(c) for c in net.cost), default=0)
    return ScalingState(
        net=net,
        instance=inst,
        state=state,
        supplies=supplies,
        epsilon=max(1, bound),
        alpha=alpha,
        scaled_cost_bound=bound,
    )


def begin_refine(scaling: ScalingState) -> None:
    """Refine preamble: shrink epsilon, drop unfrozen flow, reset X prices.

    After this the pseudoflow is epsilon-optimal at the new epsilon: the only
    residual arcs are forward X->Y arcs, and each X price is set so its best
    arc sits at reduced cost exactly -epsilon.
    """
    net = scaling.net
    state = scaling.state
    fixed = scaling.fixed
    scaling.epsilon = max(1, -(-scaling.epsilon // scaling.alpha))
    epsilon = scaling.epsilon

    excess = list(scaling.supplies)
    for a in range(0, net.arc_count, 2):
        if fixed[a]:
            # frozen flow stays; account for it in the excesses
            flow = net.capacity[a] - state.residual[a]
            excess[net.tail[a]] -= flow
            excess[net.head[a]] += flow
        else:
            state.residual[a] = net.capacity[a]
            state.residual[a + 1] = 0
    state.excess = excess

    n = scaling.instance.n
    cost = net.cost
    price = state.price
    for x in range(n):
        best = None
        for a in net.out_arcs[x]:
            if fixed[a]:
                continue
            cpr = cost[a] - price[net.head[a]]
            if best is None or cpr < best:
                best = cpr
        if best is not None:
            price[x] = -(best + epsilon)


def arc_fix(scaling: ScalingState) -> int:
    """Freeze arc pairs whose reduced cost exceeds 2*n*epsilon.

    Such arcs can never change flow again while optimality is approached, so
    both directions are dropped from every later residual scan.  Sound only
    when every node's excess is zero (the argument compares flows, and an
    epsilon-optimal flow already carries each such arc's forced value), so
    this runs at refine completion, never right after the flow removal.
    Returns the number of pairs fixed by this call.
    """
    net = scaling.net
    state = scaling.state
    fixed = scaling.fixed
    threshold = 2 * scaling.instance.n * scaling.epsilon
    count = 0
    for a in range(net.arc_count):
        if not fixed[a] and reduced_cost(net, state, a) > threshold:
            fixed[a] = True
            fixed[a ^ 1] = True
            count += 1
    return count


def price_update_heuristic(scaling: ScalingState, validate: bool = False) -> None:
    """Dial-bucket backward scan from negative-excess nodes, lowering prices.

    Nodes are labeled by the bucket index at which the scan reached them
    (negative-excess nodes sit in bucket 0 and keep their price); prices drop
    by epsilon * label, and by epsilon * (last + 1) for nodes the scan never
    reached, where last is the highest bucket that retired an active node.
    No-op when there is no negative-excess node or no active node.
    Preserves epsilon-optimality.
    """
    net = scaling.net
    state = scaling.state
    fixed = scaling.fixed
    epsilon = scaling.epsilon
    excess = state.excess
    residual = state.residual
    price = state.price
    node_count = net.node_count

    remaining_active = sum(1 for x in range(node_count) if excess[x] > 0)
    negatives = [x for x in range(node_count) if excess[x] < 0]
    if remaining_active == 0 or not negatives:
        return

    max_bucket = scaling.scaled_cost_bound // epsilon + 2
    unreached = max_bucket + 1
    bucket_of = [unreached] * node_count
    labels = [_UNSET] * node_count
    buckets: list[deque[int]] = [deque() for _ in range(max_bucket + 1)]
    for x in negatives:
        bucket_of[x] = 0
        buckets[0].append(x)

    last = 0
    index = 0
    while remaining_active > 0 and index <= max_bucket:
        queue = buckets[index]
        while queue:
            x = queue.popleft()
            if labels[x] != _UNSET or bucket_of[x] != index:
                continue  # stale entry superseded by a smaller bucket
            # scan residual arcs INTO x (each is the mate of an out-arc of x)
            for a in net.out_arcs[x]:
                mate = a ^ 1
                if residual[mate] <= 0 or fixed[mate]:
                    continue
                y = net.head[a]
                if labels[y] != _UNSET:
                    continue
                candidate = index + reduced_cost(net, state, mate) // epsilon + 1
                if candidate < index:
                    candidate = index
                if candidate > max_bucket:
                    # slack too large to matter; treated as never reached
                    continue
                if candidate < bucket_of[y]:
                    bucket_of[y] = candidate
                    buckets[candidate].append(y)
            labels[x] = index
            if excess[x] > 0:
                remaining_active -= 1
                last = index
        index += 1

    for x in range(node_count):
        drop = labels[x] if labels[x] != _UNSET else last + 1
        if validate and drop < 0:
            raise AssertionError(f"price update would raise price of node {x}")
        price[x] -= epsilon * drop


def _push_relabel_seq(
    scaling: ScalingState,
    counters: OpCounters,
    ops_budget: int,
    validate: bool,
) -> None:
    """Push/relabel until no positive excess remains (one refine's main loop)."""
    net = scaling.net
    state = scaling.state
    fixed = scaling.fixed
    epsilon = scaling.epsilon
    excess = state.excess
    residual = state.residual
    price = state.price
    cost = net.cost
    head = net.head
    node_count = net.node_count

    queue: deque[int] = deque(x for x in range(node_count) if excess[x] > 0)
    in_queue = [False] * node_count
    for x in queue:
        in_queue[x] = True

    ops = 0
    while queue:
        x = queue.popleft()
        in_queue[x] = False
        while excess[x] > 0:
            best = None
            best_arc = -1
            for a in net.out_arcs[x]:
                if residual[a] <= 0 or fixed[a]:
                    continue
                cpr = cost[a] - price[head[a]]
                if best is None or cpr < best:
                    best = cpr
                    best_arc = a
            if best is None:
                raise InfeasibleInstanceError(
                    f"node {x} holds excess but has no residual arcs"
                )
            if best < -price[x]:
                # admissible: unit push
                residual[best_arc] -= 1
                residual[best_arc ^ 1] += 1
                excess[x] -= 1
                y = head[best_arc]
                excess[y] += 1
                counters.pushes += 1
                if excess[y] > 0 and not in_queue[y]:
                    queue.append(y)
                    in_queue[y] = True
            else:
                new_price = -(best + epsilon)
                if validate and new_price >= price[x]:
                    raise AssertionError(
                        f"relabel failed to lower price of node {x}"
                    )
                price[x] = new_price
                counters.relabels += 1
            ops += 1
            if ops > ops_budget:
                raise InfeasibleInstanceError(
                    "operation budget exceeded; prices diverge, "
                    "instance admits no perfect matching"
                )


def refine_seq(
    scaling: ScalingState,
    counters: OpCounters | None = None,
    *,
    use_price_update: bool = True,
    use_arc_fix: bool = True,
    validate: bool = False,
) -> ScalingState:
    """One sequential scaling phase: preamble, heuristics, push/relabel.

    Each heuristic runs once per refine at the point where it is sound and
    useful: the price update right after the reset (the pseudoflow is freshly
    epsilon-optimal and every Y node still carries negative excess), arc
    fixing at completion (all excesses zero, so the flow-comparison argument
    behind the threshold applies).
    """
    if counters is None:
        counters = OpCounters()
    begin_refine(scaling)
    if use_price_update:
        price_update_heuristic(scaling, validate=validate)
    _push_relabel_seq(scaling, counters, _ops_budget(scaling), validate)
    if use_arc_fix:
        arc_fix(scaling)
    return scaling


def _ops_budget(scaling: ScalingState) -> int:
    n = scaling.instance.n
    m = max(1, len(scaling.instance.edges))
    return max(OPS_BUDGET_FLOOR, OPS_BUDGET_FACTOR * n * n * m)


def extract_matching(scaling: ScalingState) -> list[int]:
    """Read the perfect matching off saturated forward arcs."""
    net = scaling.net
    state = scaling.state
    n = scaling.instance.n
    matching = [-1] * n
    matched_y = [False] * n
    for a in range(0, net.arc_count, 2):
        if state.residual[a] == 0 and net.capacity[a] == 1:
            x = net.tail[a]
            y = net.head[a] - n
            if matching[x] != -1 or matched_y[y]:
                raise AssertionError("flow does not encode a matching")
            matching[x] = y
            matched_y[y] = True
    if any(y == -1 for y in matching):
        raise AssertionError("flow does not cover every node")
    return matching


def min_cost_loop(
    scaling: ScalingState,
    *,
    mode: str = "seq",
    worker_count: int = 1,
    cycle_budget: int = DEFAULT_ASSIGN_CYCLE,
    use_price_update: bool = True,
    use_arc_fix: bool = True,
    heuristic_every_k: int | None = None,
    validate: bool = False,
    on_refine_end=None,
    observer=None,
) -> tuple[SolveReport, list[int]]:
    """Run refines at epsilon, epsilon/alpha, ... down to and including 1.

    Returns the solve report (objective = matching weight in original units)
    and the matching as a list mapping each X node to its Y partner.  Raises
    InfeasibleInstanceError when no perfect matching exists.

    on_refine_end(scaling) is called after every refine (quiescent point);
    observer is forwarded to the parallel refine's coordinator.
    """
    if mode not in ("seq", "par"):
        raise ValueError(f"unknown mode {mode!r}")
    counters = OpCounters()
    started = time.perf_counter()
    while True:
        if mode == "seq":
            refine_seq(
                scaling,
                counters,
                use_price_update=use_price_update,
                use_arc_fix=use_arc_fix,
                validate=validate,
            )
            counters.rounds += 1
        else:
            from .assign_par import refine_par

            begin_refine(scaling)
            refine_par(
                scaling,
                worker_count,
                cycle_budget,
                counters=counters,
                use_price_update=use_price_update,
                use_arc_fix=use_arc_fix,
                heuristic_every_k=heuristic_every_k,
                validate=validate,
                observer=observer,
            )
        if on_refine_end is not None:
            on_refine_end(scaling)
        if scaling.epsilon == 1:
            break

    matching = extract_matching(scaling)
    weights = {(x, y): w for x, y, w in scaling.instance.edges}
    objective = sum(weights[(x, matching[x])] for x in range(scaling.instance.n))
    elapsed = time.perf_counter() - started
    report = SolveReport(
        objective=objective,
        pushes=counters.pushes,
        relabels=counters.relabels,
        rounds=counters.rounds,
        elapsed=elapsed,
    )
    return report, matching


def solve_assignment(
    inst: AssignmentInstance,
    *,
    mode: str = "seq",
    worker_count: int = 1,
    cycle_budget: int = DEFAULT_ASSIGN_CYCLE,
    alpha: int = DEFAULT_ALPHA,
    use_price_update: bool = True,
    use_arc_fix: bool = True,
    heuristic_every_k: int | None = None,
    validate: bool = False,
    on_refine_end=None,
    observer=None,
) -> tuple[SolveReport, list[int]]:
    """Build the scaling state for inst and run the full loop."""
    scaling = make_scaling_state(inst, alpha=alpha)
    return min_cost_loop(
        scaling,
        mode=mode,
        worker_count=worker_count,
        cycle_budget=cycle_budget,
        use_price_update=use_price_update,
        use_arc_fix=use_arc_fix,
        heuristic_every_k=heuristic_every_k,
        validate=validate,
        on_refine_end=on_refine_end,
        observer=observer,
    )
