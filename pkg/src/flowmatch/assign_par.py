"""Lock-free parallel refine for the cost-scaling assignment solver.

Workers sweep their statically striped share of the nodes (id modulo worker
count over both sides of the bipartition).  An active node either pushes one
unit along its cheapest residual arc when that arc is admissible (reduced
cost below zero, checked as min part-reduced cost < -price), using four
atomic updates, or lowers its own price to -(min part-reduced cost + epsilon)
with an owner-only write.  Prices only ever fall, so stale reads by other
workers are conservative.

A coordinator joins all workers between rounds; with everything quiescent it
runs the arc-fixing and price-update heuristics (once, after the first
round, plus an optional every-k-rounds schedule) and re-checks for active
nodes.  A round in which no worker could do anything while active nodes
remain means the instance has no perfect matching, as does blowing the
per-refine operation budget (diverging prices).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .atomics import AtomicIntView
from .assign_scaling import (
    DEFAULT_ASSIGN_CYCLE,
    InfeasibleInstanceError,
    OpCounters,
    ScalingState,
    _ops_budget,
    arc_fix,
    price_update_heuristic,
)


@dataclass
class RoundStats:
    """One worker's tallies for a single round."""

    pushes: int = 0
    relabels: int = 0
    price_writes: set[int] = field(default_factory=set)


def lockfree_refine_round(
    scaling: ScalingState,
    owned: list[int] | None = None,
    cycle_budget: int = DEFAULT_ASSIGN_CYCLE,
    excess_view: AtomicIntView | None = None,
    residual_view: AtomicIntView | None = None,
    validate: bool = False,
) -> RoundStats:
    """One worker's round over its owned nodes; returns its operation tallies.

    Per pass, every owned node with positive excess gets one operation: scan
    the non-fixed residual out-arcs for the minimum part-reduced cost; push a
    unit if that beats -price (four atomic updates), else relabel (owner-only
    price write).  A pass with nothing to do ends the round early.
    """
    net = scaling.net
    state = scaling.state
    fixed = scaling.fixed
    epsilon = scaling.epsilon
    if owned is None:
        owned = list(range(net.node_count))
    if excess_view is None:
        excess_view = AtomicIntView(state.excess)
    if residual_view is None:
        residual_view = AtomicIntView(state.residual)

    price = state.price
    cost = net.cost
    head = net.head
    out_arcs = net.out_arcs
    stats = RoundStats()

    for _ in range(cycle_budget):
        progressed = False
        for x in owned:
            if excess_view.load(x) <= 0:
                continue
            best = None
            best_arc = -1
            for a in out_arcs[x]:
                if fixed[a] or residual_view.load(a) <= 0:
                    continue
                cpr = cost[a] - price[head[a]]
                if best is None or cpr < best:
                    best = cpr
                    best_arc = a
            if best is None:
                continue  # stalled node; the coordinator decides what it means
            if best < -price[x]:
                residual_view.fetch_add(best_arc, -1)
                residual_view.fetch_add(best_arc ^ 1, 1)
                excess_view.fetch_add(x, -1)
                excess_view.fetch_add(head[best_arc], 1)
                stats.pushes += 1
            else:
                new_price = -(best + epsilon)
                if validate:
                    if new_price >= price[x]:
                        raise AssertionError(
                            f"relabel failed to lower price of node {x}"
                        )
                    stats.price_writes.add(x)
                price[x] = new_price
                stats.relabels += 1
            progressed = True
        if not progressed:
            break
    return stats


def refine_par(
    scaling: ScalingState,
    worker_count: int = 1,
    cycle_budget: int = DEFAULT_ASSIGN_CYCLE,
    *,
    counters: OpCounters | None = None,
    use_price_update: bool = True,
    use_arc_fix: bool = True,
    heuristic_every_k: int | None = None,
    validate: bool = False,
    observer=None,
) -> ScalingState:
    """Parallel refine: rounds of worker sweeps until no node holds excess.

    Expects the refine preamble (epsilon update, flow removal, price reset)
    to have run already.  The price update fires after the first round at the
    quiesced coordinator (plus every heuristic_every_k rounds when set); arc
    fixing fires at the coordinator point where no excess remains, the only
    point where its flow-comparison threshold is sound.  With the default
    cycle budget the first round usually completes the refine and both fire
    together, at the same place the launch-bounded original put them.
    observer(scaling) is called at every coordinator observation point.
    Raises InfeasibleInstanceError when active nodes stall or the operation
    budget is exhausted.
    """
    if worker_count < 1:
        raise ValueError(f"worker_count must be at least 1, got {worker_count}")
    if cycle_budget < 1:
        raise ValueError(f"cycle_budget must be at least 1, got {cycle_budget}")
    if counters is None:
        counters = OpCounters()

    net = scaling.net
    excess = scaling.state.excess
    node_count = net.node_count
    excess_view = AtomicIntView(scaling.state.excess)
    residual_view = AtomicIntView(scaling.state.residual)

    owned_lists = [
        [x for x in range(node_count) if x % worker_count == w]
        for w in range(worker_count)
    ]
    owned_lists = [owned for owned in owned_lists if owned]

    ops_budget = _ops_budget(scaling)
    ops_used = 0
    round_index = 0
    while True:
        if not any(excess[x] > 0 for x in range(node_count)):
            # entry with nothing to do stays a strict no-op
            if round_index > 0:
                if use_arc_fix:
                    arc_fix(scaling)
                if observer is not None:
                    observer(scaling)
            break
        round_index += 1
        results: list[RoundStats | None] = [None] * len(owned_lists)
        failures: list[BaseException] = []

        def run_worker(slot: int, owned: list[int]) -> None:
            try:
                results[slot] = lockfree_refine_round(
                    scaling,
                    owned,
                    cycle_budget,
                    excess_view,
                    residual_view,
                    validate,
                )
            except BaseException as exc:
                failures.append(exc)

        threads = [
            threading.Thread(target=run_worker, args=(slot, owned))
            for slot, owned in enumerate(owned_lists)
        ]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        if failures:
            raise failures[0]

        round_ops = 0
        if validate:
            writers_seen: set[int] = set()
        for stats in results:
            if stats is None:
                continue
            counters.pushes += stats.pushes
            counters.relabels += stats.relabels
            round_ops += stats.pushes + stats.relabels
            if validate:
                overlap = writers_seen & stats.price_writes
                if overlap:
                    raise AssertionError(
                        f"price words written by two workers: {sorted(overlap)}"
                    )
                writers_seen |= stats.price_writes
        counters.rounds += 1

        if round_ops == 0:
            raise InfeasibleInstanceError(
                "active nodes stalled with no usable residual arcs"
            )
        ops_used += round_ops
        if ops_used > ops_budget:
            raise InfeasibleInstanceError(
                "operation budget exceeded; prices diverge, "
                "instance admits no perfect matching"
            )

        run_price_update = round_index == 1 or (
            heuristic_every_k is not None
            and heuristic_every_k > 0
            and round_index % heuristic_every_k == 0
        )
        if run_price_update and use_price_update:
            price_update_heuristic(scaling, validate=validate)
        if observer is not None:
            observer(scaling)
    return scaling
