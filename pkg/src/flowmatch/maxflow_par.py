"""Lock-free multi-worker push-relabel wrapped in coordinated rounds.

Workers run bounded rounds of atomic pushes and owner-only relabels over
statically striped node sets (node id modulo worker count).  Between rounds a
single coordinator, with all workers joined, cancels any stale-read height
violations by saturating the offending arcs, recomputes exact heights with a
backward scan from the sink, lifts and writes off nodes that can no longer
reach it (subtracting their excess from the amount still in play), and stops
once the source and sink together hold everything that is left.

Shared excess and residual words are only ever modified through atomic
fetch-adds during a round; heights are written solely by the owning worker.
Stale reads are tolerated by design: a stale height can delay progress or
cause a temporarily too-steep push, never corrupt the pair sums the
coordinator relies on.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from .atomics import AtomicIntView
from .graph import FlowNetwork, ResidualState, SolveReport
from .maxflow_seq import gap_relabel, global_relabel, init_preflow

DEFAULT_CYCLE_BUDGET = 7000


@dataclass
class HybridState:
    """Shared solver state plus the coordinator's excess accounting."""

    state: ResidualState
    excess_total: int
    cycle_budget: int = DEFAULT_CYCLE_BUDGET
    worker_count: int = 1
    marked: list[bool] = field(default_factory=list)
    excess_view: AtomicIntView | None = None
    residual_view: AtomicIntView | None = None


def hybrid_init(
    net: FlowNetwork,
    worker_count: int = 1,
    cycle_budget: int = DEFAULT_CYCLE_BUDGET,
) -> HybridState:
    """Preflow-initialize shared state and record the total excess in play."""
    if net.source is None or net.sink is None:
        raise ValueError("network has no source/sink")
    state = ResidualState.fresh(net)
    init_preflow(net, state)
    return HybridState(
        state=state,
        excess_total=sum(state.excess),
        cycle_budget=cycle_budget,
        worker_count=worker_count,
        marked=[False] * net.node_count,
        excess_view=AtomicIntView(state.excess),
        residual_view=AtomicIntView(state.residual),
    )


def lockfree_round(
    net: FlowNetwork,
    hybrid: HybridState,
    owned: list[int] | None = None,
) -> tuple[int, int]:
    """One worker's round: up to cycle_budget passes over its owned nodes.

    Per pass, each owned node with positive excess and height below
    node_count gets exactly one operation: a push of min(excess, residual)
    toward its lowest residual neighbor when it sits strictly above it
    (four atomic updates), otherwise an owner-only relabel to one above that
    neighbor.  A pass that finds nothing to do ends the round early; the
    coordinator re-launches rounds until the excess accounting says done.
    Returns (pushes, relabels).
    """
    if owned is None:
        owned = [
            x
            for x in range(net.node_count)
            if x != net.source and x != net.sink
        ]
    excess_view = hybrid.excess_view
    residual_view = hybrid.residual_view
    height = hybrid.state.height
    head = net.head
    out_arcs = net.out_arcs
    node_count = net.node_count

    pushes = 0
    relabels = 0
    for _ in range(hybrid.cycle_budget):
        progressed = False
        for x in owned:
            e = excess_view.load(x)
            if e <= 0:
                continue
            hx = height[x]
            if hx >= node_count:
                continue
            best_h = None
            best_arc = -1
            for a in out_arcs[x]:
                if residual_view.load(a) > 0:
                    hy = height[head[a]]
                    if best_h is None or hy < best_h:
                        best_h = hy
                        best_arc = a
            if best_h is None:
                continue  # nothing residual; the coordinator writes it off
            if hx > best_h:
                # only the owner ever lowers these two words, so the loads
                # are conservative and the push can never overdraw
                delta = min(e, residual_view.load(best_arc))
                excess_view.fetch_add(x, -delta)
                residual_view.fetch_add(best_arc, -delta)
                residual_view.fetch_add(best_arc ^ 1, delta)
                excess_view.fetch_add(head[best_arc], delta)
                pushes += 1
            else:
                height[x] = best_h + 1
                relabels += 1
            progressed = True
        if not progressed:
            break
    return pushes, relabels


def cancel_violations(net: FlowNetwork, state: ResidualState) -> int:
    """Saturate every residual arc whose tail sits more than one level up.

    Runs with all workers quiesced, in arc-index order.  Saturating a
    violating arc creates residual capacity only on its mate, which can never
    violate in turn (its tail is the lower endpoint), so one pass suffices.
    Returns the number of arcs cancelled.
    """
    residual = state.residual
    excess = state.excess
    height = state.height
    tail = net.tail
    head = net.head
    count = 0
    for a in range(net.arc_count):
        r = residual[a]
        if r > 0 and height[tail[a]] > height[head[a]] + 1:
            residual[a] = 0
            residual[a ^ 1] += r
            excess[tail[a]] -= r
            excess[head[a]] += r
            count += 1
    return count


def hybrid_solve(
    net: FlowNetwork,
    worker_count: int = 4,
    cycle_budget: int = DEFAULT_CYCLE_BUDGET,
    observer=None,
) -> SolveReport:
    """Run coordinated lock-free rounds until all excess is at s or t.

    observer, when given, is called as observer(net, hybrid, scanned) at
    every coordinator observation point (workers joined, heights exact).
    """
    if net.source is None or net.sink is None:
        raise ValueError("network has no source/sink")
    if worker_count < 1:
        raise ValueError(f"worker_count must be at least 1, got {worker_count}")
    if cycle_budget < 1:
        raise ValueError(f"cycle_budget must be at least 1, got {cycle_budget}")

    started = time.perf_counter()
    hybrid = hybrid_init(net, worker_count, cycle_budget)
    state = hybrid.state
    excess = state.excess
    s = net.source
    t = net.sink

    owned_lists = [
        [
            x
            for x in range(net.node_count)
            if x % worker_count == w and x != s and x != t
        ]
        for w in range(worker_count)
    ]
    owned_lists = [owned for owned in owned_lists if owned]

    pushes = 0
    relabels = 0
    rounds = 0
    while excess[s] + excess[t] < hybrid.excess_total:
        results: list[tuple[int, int] | None] = [None] * len(owned_lists)
        failures: list[BaseException] = []

        def run_worker(slot: int, owned: list[int]) -> None:
            try:
                results[slot] = lockfree_round(net, hybrid, owned)
            except BaseException as exc:  # surfaced after the join
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
            raise RuntimeError("worker failed during a round") from failures[0]
        for result in results:
            if result is not None:
                pushes += result[0]
                relabels += result[1]

        cancel_violations(net, state)
        scanned = global_relabel(net, state)
        gap_relabel(net, state, scanned)
        for x in range(net.node_count):
            if not scanned[x] and x != s and not hybrid.marked[x]:
                hybrid.marked[x] = True
                hybrid.excess_total -= excess[x]
        rounds += 1
        if observer is not None:
            observer(net, hybrid, scanned)

    elapsed = time.perf_counter() - started
    return SolveReport(
        objective=excess[t],
        pushes=pushes,
        relabels=relabels,
        rounds=rounds,
        elapsed=elapsed,
    )
