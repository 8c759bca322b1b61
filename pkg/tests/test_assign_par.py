from __future__ import annotations

import random

import pytest

from flowmatch import (
    AssignmentInstance,
    FlowNetwork,
    InfeasibleInstanceError,
    OpCounters,
    ResidualState,
    ScalingState,
    begin_refine,
    brute_force_assignment,
    extract_matching,
    is_epsilon_optimal,
    lockfree_refine_round,
    make_scaling_state,
    refine_par,
    refine_seq,
    solve_assignment,
)


def test_round_pushes_when_best_arc_is_admissible():
    scaling = make_scaling_state(AssignmentInstance.from_matrix([[3]]))
    begin_refine(scaling)
    stats = lockfree_refine_round(scaling, cycle_budget=1)
    assert stats.pushes == 1
    assert stats.relabels == 0
    assert scaling.state.excess == [0, 0]
    assert scaling.state.residual == [0, 1]


def test_round_relabels_when_no_arc_is_admissible():
    net = FlowNetwork(2, None, None)
    net.add_arc_pair(0, 1, 1, 3)
    state = ResidualState.fresh(net)
    state.excess = [1, -1]
    state.price[0] = -2
    scaling = ScalingState(
        net=net,
        instance=AssignmentInstance.from_matrix([[0]]),
        state=state,
        supplies=[1, -1],
        epsilon=1,
        alpha=10,
        scaled_cost_bound=3,
    )
    stats = lockfree_refine_round(scaling, cycle_budget=1, validate=True)
    assert stats.relabels == 1
    assert stats.pushes == 0
    # price falls to -(best part-reduced cost + epsilon)
    assert state.price[0] == -4
    # price_writes is the validation-mode ownership record
    assert set(stats.price_writes) == {0}


def test_round_touches_only_owned_nodes():
    scaling = make_scaling_state(AssignmentInstance.from_matrix([[5, 1], [4, 1]]))
    begin_refine(scaling)
    excess_before = list(scaling.state.excess)
    stats = lockfree_refine_round(scaling, owned=[0], cycle_budget=1, validate=True)
    assert stats.pushes + stats.relabels == 1
    assert all(x == 0 for x in stats.price_writes)
    # node 1 was never processed, so its excess is untouched
    assert scaling.state.excess[1] == excess_before[1]


def test_refine_par_noop_when_already_matched():
    scaling = make_scaling_state(AssignmentInstance.from_matrix([[2, 7], [6, 1]]))
    while True:
        refine_seq(scaling)
        if scaling.epsilon == 1:
            break
    price = list(scaling.state.price)
    residual = list(scaling.state.residual)
    fixed = list(scaling.fixed)
    counters = OpCounters()
    refine_par(scaling, counters=counters)
    assert counters.rounds == 0
    assert scaling.state.price == price
    assert scaling.state.residual == residual
    assert scaling.fixed == fixed


def test_refine_par_completes_single_refine():
    scaling = make_scaling_state(AssignmentInstance.from_matrix([[3]]))
    begin_refine(scaling)
    counters = OpCounters()
    refine_par(scaling, worker_count=2, counters=counters)
    assert counters.rounds >= 1
    assert scaling.state.excess == [0, 0]
    assert extract_matching(scaling) == [0]


def test_par_matches_seq_objective():
    rng = random.Random(23)
    for _ in range(10):
        n = rng.randint(1, 7)
        matrix = [[rng.randint(0, 100) for _ in range(n)] for _ in range(n)]
        inst = AssignmentInstance.from_matrix(matrix)
        want = solve_assignment(inst)[0].objective
        for wc in (1, 2, 4):
            got = solve_assignment(inst, mode="par", worker_count=wc)[0].objective
            assert got == want


def test_forced_multi_round_schedules_stay_exact():
    # tiny cycle budgets force many coordinator rounds, firing the price
    # update mid-refine on states that carry placed flow
    rng = random.Random(29)
    for _ in range(12):
        n = rng.randint(1, 6)
        matrix = [[rng.randint(0, 100) for _ in range(n)] for _ in range(n)]
        inst = AssignmentInstance.from_matrix(matrix)
        want, _ = brute_force_assignment(inst)
        for every_k in (None, 1, 2):
            got = solve_assignment(
                inst,
                mode="par",
                worker_count=1,
                cycle_budget=1,
                heuristic_every_k=every_k,
            )[0].objective
            assert got == want


def test_par_epsilon_optimal_at_refine_ends():
    rng = random.Random(31)
    for _ in range(6):
        n = rng.randint(1, 6)
        matrix = [[rng.randint(0, 100) for _ in range(n)] for _ in range(n)]

        def check(scaling):
            assert is_epsilon_optimal(
                scaling.net, scaling.state, scaling.epsilon, scaling.fixed
            )

        solve_assignment(
            AssignmentInstance.from_matrix(matrix),
            mode="par",
            worker_count=2,
            validate=True,
            on_refine_end=check,
        )


def test_par_infeasible_instance_raises():
    inst = AssignmentInstance.build(2, [(0, 0, 5), (1, 0, 3)])
    with pytest.raises(InfeasibleInstanceError):
        solve_assignment(inst, mode="par", worker_count=2)


def test_par_sparse_feasible_instance():
    inst = AssignmentInstance.build(
        3, [(0, 1, 4), (1, 0, 2), (1, 2, 7), (2, 2, 5), (2, 0, 1)]
    )
    want, _ = brute_force_assignment(inst)
    for wc in (1, 2, 4):
        got, matching = solve_assignment(inst, mode="par", worker_count=wc)
        assert got.objective == want
        assert sorted(matching) == [0, 1, 2]


def test_par_observer_fires_each_round():
    rounds = []
    solve_assignment(
        AssignmentInstance.from_matrix([[3, 8, 2], [6, 4, 9], [5, 7, 1]]),
        mode="par",
        worker_count=2,
        observer=lambda scaling: rounds.append(scaling.epsilon),
    )
    assert rounds
    assert rounds[-1] == 1
